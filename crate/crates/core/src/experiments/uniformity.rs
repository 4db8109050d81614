use alloc::vec::Vec;

use super::metrics::cumulative_trapezoid;
use crate::error::{ExperimentError, LpError};
use crate::exec::Executor;
use crate::field::{SpectralField, VectorField};
use crate::lp::{besov_norm, BesovIndex, LPFilterBank};
use crate::solver::{solve_transport_diffusion, SolverConfig, Source};
use crate::spectral::gradient_sup;

/// Transport-diffusion estimate at one diffusivity.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityRow {
    pub eps: f64,
    pub times: Vec<f64>,
    /// `sup_{τ ≤ t} ‖f(τ)‖_{B^s_{p,r}}`.
    pub lhs: Vec<f64>,
    /// `‖f₀‖ + ∫₀ᵗ‖g‖`.
    pub data: Vec<f64>,
    /// `∫₀ᵗ (‖∇v‖_∞ ‖f‖_{B^s_{p,r}} + ‖∇f‖_∞ ‖v‖_{B^s_{p,r}})`.
    pub commutator: Vec<f64>,
    /// `max_t lhs / (data + C · commutator)`.
    pub ratio: f64,
}

/// Per-diffusivity ratios of the measured left side to the right side of
/// the transport-diffusion estimate, with one constant `C` for all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub index: BesovIndex,
    /// Smallest `C ≥ 0` making the estimate hold at the largest diffusivity.
    pub constant: f64,
    pub rows: Vec<UniformityRow>,
}

impl UniformityReport {
    /// Largest ratio over smallest ratio.
    pub fn spread(&self) -> f64 {
        let hi = self
            .rows
            .iter()
            .map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        let lo = self
            .rows
            .iter()
            .map(|r| r.ratio)
            .fold(f64::INFINITY, f64::min);
        hi / lo
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn ratio(row: &UniformityRow, c: f64) -> f64 {
    row.lhs
        .iter()
        .zip(&row.data)
        .zip(&row.commutator)
        .map(|((l, d), k)| {
            let rhs = d + c * k;
            if rhs > 0.0 {
                l / rhs
            } else if *l == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

fn fitted_constant(row: &UniformityRow) -> f64 {
    row.lhs
        .iter()
        .zip(&row.data)
        .zip(&row.commutator)
        .filter(|&((l, d), k)| l > d && *k > 0.0)
        .map(|((l, d), k)| (l - d) / k)
        .fold(0.0, f64::max)
}

/// Solves `∂_t f + v·∇f − εΔf = g` for every `ε` in `eps_list`, fits `C`
/// at the largest `ε`, and reports each run's ratio with that `C`.
pub fn transport_diffusion_uniformity<E: Executor>(
    exec: &E,
    v: &Source<'_, VectorField>,
    f0: &SpectralField,
    g: Option<&Source<'_, SpectralField>>,
    eps_list: &[f64],
    idx: &BesovIndex,
    config: &SolverConfig,
) -> Result<UniformityReport, ExperimentError> {
    if eps_list.is_empty() {
        return Err(ExperimentError::InvalidParameters(
            "diffusivity list is empty",
        ));
    }
    if !(idx.s > -1.0) {
        return Err(LpError::InvalidIndex("transport estimate needs s > -1").into());
    }
    let bank = LPFilterBank::new(f0.grid())?;
    let rows = exec
        .map(
            eps_list.to_vec(),
            |eps| -> Result<UniformityRow, ExperimentError> {
                let traj = solve_transport_diffusion(v, f0, g, eps, config)?;
                let mut lhs = Vec::with_capacity(traj.times.len());
                let mut forcing = Vec::with_capacity(traj.times.len());
                let mut integrand = Vec::with_capacity(traj.times.len());
                let mut running = 0.0f64;
                for (t, f) in traj.times.iter().zip(&traj.snapshots) {
                    let vt = v.at(*t);
                    let fb = besov_norm(f, idx, &bank, false)?;
                    running = running.max(fb);
                    lhs.push(running);
                    forcing.push(match g {
                        Some(g) => besov_norm(&g.at(*t), idx, &bank, false)?,
                        None => 0.0,
                    });
                    integrand.push(
                        gradient_sup(&vt) * fb
                            + gradient_sup(f) * besov_norm(&vt, idx, &bank, false)?,
                    );
                }
                let f0_norm = lhs[0];
                let data = cumulative_trapezoid(&traj.times, &forcing)
                    .into_iter()
                    .map(|x| f0_norm + x)
                    .collect();
                Ok(UniformityRow {
                    eps,
                    commutator: cumulative_trapezoid(&traj.times, &integrand),
                    times: traj.times,
                    lhs,
                    data,
                    ratio: 0.0,
                })
            },
        )
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let largest = rows.iter().enumerate().fold(
        0,
        |best, (i, r)| if r.eps > rows[best].eps { i } else { best },
    );
    let constant = fitted_constant(&rows[largest]);
    let rows = rows
        .into_iter()
        .map(|mut r| {
            r.ratio = ratio(&r, constant);
            r
        })
        .collect();
    Ok(UniformityReport {
        index: *idx,
        constant,
        rows,
    })
}
