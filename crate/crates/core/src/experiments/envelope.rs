use alloc::vec::Vec;

use super::metrics::{cumulative_trapezoid, state_at, Metric};
use crate::error::{ExperimentError, SpectralError};
use crate::lp::{BesovIndex, LPFilterBank};
use crate::solver::{elsasser, Trajectory};

/// Exponent integrands at one recorded time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSample {
    pub t: f64,
    /// `1 + ‖u‖_{H^s} + ‖v‖_{H^s} + ‖b‖_{H^s} + ‖c‖_{H^s}`; the two-solution
    /// and viscous-ideal Grönwall exponents share this form.
    pub sobolev: f64,
    /// The same sum for the Elsässer variables `u ± b`, `v ± c` in the
    /// Besov index of the report.
    pub elsasser: f64,
}

/// Measured `H^{s−1}` gap between a viscous and an ideal run against the
/// Grönwall envelope
/// `C (gap₀ + μ² ∫‖u‖²_{H^{s+1}} + ν² ∫‖b‖²_{H^{s+1}}) e^{∫(1 + ‖u‖ + ‖v‖ + ‖b‖ + ‖c‖)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub times: Vec<f64>,
    /// `‖ω(t)‖²_{H^{s−1}} + ‖a(t)‖²_{H^{s−1}}`.
    pub measured: Vec<f64>,
    /// The envelope with `C = 1`.
    pub base: Vec<f64>,
    /// Smallest `C ≥ 1` with `measured ≤ C · base` at every recorded time.
    pub constant: f64,
    pub exponents: Vec<ExponentSample>,
    /// `∫₀ᵗ` of the Sobolev exponent integrand.
    pub b_integral: Vec<f64>,
    /// `∫₀ᵗ` of the Elsässer exponent integrand.
    pub b_bar_integral: Vec<f64>,
}

impl EnvelopeReport {
    pub fn envelope(&self) -> Vec<f64> {
        self.base.iter().map(|b| self.constant * b).collect()
    }
}

/// Compares `traj_viscous` (coefficients `μ, ν`) with `traj_ideal` at the
/// viscous run's snapshot times; integrals use the trapezoid rule over them.
pub fn envelope_check(
    traj_viscous: &Trajectory,
    traj_ideal: &Trajectory,
    s: f64,
    mu: f64,
    nu: f64,
    besov: &BesovIndex,
) -> Result<EnvelopeReport, ExperimentError> {
    if **traj_viscous.grid() != **traj_ideal.grid() {
        return Err(SpectralError::GridMismatch.into());
    }
    if traj_ideal.snapshots.iter().all(|x| {
        x.u.components()
            .iter()
            .chain(x.b.components())
            .all(|c| c.coeffs().iter().all(|z| z.norm_sqr() == 0.0))
    }) {
        return Err(ExperimentError::DegenerateReference);
    }
    let bank = LPFilterBank::new(traj_viscous.grid())?;
    let low = Metric::Sobolev(s - 1.0);
    let mid = Metric::Sobolev(s);
    let high = Metric::Sobolev(s + 1.0);
    let besov = Metric::Besov(*besov);

    let times = traj_viscous.times();
    let mut measured = Vec::with_capacity(times.len());
    let mut forcing = Vec::with_capacity(times.len());
    let mut exponents = Vec::with_capacity(times.len());
    for x in &traj_viscous.snapshots {
        let y = state_at(traj_ideal, x.t)?;
        let omega = x.u.axpy(-1.0, &y.u)?;
        let a = x.b.axpy(-1.0, &y.b)?;
        let w = low.norm(&omega, &bank)?;
        let e = low.norm(&a, &bank)?;
        measured.push(w * w + e * e);
        let hu = high.norm(&x.u, &bank)?;
        let hb = high.norm(&x.b, &bank)?;
        forcing.push(mu * mu * hu * hu + nu * nu * hb * hb);
        let sobolev = 1.0
            + mid.norm(&x.u, &bank)?
            + mid.norm(&y.u, &bank)?
            + mid.norm(&x.b, &bank)?
            + mid.norm(&y.b, &bank)?;
        let (xp, xm) = elsasser(x);
        let (yp, ym) = elsasser(&y);
        let elsasser = 1.0
            + besov.norm(&xp, &bank)?
            + besov.norm(&yp, &bank)?
            + besov.norm(&xm, &bank)?
            + besov.norm(&ym, &bank)?;
        exponents.push(ExponentSample {
            t: x.t,
            sobolev,
            elsasser,
        });
    }
    let forcing_integral = cumulative_trapezoid(&times, &forcing);
    let b_integral = cumulative_trapezoid(
        &times,
        &exponents.iter().map(|e| e.sobolev).collect::<Vec<_>>(),
    );
    let b_bar_integral = cumulative_trapezoid(
        &times,
        &exponents.iter().map(|e| e.elsasser).collect::<Vec<_>>(),
    );
    let gap = measured[0];
    let base: Vec<f64> = forcing_integral
        .iter()
        .zip(&b_integral)
        .map(|(f, b)| (gap + f) * libm::exp(*b))
        .collect();

    let mut constant = 1.0f64;
    for (m, b) in measured.iter().zip(&base) {
        if *m == 0.0 {
            continue;
        }
        if *b == 0.0 {
            return Err(ExperimentError::InvalidParameters(
                "envelope vanishes where the measured gap does not",
            ));
        }
        constant = constant.max(m / b);
    }
    Ok(EnvelopeReport {
        times,
        measured,
        base,
        constant,
        exponents,
        b_integral,
        b_bar_integral,
    })
}
