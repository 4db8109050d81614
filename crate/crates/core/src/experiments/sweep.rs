use alloc::vec::Vec;

use super::metrics::{difference_metrics, Metric};
use crate::error::ExperimentError;
use crate::exec::Executor;
use crate::field::VectorField;
use crate::lp::LPFilterBank;
use crate::solver::{solve, MHDState, SolverConfig, Trajectory};

/// Relative size of the roundoff floor: errors below `10 · FLOOR · ‖reference‖`
/// are left out of slope fits.
pub const RELATIVE_FLOOR: f64 = 1e-12;

/// Fewest points a slope fit accepts.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Viscosity,
    DataPerturbation,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Viscosity => "viscosity",
            SweepKind::DataPerturbation => "data-perturbation",
        }
    }
}

/// Least-squares line through `(log parameter, log error)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Fits `log e = slope · log p + intercept` over the points with `p > 0`
/// and `e ≥ 10 · floor`; `None` when fewer than [`MIN_FIT_POINTS`] remain.
pub fn fit_slope(parameters: &[f64], errors: &[f64], floor: f64) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = parameters
        .iter()
        .zip(errors)
        .filter(|&(&p, &e)| p > 0.0 && e.is_finite() && e > 0.0 && e >= 10.0 * floor)
        .map(|(&p, &e)| (libm::log(p), libm::log(e)))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    Some(SlopeFit {
        slope,
        intercept,
        residual: libm::sqrt(ss / n),
        points: pts.len(),
    })
}

/// Sup-in-time errors of a family of runs against a reference run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub kind: SweepKind,
    /// Sweep axis: `μ_n` or the perturbation amplitude, in run order.
    pub parameters: Vec<f64>,
    /// `ν_n` for viscosity sweeps; equal to the config `ν` otherwise.
    pub secondary: Vec<f64>,
    pub metrics: Vec<Metric>,
    /// `errors[m][i]`: `sup_t (‖δu‖² + ‖δb‖²)^{1/2}` of member `i` in `metrics[m]`.
    pub errors: Vec<Vec<f64>>,
    /// Roundoff floor per metric.
    pub floors: Vec<f64>,
    pub fits: Vec<Option<SlopeFit>>,
}

impl SweepRecord {
    fn assemble(
        kind: SweepKind,
        parameters: Vec<f64>,
        secondary: Vec<f64>,
        metrics: &[Metric],
        member_errors: Vec<Vec<f64>>,
        reference_sizes: Vec<f64>,
    ) -> Self {
        let errors: Vec<Vec<f64>> = (0..metrics.len())
            .map(|m| member_errors.iter().map(|e| e[m]).collect())
            .collect();
        let floors: Vec<f64> = reference_sizes.iter().map(|r| RELATIVE_FLOOR * r).collect();
        let fits = errors
            .iter()
            .zip(&floors)
            .map(|(e, &floor)| fit_slope(&parameters, e, floor))
            .collect();
        Self {
            kind,
            parameters,
            secondary,
            metrics: metrics.to_vec(),
            errors,
            floors,
            fits,
        }
    }

    pub fn slope(&self, m: usize) -> Option<f64> {
        self.fits[m].map(|f| f.slope)
    }
}

fn check_axis(values: &[f64]) -> Result<(), ExperimentError> {
    if values.is_empty() {
        return Err(ExperimentError::InvalidParameters(
            "sweep needs at least one member",
        ));
    }
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(ExperimentError::InvalidParameters(
            "sweep values must be finite and non-negative",
        ));
    }
    if values.windows(2).any(|w| w[1] > w[0]) {
        return Err(ExperimentError::InvalidParameters(
            "sweep values must decrease toward 0",
        ));
    }
    Ok(())
}

/// Largest value over recorded times of each metric's norm of the reference.
fn reference_sizes(
    reference: &Trajectory,
    metrics: &[Metric],
    bank: &LPFilterBank,
) -> Result<Vec<f64>, ExperimentError> {
    let mut sizes = alloc::vec![0.0f64; metrics.len()];
    for s in &reference.snapshots {
        for (m, metric) in metrics.iter().enumerate() {
            let size = libm::hypot(metric.norm(&s.u, bank)?, metric.norm(&s.b, bank)?);
            sizes[m] = sizes[m].max(size);
        }
    }
    Ok(sizes)
}

fn run_members<E: Executor>(
    exec: &E,
    reference: &Trajectory,
    members: Vec<(MHDState, SolverConfig)>,
    metrics: &[Metric],
    bank: &LPFilterBank,
) -> Result<Vec<Vec<f64>>, ExperimentError> {
    let indexed: Vec<(usize, (MHDState, SolverConfig))> = members.into_iter().enumerate().collect();
    let results = exec.map(indexed, |(index, (initial, config))| {
        let traj =
            solve(&initial, &config).map_err(|source| ExperimentError::Member { index, source })?;
        let series = difference_metrics(&traj, reference, metrics, bank)?;
        Ok((0..metrics.len()).map(|m| series.sup(m)).collect())
    });
    results.into_iter().collect()
}

fn initial_state(u0: &VectorField, b0: &VectorField) -> Result<MHDState, ExperimentError> {
    MHDState::new(u0.clone(), b0.clone(), 0.0).map_err(ExperimentError::Reference)
}

/// Runs the ideal problem and one viscous problem per `(μ_n, ν_n)` from
/// the same data, and records `sup_t ‖(u^{μ_n} − u⁰, b^{μ_n} − b⁰)‖` in
/// every metric. Aborts if any run fails.
pub fn inviscid_sweep<E: Executor>(
    exec: &E,
    u0: &VectorField,
    b0: &VectorField,
    mus: &[f64],
    nus: &[f64],
    metrics: &[Metric],
    config: &SolverConfig,
) -> Result<SweepRecord, ExperimentError> {
    if mus.len() != nus.len() {
        return Err(ExperimentError::InvalidParameters(
            "viscosity and resistivity lists differ in length",
        ));
    }
    check_axis(mus)?;
    check_axis(nus)?;
    let initial = initial_state(u0, b0)?;
    let bank = LPFilterBank::new(initial.grid())?;
    let reference =
        solve(&initial, &config.with_coefficients(0.0, 0.0)).map_err(ExperimentError::Reference)?;
    let members = mus
        .iter()
        .zip(nus)
        .map(|(&mu, &nu)| (initial.clone(), config.with_coefficients(mu, nu)))
        .collect();
    let member_errors = run_members(exec, &reference, members, metrics, &bank)?;
    let sizes = reference_sizes(&reference, metrics, &bank)?;
    Ok(SweepRecord::assemble(
        SweepKind::Viscosity,
        mus.to_vec(),
        nus.to_vec(),
        metrics,
        member_errors,
        sizes,
    ))
}

/// Runs the problem from `(u0, b0)` and from `(u0 + α w_u, b0 + α w_b)`
/// for each amplitude `α`, all with the config's `μ, ν`.
pub fn data_perturbation_sweep<E: Executor>(
    exec: &E,
    u0: &VectorField,
    b0: &VectorField,
    w_u: &VectorField,
    w_b: &VectorField,
    amplitudes: &[f64],
    metrics: &[Metric],
    config: &SolverConfig,
) -> Result<SweepRecord, ExperimentError> {
    check_axis(amplitudes)?;
    let initial = initial_state(u0, b0)?;
    let bank = LPFilterBank::new(initial.grid())?;
    let reference = solve(&initial, config).map_err(ExperimentError::Reference)?;
    let members = amplitudes
        .iter()
        .enumerate()
        .map(|(index, &alpha)| {
            let state = MHDState::new(u0.axpy(alpha, w_u)?, b0.axpy(alpha, w_b)?, 0.0)
                .map_err(|source| ExperimentError::Member { index, source })?;
            Ok((state, *config))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let member_errors = run_members(exec, &reference, members, metrics, &bank)?;
    let sizes = reference_sizes(&reference, metrics, &bank)?;
    Ok(SweepRecord::assemble(
        SweepKind::DataPerturbation,
        amplitudes.to_vec(),
        alloc::vec![config.nu; amplitudes.len()],
        metrics,
        member_errors,
        sizes,
    ))
}
