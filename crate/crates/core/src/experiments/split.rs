use alloc::vec::Vec;

use super::metrics::{difference_metrics, DifferenceSeries, Metric};
use crate::error::{ExperimentError, LpError};
use crate::exec::Executor;
use crate::field::VectorField;
use crate::lp::LPFilterBank;
use crate::solver::{solve, MHDState, SolverConfig};

/// The three legs of the triangle split between the viscous run from the
/// full data and the ideal run from the full data, through the runs from
/// the low-passed data `S_j(u₀, b₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub j: i32,
    /// Viscous from full data against viscous from `S_j` data.
    pub viscous_tail: DifferenceSeries,
    /// Viscous against ideal, both from `S_j` data.
    pub middle: DifferenceSeries,
    /// Ideal from `S_j` data against ideal from full data.
    pub ideal_tail: DifferenceSeries,
    /// Viscous against ideal, both from full data.
    pub total: DifferenceSeries,
    /// `(‖(Id − S_j)u₀‖² + ‖(Id − S_j)b₀‖²)^{1/2}` in each metric.
    pub data_tail: Vec<f64>,
}

impl SplitReport {
    /// Largest violation of `total ≤ sum of the three legs` over recorded
    /// times in metric `m` (non-positive when the split is consistent).
    pub fn triangle_excess(&self, m: usize) -> f64 {
        let legs = [&self.viscous_tail, &self.middle, &self.ideal_tail].map(|s| s.combined(m));
        self.total
            .combined(m)
            .iter()
            .enumerate()
            .map(|(i, t)| t - legs.iter().map(|l| l[i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn low_passed(f: &VectorField, j: i32, bank: &LPFilterBank) -> VectorField {
    f.map_components(|c| bank.low_pass(c, j), true)
}

/// Runs the viscous and ideal problems from `(u0, b0)` and from
/// `S_j(u0, b0)` and returns the triangle split of their difference.
pub fn mollification_split<E: Executor>(
    exec: &E,
    u0: &VectorField,
    b0: &VectorField,
    j: i32,
    mu: f64,
    nu: f64,
    metrics: &[Metric],
    config: &SolverConfig,
) -> Result<SplitReport, ExperimentError> {
    let full = MHDState::new(u0.clone(), b0.clone(), 0.0).map_err(ExperimentError::Reference)?;
    let bank = LPFilterBank::new(full.grid())?;
    if j > bank.j_max() {
        return Err(LpError::BlockOutOfRange {
            j,
            j_max: bank.j_max(),
        }
        .into());
    }
    let smooth = MHDState {
        u: low_passed(&full.u, j, &bank),
        b: low_passed(&full.b, j, &bank),
        t: 0.0,
    };
    let viscous = config.with_coefficients(mu, nu);
    let ideal = config.with_coefficients(0.0, 0.0);
    let jobs = alloc::vec![
        (0, &full, viscous),
        (1, &smooth, viscous),
        (2, &smooth, ideal),
        (3, &full, ideal)
    ];
    let runs = exec
        .map(jobs, |(index, initial, cfg)| {
            solve(initial, &cfg).map_err(|source| ExperimentError::Member { index, source })
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let pair = |a: usize, b: usize| difference_metrics(&runs[a], &runs[b], metrics, &bank);
    let mut data_tail = Vec::with_capacity(metrics.len());
    let rest_u = full.u.axpy(-1.0, &smooth.u)?;
    let rest_b = full.b.axpy(-1.0, &smooth.b)?;
    for metric in metrics {
        data_tail.push(libm::hypot(
            metric.norm(&rest_u, &bank)?,
            metric.norm(&rest_b, &bank)?,
        ));
    }
    Ok(SplitReport {
        j,
        viscous_tail: pair(0, 1)?,
        middle: pair(1, 2)?,
        ideal_tail: pair(2, 3)?,
        total: pair(0, 3)?,
        data_tail,
    })
}
