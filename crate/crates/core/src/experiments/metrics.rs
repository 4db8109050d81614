use alloc::borrow::Cow;
use alloc::vec::Vec;

use crate::error::{ExperimentError, SpectralError};
use crate::field::{Components, VectorField};
use crate::lp::{besov_norm, sobolev_norm_direct, BesovIndex, LPFilterBank};
use crate::solver::{MHDState, Trajectory};

/// A norm used to measure differences between trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    /// `H^σ` from the Fourier weights `(1 + |k|²)^σ`.
    Sobolev(f64),
    /// Nonhomogeneous `B^s_{p,r}` through the filter bank.
    Besov(BesovIndex),
}

impl Metric {
    pub fn norm<F: Components + ?Sized>(
        &self,
        f: &F,
        bank: &LPFilterBank,
    ) -> Result<f64, ExperimentError> {
        Ok(match self {
            Metric::Sobolev(s) => {
                if **f.grid() != **bank.grid() {
                    return Err(SpectralError::GridMismatch.into());
                }
                sobolev_norm_direct(f, *s)
            }
            Metric::Besov(idx) => besov_norm(f, idx, bank, false)?,
        })
    }

    /// Same kind of norm with regularity shifted by `ds`.
    pub fn shifted(&self, ds: f64) -> Self {
        match *self {
            Metric::Sobolev(s) => Metric::Sobolev(s + ds),
            Metric::Besov(idx) => Metric::Besov(idx.with_s(idx.s + ds)),
        }
    }

    pub fn regularity(&self) -> f64 {
        match self {
            Metric::Sobolev(s) => *s,
            Metric::Besov(idx) => idx.s,
        }
    }
}

impl core::fmt::Display for Metric {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Metric::Sobolev(s) => write!(f, "H^{s}"),
            Metric::Besov(idx) => write!(f, "B^{}_{{{},{}}}", idx.s, idx.p, idx.r),
        }
    }
}

/// Norms of the differences at one time: `δu`, `δb`, and the Elsässer
/// differences `δu + δb`, `δu − δb`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DifferencePoint {
    pub du: f64,
    pub db: f64,
    pub dplus: f64,
    pub dminus: f64,
}

impl DifferencePoint {
    /// `(‖δu‖² + ‖δb‖²)^{1/2}`.
    pub fn combined(&self) -> f64 {
        libm::hypot(self.du, self.db)
    }

    pub fn direct_sum(&self) -> f64 {
        self.du + self.db
    }

    pub fn elsasser_sum(&self) -> f64 {
        self.dplus + self.dminus
    }
}

/// Difference norms of two trajectories on the first one's snapshot times.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSeries {
    pub times: Vec<f64>,
    pub metrics: Vec<Metric>,
    /// `points[m][i]` is the difference in `metrics[m]` at `times[i]`.
    pub points: Vec<Vec<DifferencePoint>>,
}

impl DifferenceSeries {
    /// Combined `(δu, δb)` norm over time in metric `m`.
    pub fn combined(&self, m: usize) -> Vec<f64> {
        self.points[m]
            .iter()
            .map(DifferencePoint::combined)
            .collect()
    }

    /// Maximum of the combined norm over the recorded times.
    pub fn sup(&self, m: usize) -> f64 {
        self.points[m]
            .iter()
            .map(DifferencePoint::combined)
            .fold(0.0, f64::max)
    }
}

fn time_tolerance(t: f64) -> f64 {
    1e-9 * t.abs().max(1.0)
}

/// State of `traj` at time `t`, interpolated linearly in time between
/// snapshots when `t` is not a snapshot time.
pub fn state_at(traj: &Trajectory, t: f64) -> Result<Cow<'_, MHDState>, ExperimentError> {
    let snaps = &traj.snapshots;
    let tol = time_tolerance(t);
    if let Some(s) = snaps.iter().find(|s| (s.t - t).abs() <= tol) {
        return Ok(Cow::Borrowed(s));
    }
    let i = snaps
        .windows(2)
        .position(|w| w[0].t < t && t < w[1].t)
        .ok_or(ExperimentError::TimeGridMismatch(t))?;
    let (a, b) = (&snaps[i], &snaps[i + 1]);
    let theta = (t - a.t) / (b.t - a.t);
    let mix = |x: &VectorField, y: &VectorField| x.scale(1.0 - theta).axpy(theta, y);
    Ok(Cow::Owned(MHDState {
        u: mix(&a.u, &b.u)?,
        b: mix(&a.b, &b.b)?,
        t,
    }))
}

pub(crate) fn point(
    x: &MHDState,
    y: &MHDState,
    metric: &Metric,
    bank: &LPFilterBank,
) -> Result<DifferencePoint, ExperimentError> {
    let du = x.u.axpy(-1.0, &y.u)?;
    let db = x.b.axpy(-1.0, &y.b)?;
    let dplus = du.axpy(1.0, &db)?;
    let dminus = du.axpy(-1.0, &db)?;
    Ok(DifferencePoint {
        du: metric.norm(&du, bank)?,
        db: metric.norm(&db, bank)?,
        dplus: metric.norm(&dplus, bank)?,
        dminus: metric.norm(&dminus, bank)?,
    })
}

/// Norms of `traj1 − traj2` at the snapshot times of `traj1`; `traj2` is
/// interpolated onto them.
pub fn difference_metrics(
    traj1: &Trajectory,
    traj2: &Trajectory,
    metrics: &[Metric],
    bank: &LPFilterBank,
) -> Result<DifferenceSeries, ExperimentError> {
    if **traj1.grid() != **traj2.grid() {
        return Err(SpectralError::GridMismatch.into());
    }
    let times = traj1.times();
    let mut points: Vec<Vec<DifferencePoint>> = metrics
        .iter()
        .map(|_| Vec::with_capacity(times.len()))
        .collect();
    for x in &traj1.snapshots {
        let y = state_at(traj2, x.t)?;
        for (m, metric) in metrics.iter().enumerate() {
            points[m].push(point(x, &y, metric, bank)?);
        }
    }
    Ok(DifferenceSeries {
        times,
        metrics: metrics.to_vec(),
        points,
    })
}

/// Cumulative trapezoid integral of `values` over `times`.
pub(crate) fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for i in 0..values.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}
