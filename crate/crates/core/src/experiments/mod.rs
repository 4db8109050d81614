//! Inviscid-limit experiments: difference metrics between runs, viscosity
//! and data sweeps with log-log slope fits, the mollification split,
//! Grönwall-envelope diagnostics, and diffusivity-uniformity of the
//! transport estimate.
//!
//! Sweeps run their members through an [`Executor`](crate::exec::Executor)
//! and fold the results in parameter order, so the output does not depend
//! on how members were scheduled.

mod envelope;
mod metrics;
mod split;
mod sweep;
mod uniformity;

pub use envelope::{envelope_check, EnvelopeReport, ExponentSample};
pub use metrics::{difference_metrics, state_at, DifferencePoint, DifferenceSeries, Metric};
pub use split::{mollification_split, SplitReport};
pub use sweep::{
    data_perturbation_sweep, fit_slope, inviscid_sweep, SlopeFit, SweepKind, SweepRecord,
    MIN_FIT_POINTS, RELATIVE_FLOOR,
};
pub use uniformity::{transport_diffusion_uniformity, UniformityReport, UniformityRow};
