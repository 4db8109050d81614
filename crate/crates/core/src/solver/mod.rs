//! Time integration of viscous and ideal MHD, its Elsässer form, and scalar
//! transport-diffusion.

mod engine;
mod mhd;
mod transport;

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::SolveError;
use crate::field::VectorField;
use crate::grid::TorusGrid;

pub use mhd::{elsasser, from_elsasser, rhs, solve, solve_elsasser, step, time_reversed};
pub use transport::{solve_transport_diffusion, ScalarTrajectory, Source};

/// Velocity `u`, magnetic field `b`, and time `t`.
#[derive(Debug, Clone)]
pub struct MHDState {
    pub u: VectorField,
    pub b: VectorField,
    pub t: f64,
}

impl MHDState {
    /// Checks that both fields share a grid and are divergence-free.
    pub fn new(u: VectorField, b: VectorField, t: f64) -> Result<Self, SolveError> {
        if !u.same_grid(&b) {
            return Err(SolveError::Spectral(
                crate::error::SpectralError::GridMismatch,
            ));
        }
        let u = u.certify().map_err(SolveError::NotSolenoidal)?;
        let b = b.certify().map_err(SolveError::NotSolenoidal)?;
        Ok(Self { u, b, t })
    }

    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        Self {
            u: VectorField::zeros(grid),
            b: VectorField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.u.grid()
    }

    /// `½(‖u‖² + ‖b‖²)`.
    pub fn energy(&self) -> f64 {
        0.5 * (self.u.inner(&self.u) + self.b.inner(&self.b))
    }

    /// `∫ u · b dx`.
    pub fn cross_helicity(&self) -> f64 {
        self.u.inner(&self.b)
    }
}

/// Viscosity, resistivity, step, horizon, snapshot cadence, and guards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub mu: f64,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between stored snapshots; the initial and final states are always stored.
    pub snapshot_stride: usize,
    /// Abort when `‖∇u‖_∞ + ‖∇b‖_∞` exceeds this.
    pub blowup_threshold: f64,
    /// Abort when `dt (max|u| + max|b|) / Δx` exceeds this.
    pub cfl_limit: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu: 0.0,
            nu: 0.0,
            dt: 1e-3,
            t_end: 0.5,
            snapshot_stride: 10,
            blowup_threshold: 100.0,
            cfl_limit: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(SolveError::InvalidConfig(
                "mu must be finite and non-negative",
            ));
        }
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return Err(SolveError::InvalidConfig(
                "nu must be finite and non-negative",
            ));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SolveError::InvalidConfig("dt must be positive"));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(SolveError::InvalidConfig("t_end must be positive"));
        }
        if self.snapshot_stride == 0 {
            return Err(SolveError::InvalidConfig(
                "snapshot_stride must be at least 1",
            ));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(SolveError::InvalidConfig(
                "blowup_threshold must be positive",
            ));
        }
        if !(self.cfl_limit > 0.0) {
            return Err(SolveError::InvalidConfig("cfl_limit must be positive"));
        }
        Ok(())
    }

    /// Same configuration with other coefficients.
    pub fn with_coefficients(self, mu: f64, nu: f64) -> Self {
        Self { mu, nu, ..self }
    }

    /// Number of stored snapshots a full run produces.
    pub fn snapshot_count(&self) -> usize {
        let steps = engine::step_plan(self.dt, self.t_end).len();
        let regular = steps / self.snapshot_stride;
        1 + regular + usize::from(steps % self.snapshot_stride != 0)
    }
}

/// `fraction · Δx / (max|u| + max|b|)`: a step with advective CFL number
/// `fraction` for the given state (`None` for a state at rest).
pub fn cfl_dt(state: &MHDState, fraction: f64) -> Option<f64> {
    let speed = state.u.max_magnitude() + state.b.max_magnitude();
    if speed > 0.0 {
        Some(fraction * state.grid().spacing() / speed)
    } else {
        None
    }
}

/// Scalar diagnostics of one recorded state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub energy: f64,
    pub cross_helicity: f64,
    /// `‖∇u‖_∞ + ‖∇b‖_∞`.
    pub max_gradient: f64,
    /// `μ‖∇u‖² + ν‖∇b‖²`, the energy loss rate of the viscous system.
    pub dissipation: f64,
    /// Larger of the relative divergences of `u` and `b`.
    pub divergence: f64,
}

/// Snapshots every `snapshot_stride` steps and diagnostics at every step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<MHDState>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn initial(&self) -> &MHDState {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &MHDState {
        self.snapshots
            .last()
            .expect("trajectories hold the initial state")
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.snapshots[0].grid()
    }
}

/// `‖∇f‖²_{L²}` summed over components, from the coefficients.
pub(crate) fn gradient_energy(f: &VectorField) -> f64 {
    let grid = f.grid();
    let sum: f64 = f
        .components()
        .iter()
        .map(|c| {
            c.coeffs()
                .iter()
                .zip(grid.k_squared())
                .map(|(z, k2)| k2 * z.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    sum * grid.volume()
}
