use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::engine::{step_plan, Arrays, Limits, Reading, SpectralSystem, Stepper};
use super::SolverConfig;
use crate::error::{SolveError, SpectralError};
use crate::field::{SpectralField, VectorField};
use crate::grid::TorusGrid;
use crate::spectral::{advective_product, forward_dealiased, gradient_values};

/// Velocity or forcing that is either fixed or given as a function of time.
pub enum Source<'a, T> {
    Steady(T),
    Unsteady(&'a (dyn Fn(f64) -> T + Sync)),
}

impl<T: Clone> Source<'_, T> {
    pub fn at(&self, t: f64) -> T {
        match self {
            Source::Steady(v) => v.clone(),
            Source::Unsteady(f) => f(t),
        }
    }
}

/// Stored states of a scalar run.
#[derive(Debug, Clone)]
pub struct ScalarTrajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
}

struct Transport<'a> {
    grid: Arc<TorusGrid>,
    eps: f64,
    velocity: &'a Source<'a, VectorField>,
    steady_velocity: Option<Vec<Vec<f64>>>,
    forcing: Option<&'a Source<'a, SpectralField>>,
}

impl SpectralSystem for Transport<'_> {
    fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    fn diffusivities(&self) -> Vec<f64> {
        vec![self.eps]
    }

    fn nonlinear(&self, t: f64, state: &Arrays) -> Result<(Arrays, Reading), SolveError> {
        let grid = &self.grid;
        let sampled;
        let velocity = match &self.steady_velocity {
            Some(v) => v,
            None => {
                let v = self.velocity.at(t);
                if **v.grid() != **grid {
                    return Err(SpectralError::GridMismatch.into());
                }
                sampled = v
                    .components()
                    .iter()
                    .map(|c| c.values().into_owned())
                    .collect::<Vec<_>>();
                &sampled
            }
        };
        let f = SpectralField::from_coeffs_unchecked(grid, state[0].clone());
        let grads = gradient_values(&f);
        let mut tendency = forward_dealiased(grid, &advective_product(velocity, &grads));
        tendency.iter_mut().for_each(|c| *c = -*c);
        if let Some(g) = self.forcing {
            let g = g.at(t);
            for (o, c) in tendency.iter_mut().zip(g.coeffs()) {
                *o += c;
            }
        }
        let len = grid.len();
        let speed = libm::sqrt(
            (0..len)
                .map(|i| velocity.iter().map(|v| v[i] * v[i]).sum::<f64>())
                .fold(0.0, f64::max),
        );
        let gradient = libm::sqrt(
            (0..len)
                .map(|i| grads.iter().map(|g| g[i] * g[i]).sum::<f64>())
                .fold(0.0, f64::max),
        );
        Ok((vec![tendency], Reading { speed, gradient }))
    }
}

/// Integrates `∂_t f + v·∇f − εΔf = g` from `f0` over `[0, config.t_end]`
/// with step `config.dt`; `config.mu` and `config.nu` are ignored.
pub fn solve_transport_diffusion(
    v: &Source<'_, VectorField>,
    f0: &SpectralField,
    g: Option<&Source<'_, SpectralField>>,
    eps: f64,
    config: &SolverConfig,
) -> Result<ScalarTrajectory, SolveError> {
    config.validate()?;
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(SolveError::InvalidConfig(
            "diffusivity must be finite and non-negative",
        ));
    }
    let grid = f0.grid().clone();
    let steady_velocity = match v {
        Source::Steady(field) => {
            if !field.component(0).same_grid(f0) {
                return Err(SpectralError::GridMismatch.into());
            }
            Some(
                field
                    .components()
                    .iter()
                    .map(|c| c.values().into_owned())
                    .collect(),
            )
        }
        Source::Unsteady(_) => None,
    };
    let system = Transport {
        grid: grid.clone(),
        eps,
        velocity: v,
        steady_velocity,
        forcing: g,
    };
    let mut stepper = Stepper::new(
        &system,
        Limits {
            cfl: config.cfl_limit,
            blowup: config.blowup_threshold,
        },
    );
    let plan = step_plan(config.dt, config.t_end);
    let mut arrays = vec![f0.coeffs().to_vec()];
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut snapshots = vec![f0.clone()];
    for (i, &h) in plan.iter().enumerate() {
        stepper.step(&mut arrays, t, h)?;
        t = if i + 1 == plan.len() {
            config.t_end
        } else {
            t + h
        };
        if (i + 1) % config.snapshot_stride == 0 || i + 1 == plan.len() {
            times.push(t);
            snapshots.push(SpectralField::from_coeffs_unchecked(
                &grid,
                arrays[0].clone(),
            ));
        }
    }
    Ok(ScalarTrajectory { times, snapshots })
}
