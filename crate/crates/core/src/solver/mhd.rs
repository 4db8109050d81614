use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::engine::{step_plan, Arrays, Limits, Reading, SpectralSystem, Stepper};
use super::{gradient_energy, Diagnostics, MHDState, SolverConfig, Trajectory};
use crate::error::{SolveError, SpectralError};
use crate::field::{SpectralField, VectorField};
use crate::grid::TorusGrid;
use crate::spectral::{derivative_coeffs, forward_dealiased, gradient_sup, leray_in_place};
use num_complex::Complex64;

/// Physical samples of a group of `d` arrays and of all their first derivatives.
struct Sampled {
    values: Vec<Vec<f64>>,
    /// `grads[a][c]` holds `∂_c` of component `a`.
    grads: Vec<Vec<Vec<f64>>>,
}

impl Sampled {
    fn new(grid: &TorusGrid, arrays: &[Vec<Complex64>]) -> Self {
        let fft = grid.fft();
        let values = arrays.iter().map(|a| fft.inverse_real(a)).collect();
        let grads = arrays
            .iter()
            .map(|a| {
                (0..grid.dim())
                    .map(|c| fft.inverse_real(&derivative_coeffs(grid, a, c)))
                    .collect()
            })
            .collect();
        Self { values, grads }
    }

    fn max_speed(&self) -> f64 {
        let len = self.values[0].len();
        libm::sqrt(
            (0..len)
                .map(|i| self.values.iter().map(|v| v[i] * v[i]).sum::<f64>())
                .fold(0.0, f64::max),
        )
    }

    fn max_gradient(&self) -> f64 {
        let len = self.values[0].len();
        libm::sqrt(
            (0..len)
                .map(|i| {
                    self.grads
                        .iter()
                        .flat_map(|g| g.iter().map(move |gc| gc[i] * gc[i]))
                        .sum::<f64>()
                })
                .fold(0.0, f64::max),
        )
    }
}

/// `Σ_c w_c ∂_c f_a` accumulated into `out[a]` with weight `sign`.
fn add_advection(out: &mut [Vec<f64>], sign: f64, w: &Sampled, f: &Sampled) {
    for (a, o) in out.iter_mut().enumerate() {
        for (c, wc) in w.values.iter().enumerate() {
            let g = &f.grads[a][c];
            for ((x, &p), &q) in o.iter_mut().zip(wc).zip(g) {
                *x += sign * p * q;
            }
        }
    }
}

fn to_spectral(grid: &TorusGrid, phys: Vec<Vec<f64>>, project: bool) -> Arrays {
    let mut out: Arrays = phys.iter().map(|p| forward_dealiased(grid, p)).collect();
    if project {
        leray_in_place(grid, &mut out);
    }
    out
}

/// MHD in `(u, b)`: arrays `[u_1 … u_d, b_1 … b_d]`.
struct Primitive {
    grid: Arc<TorusGrid>,
    mu: f64,
    nu: f64,
}

impl SpectralSystem for Primitive {
    fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    fn diffusivities(&self) -> Vec<f64> {
        let d = self.grid.dim();
        let mut k = vec![self.mu; d];
        k.extend(vec![self.nu; d]);
        k
    }

    fn nonlinear(&self, _t: f64, state: &Arrays) -> Result<(Arrays, Reading), SolveError> {
        let grid = &*self.grid;
        let d = grid.dim();
        let u = Sampled::new(grid, &state[..d]);
        let b = Sampled::new(grid, &state[d..]);
        let len = grid.len();
        let mut du = vec![vec![0.0; len]; d];
        add_advection(&mut du, -1.0, &u, &u);
        add_advection(&mut du, 1.0, &b, &b);
        let mut db = vec![vec![0.0; len]; d];
        add_advection(&mut db, -1.0, &u, &b);
        add_advection(&mut db, 1.0, &b, &u);
        let reading = Reading {
            speed: u.max_speed() + b.max_speed(),
            gradient: u.max_gradient() + b.max_gradient(),
        };
        let mut out = to_spectral(grid, du, true);
        out.extend(to_spectral(grid, db, false));
        Ok((out, reading))
    }

    fn finish(&self, state: &mut Arrays) {
        let d = self.grid.dim();
        leray_in_place(&self.grid, &mut state[..d]);
        leray_in_place(&self.grid, &mut state[d..]);
    }
}

/// Equal-coefficient MHD in Elsässer variables: arrays `[ū, b̄]` with
/// `∂_t ū = −P(b̄·∇ū) + μΔū`, `∂_t b̄ = −P(ū·∇b̄) + μΔb̄`.
struct Elsasser {
    grid: Arc<TorusGrid>,
    mu: f64,
}

impl SpectralSystem for Elsasser {
    fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    fn diffusivities(&self) -> Vec<f64> {
        vec![self.mu; 2 * self.grid.dim()]
    }

    fn nonlinear(&self, _t: f64, state: &Arrays) -> Result<(Arrays, Reading), SolveError> {
        let grid = &*self.grid;
        let d = grid.dim();
        let plus = Sampled::new(grid, &state[..d]);
        let minus = Sampled::new(grid, &state[d..]);
        let len = grid.len();
        let mut dp = vec![vec![0.0; len]; d];
        add_advection(&mut dp, -1.0, &minus, &plus);
        let mut dm = vec![vec![0.0; len]; d];
        add_advection(&mut dm, -1.0, &plus, &minus);
        let reading = Reading {
            speed: plus.max_speed() + minus.max_speed(),
            gradient: plus.max_gradient() + minus.max_gradient(),
        };
        let mut out = to_spectral(grid, dp, true);
        out.extend(to_spectral(grid, dm, true));
        Ok((out, reading))
    }

    fn finish(&self, state: &mut Arrays) {
        let d = self.grid.dim();
        leray_in_place(&self.grid, &mut state[..d]);
        leray_in_place(&self.grid, &mut state[d..]);
    }
}

fn pack(u: &VectorField, b: &VectorField) -> Arrays {
    u.components()
        .iter()
        .chain(b.components())
        .map(|c| c.coeffs().to_vec())
        .collect()
}

fn unpack(grid: &Arc<TorusGrid>, arrays: &[Vec<Complex64>]) -> (VectorField, VectorField) {
    let d = grid.dim();
    let field = |part: &[Vec<Complex64>]| {
        VectorField::from_parts(
            part.iter()
                .map(|a| SpectralField::from_coeffs_unchecked(grid, a.clone()))
                .collect(),
            true,
        )
    };
    (field(&arrays[..d]), field(&arrays[d..]))
}

fn check_initial(state: &MHDState) -> Result<(), SolveError> {
    if !state.u.same_grid(&state.b) {
        return Err(SpectralError::GridMismatch.into());
    }
    for f in [&state.u, &state.b] {
        if !f.is_divergence_free() {
            let ratio = f.divergence_ratio();
            if ratio > crate::field::DIVERGENCE_TOLERANCE {
                return Err(SolveError::NotSolenoidal(ratio));
            }
        }
    }
    Ok(())
}

fn limits(config: &SolverConfig) -> Limits {
    Limits {
        cfl: config.cfl_limit,
        blowup: config.blowup_threshold,
    }
}

fn diagnostics(state: &MHDState, config: &SolverConfig, max_gradient: f64) -> Diagnostics {
    Diagnostics {
        t: state.t,
        energy: state.energy(),
        cross_helicity: state.cross_helicity(),
        max_gradient,
        dissipation: config.mu * gradient_energy(&state.u) + config.nu * gradient_energy(&state.b),
        divergence: state.u.divergence_ratio().max(state.b.divergence_ratio()),
    }
}

/// Integrates a system whose arrays map to `(u, b)` through `to_state`.
fn drive<S: SpectralSystem>(
    system: &S,
    mut arrays: Arrays,
    t0: f64,
    config: &SolverConfig,
    to_state: impl Fn(&Arrays, f64) -> MHDState,
    reading_in_primitive: bool,
) -> Result<Trajectory, SolveError> {
    config.validate()?;
    let mut stepper = Stepper::new(system, limits(config));
    let plan = step_plan(config.dt, config.t_end);
    let mut t = t0;
    let mut snapshots = vec![to_state(&arrays, t)];
    let mut diags = Vec::with_capacity(plan.len() + 1);
    for (i, &h) in plan.iter().enumerate() {
        let before = if i == 0 {
            snapshots[0].clone()
        } else {
            to_state(&arrays, t)
        };
        let reading = stepper.step(&mut arrays, t, h)?;
        let max_gradient = if reading_in_primitive {
            reading.gradient
        } else {
            gradient_sup(&before.u) + gradient_sup(&before.b)
        };
        diags.push(diagnostics(&before, config, max_gradient));
        t = if i + 1 == plan.len() {
            t0 + config.t_end
        } else {
            t + h
        };
        if (i + 1) % config.snapshot_stride == 0 || i + 1 == plan.len() {
            snapshots.push(to_state(&arrays, t));
        }
    }
    let last = snapshots.last().expect("initial snapshot");
    let g = gradient_sup(&last.u) + gradient_sup(&last.b);
    diags.push(diagnostics(last, config, g));
    Ok(Trajectory {
        snapshots,
        diagnostics: diags,
    })
}

/// `(∂_t u, ∂_t b)` of viscous MHD with the pressure eliminated:
/// `P(−u·∇u + b·∇b) + μΔu` and `−u·∇b + b·∇u + νΔb`.
pub fn rhs(state: &MHDState, mu: f64, nu: f64) -> Result<(VectorField, VectorField), SolveError> {
    check_initial(state)?;
    let grid = state.grid().clone();
    let system = Primitive {
        grid: grid.clone(),
        mu,
        nu,
    };
    let (mut out, _) = system.nonlinear(state.t, &pack(&state.u, &state.b))?;
    let d = grid.dim();
    for (q, arr) in out.iter_mut().enumerate() {
        let kappa = if q < d { mu } else { nu };
        let src = if q < d {
            state.u.component(q).coeffs()
        } else {
            state.b.component(q - d).coeffs()
        };
        for ((o, s), k2) in arr.iter_mut().zip(src).zip(grid.k_squared()) {
            *o -= s * (kappa * k2);
        }
    }
    let (du, db) = unpack(&grid, &out);
    Ok((du, db))
}

/// One step of length `config.dt`.
pub fn step(state: &MHDState, config: &SolverConfig) -> Result<MHDState, SolveError> {
    config.validate()?;
    check_initial(state)?;
    let grid = state.grid().clone();
    let system = Primitive {
        grid: grid.clone(),
        mu: config.mu,
        nu: config.nu,
    };
    let mut arrays = pack(&state.u, &state.b);
    Stepper::new(&system, limits(config)).step(&mut arrays, state.t, config.dt)?;
    let (u, b) = unpack(&grid, &arrays);
    Ok(MHDState {
        u,
        b,
        t: state.t + config.dt,
    })
}

/// Integrates viscous (or, with `μ = ν = 0`, ideal) MHD to `t_end`.
pub fn solve(initial: &MHDState, config: &SolverConfig) -> Result<Trajectory, SolveError> {
    check_initial(initial)?;
    let grid = initial.grid().clone();
    let system = Primitive {
        grid: grid.clone(),
        mu: config.mu,
        nu: config.nu,
    };
    let to_state = |a: &Arrays, t: f64| {
        let (u, b) = unpack(&grid, a);
        MHDState { u, b, t }
    };
    drive(
        &system,
        pack(&initial.u, &initial.b),
        initial.t,
        config,
        to_state,
        true,
    )
}

/// Integrates the equal-coefficient system in Elsässer variables and maps
/// every recorded state back to `(u, b)`. Requires `μ = ν`.
pub fn solve_elsasser(initial: &MHDState, config: &SolverConfig) -> Result<Trajectory, SolveError> {
    if config.mu != config.nu {
        return Err(SolveError::InvalidConfig("the Elsässer form needs mu = nu"));
    }
    check_initial(initial)?;
    let grid = initial.grid().clone();
    let system = Elsasser {
        grid: grid.clone(),
        mu: config.mu,
    };
    let (plus, minus) = elsasser(initial);
    let to_state = |a: &Arrays, t: f64| {
        let (p, m) = unpack(&grid, a);
        let (u, b) = from_elsasser(&p, &m);
        MHDState { u, b, t }
    };
    drive(
        &system,
        pack(&plus, &minus),
        initial.t,
        config,
        to_state,
        false,
    )
}

/// `(ū, b̄) = (u + b, u − b)`.
pub fn elsasser(state: &MHDState) -> (VectorField, VectorField) {
    (&state.u + &state.b, &state.u - &state.b)
}

/// `(u, b) = ((ū + b̄)/2, (ū − b̄)/2)`.
pub fn from_elsasser(plus: &VectorField, minus: &VectorField) -> (VectorField, VectorField) {
    ((plus + minus).scale(0.5), (plus - minus).scale(0.5))
}

/// `(−u, b)` at the same time: ideal MHD run backwards from here retraces
/// the forward solution with the velocity negated.
pub fn time_reversed(state: &MHDState) -> MHDState {
    MHDState {
        u: state.u.scale(-1.0),
        b: state.b.clone(),
        t: state.t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::spectral::leray_project;
    use libm::{cos, sin};

    fn taylor_green(g: &Arc<TorusGrid>) -> VectorField {
        leray_project(&VectorField::from_fn(g, |x| {
            [cos(x[0]) * sin(x[1]), -sin(x[0]) * cos(x[1]), 0.0]
        }))
    }

    fn wavy(g: &Arc<TorusGrid>) -> VectorField {
        leray_project(&VectorField::from_fn(g, |x| {
            [
                sin(2.0 * x[1]) + 0.3 * cos(x[0] + x[1]),
                cos(x[0]) - 0.2 * sin(3.0 * x[0]),
                0.0,
            ]
        }))
    }

    #[test]
    fn equal_fields_cancel_nonlinearity() {
        let g = make_grid(2, 32).unwrap();
        let u = wavy(&g);
        let state = MHDState::new(u.clone(), u.clone(), 0.0).unwrap();
        let (du, db) = rhs(&state, 0.1, 0.1).unwrap();
        let heat = crate::spectral::laplacian(u.component(0)).scale(0.1);
        assert!((du.component(0) - &heat).max_abs() < 1e-13);
        assert!((&du - &db).max_magnitude() < 1e-15);
    }

    #[test]
    fn taylor_green_projects_to_pure_decay() {
        let g = make_grid(2, 32).unwrap();
        let u = taylor_green(&g);
        let state = MHDState::new(u.clone(), VectorField::zeros(&g), 0.0).unwrap();
        let (du, db) = rhs(&state, 0.05, 0.0).unwrap();
        let expected = u.scale(-2.0 * 0.05);
        assert!((&du - &expected).max_magnitude() < 1e-13);
        assert!(db.max_magnitude() < 1e-15);
    }

    #[test]
    fn zero_and_steady_states() {
        let g = make_grid(2, 16).unwrap();
        let config = SolverConfig::default();
        let zero = step(&MHDState::zeros(&g), &config).unwrap();
        assert_eq!(zero.u.max_magnitude() + zero.b.max_magnitude(), 0.0);
        let u = wavy(&g);
        let state = MHDState::new(u.clone(), u.clone(), 0.0).unwrap();
        let next = step(&state, &config).unwrap();
        assert!((&next.u - &u).max_magnitude() < 1e-12);
        assert!((next.t - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn elsasser_examples() {
        let g = make_grid(2, 16).unwrap();
        let u = wavy(&g);
        let s = MHDState::new(u.clone(), u.clone(), 0.0).unwrap();
        let (p, m) = elsasser(&s);
        assert!((&p - &u.scale(2.0)).max_magnitude() < 1e-15);
        assert_eq!(m.max_magnitude(), 0.0);
        let s = MHDState::new(u.clone(), u.scale(-1.0), 0.0).unwrap();
        assert_eq!(elsasser(&s).0.max_magnitude(), 0.0);
        let s = MHDState::new(u.clone(), taylor_green(&g), 0.0).unwrap();
        let (p, m) = elsasser(&s);
        let (u2, b2) = from_elsasser(&p, &m);
        assert!((&u2 - &s.u).max_magnitude() < 1e-15);
        assert!((&b2 - &s.b).max_magnitude() < 1e-15);
    }

    #[test]
    fn guards_trip_with_time() {
        let g = make_grid(2, 16).unwrap();
        let u = wavy(&g).scale(50.0);
        let state = MHDState::new(u, VectorField::zeros(&g), 0.0).unwrap();
        let config = SolverConfig {
            dt: 0.01,
            ..SolverConfig::default()
        };
        let err = solve(&state, &config).unwrap_err();
        assert!(matches!(err, SolveError::Cfl { t, .. } if t == 0.0));
        let config = SolverConfig {
            dt: 1e-4,
            t_end: 1e-3,
            blowup_threshold: 10.0,
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve(&state, &config).unwrap_err(),
            SolveError::Blowup { .. }
        ));
    }

    #[test]
    fn rejects_divergent_data() {
        let g = make_grid(2, 16).unwrap();
        let grad = VectorField::from_fn(&g, |x| [cos(x[0]), 0.0, 0.0]);
        assert!(matches!(
            MHDState::new(grad, VectorField::zeros(&g), 0.0).unwrap_err(),
            SolveError::NotSolenoidal(_)
        ));
    }
}
