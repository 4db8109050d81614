//! Integrating-factor RK4 over sets of coefficient arrays.
//!
//! Each array `x` obeys `∂_t x = −κ|k|² x + N(t, X)`; the diffusive part is
//! integrated exactly through `E(h) = exp(−κ|k|² h)` and the nonlinear part
//! with the classical four stages.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::SolveError;
use crate::grid::TorusGrid;

pub(crate) type Arrays = Vec<Vec<Complex64>>;

/// Guard quantities of the state a stage was evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Reading {
    /// Sum of the transporting speeds' grid maxima.
    pub speed: f64,
    /// `‖∇·‖_{L^∞}` summed over the evolved fields.
    pub gradient: f64,
}

pub(crate) trait SpectralSystem {
    fn grid(&self) -> &Arc<TorusGrid>;
    /// Diffusion coefficient of each array.
    fn diffusivities(&self) -> Vec<f64>;
    /// Nonlinear tendency at time `t`.
    fn nonlinear(&self, t: f64, state: &Arrays) -> Result<(Arrays, Reading), SolveError>;
    /// Clean-up after a full step (roundoff re-projection).
    fn finish(&self, _state: &mut Arrays) {}
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Limits {
    pub cfl: f64,
    pub blowup: f64,
}

struct Factors {
    h: f64,
    half: Vec<Vec<f64>>,
    full: Vec<Vec<f64>>,
}

pub(crate) struct Stepper<'a, S: SpectralSystem> {
    system: &'a S,
    kappas: Vec<f64>,
    unique: Vec<f64>,
    slot: Vec<usize>,
    cache: Vec<Factors>,
    limits: Limits,
}

fn decay(grid: &TorusGrid, kappa: f64, h: f64) -> Vec<f64> {
    grid.k_squared()
        .iter()
        .map(|k2| libm::exp(-kappa * k2 * h))
        .collect()
}

impl<'a, S: SpectralSystem> Stepper<'a, S> {
    pub fn new(system: &'a S, limits: Limits) -> Self {
        let kappas = system.diffusivities();
        let mut unique: Vec<f64> = Vec::new();
        let slot = kappas
            .iter()
            .map(|&k| match unique.iter().position(|&u| u == k) {
                Some(p) => p,
                None => {
                    unique.push(k);
                    unique.len() - 1
                }
            })
            .collect();
        Self {
            system,
            kappas,
            unique,
            slot,
            cache: Vec::new(),
            limits,
        }
    }

    fn factors(&mut self, h: f64) -> usize {
        if let Some(i) = self.cache.iter().position(|f| f.h == h) {
            return i;
        }
        let grid = self.system.grid().clone();
        let half = self
            .unique
            .iter()
            .map(|&k| decay(&grid, k, 0.5 * h))
            .collect();
        let full = self.unique.iter().map(|&k| decay(&grid, k, h)).collect();
        self.cache.push(Factors { h, half, full });
        self.cache.len() - 1
    }

    fn guard(&self, t: f64, h: f64, reading: &Reading) -> Result<(), SolveError> {
        let spacing = self.system.grid().spacing();
        let number = h * reading.speed / spacing;
        if !(number <= self.limits.cfl) {
            return Err(SolveError::Cfl { t, number });
        }
        if !(reading.gradient <= self.limits.blowup) {
            return Err(SolveError::Blowup {
                t,
                value: reading.gradient,
            });
        }
        Ok(())
    }

    /// Advances `state` from `t` to `t + h`; returns the guard reading of
    /// the state at `t`.
    pub fn step(&mut self, state: &mut Arrays, t: f64, h: f64) -> Result<Reading, SolveError> {
        let fi = self.factors(h);
        let system = self.system;
        let (a, reading) = system.nonlinear(t, state)?;
        self.guard(t, h, &reading)?;
        let f = &self.cache[fi];
        let n_arrays = self.kappas.len();
        let len = state[0].len();
        let mut stage: Arrays = alloc::vec![alloc::vec![Complex64::new(0.0, 0.0); len]; n_arrays];

        for (q, st) in stage.iter_mut().enumerate() {
            let e2 = &f.half[self.slot[q]];
            for i in 0..len {
                st[i] = (state[q][i] + a[q][i] * (0.5 * h)) * e2[i];
            }
        }
        let (b, _) = system.nonlinear(t + 0.5 * h, &stage)?;

        for (q, st) in stage.iter_mut().enumerate() {
            let e2 = &f.half[self.slot[q]];
            for i in 0..len {
                st[i] = state[q][i] * e2[i] + b[q][i] * (0.5 * h);
            }
        }
        let (c, _) = system.nonlinear(t + 0.5 * h, &stage)?;

        for (q, st) in stage.iter_mut().enumerate() {
            let e2 = &f.half[self.slot[q]];
            let e1 = &f.full[self.slot[q]];
            for i in 0..len {
                st[i] = state[q][i] * e1[i] + c[q][i] * (h * e2[i]);
            }
        }
        let (d, _) = system.nonlinear(t + h, &stage)?;

        for q in 0..n_arrays {
            let e2 = &f.half[self.slot[q]];
            let e1 = &f.full[self.slot[q]];
            let x = &mut state[q];
            for i in 0..len {
                let incr = a[q][i] * e1[i] + (b[q][i] + c[q][i]) * (2.0 * e2[i]) + d[q][i];
                x[i] = x[i] * e1[i] + incr * (h / 6.0);
            }
        }
        system.finish(state);
        Ok(reading)
    }
}

/// Step sizes covering `[0, t_end]` with steps of `dt`; the last step is
/// shortened when `t_end` is not a multiple of `dt`.
pub(crate) fn step_plan(dt: f64, t_end: f64) -> Vec<f64> {
    let ratio = t_end / dt;
    let whole = libm::round(ratio);
    if (ratio - whole).abs() <= 1e-9 * whole.max(1.0) {
        return alloc::vec![dt; whole as usize];
    }
    let full = libm::floor(ratio) as usize;
    let mut plan = alloc::vec![dt; full];
    plan.push(t_end - full as f64 * dt);
    plan
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plans_cover_the_horizon() {
        assert_eq!(step_plan(1e-3, 0.5).len(), 500);
        let p = step_plan(0.3, 1.0);
        assert_eq!(p.len(), 4);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
