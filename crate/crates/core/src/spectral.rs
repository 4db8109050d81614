//! Fourier-multiplier operators and dealiased products.
//!
//! Conventions: `∂_i` is the multiplier `i k_i` with the Nyquist entry of the
//! differentiated axis zeroed; quadratic products are formed in physical
//! space and then truncated by the 2/3 rule; `(−Δ)^{-1}` maps the mean mode
//! to zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::SpectralError;
use crate::field::{Components, SpectralField, VectorField};
use crate::grid::TorusGrid;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn derivative_coeffs(
    grid: &TorusGrid,
    coeffs: &[Complex64],
    axis: usize,
) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let k = grid.effective_wavenumber(i)[axis];
            Complex64::new(-c.im * k, c.re * k)
        })
        .collect()
}

/// In-place mode-wise `Id − k kᵀ/|k|²` on a set of `d` coefficient arrays.
pub(crate) fn leray_in_place(grid: &TorusGrid, comps: &mut [Vec<Complex64>]) {
    let dim = grid.dim();
    let k2 = grid.effective_k_squared();
    for i in 0..grid.len() {
        if k2[i] == 0.0 {
            continue;
        }
        let k = grid.effective_wavenumber(i);
        let mut dot = ZERO;
        for a in 0..dim {
            dot += comps[a][i] * k[a];
        }
        let dot = dot / k2[i];
        for a in 0..dim {
            comps[a][i] -= dot * k[a];
        }
    }
}

pub(crate) fn dealias_in_place(grid: &TorusGrid, coeffs: &mut [Complex64]) {
    for (c, &keep) in coeffs.iter_mut().zip(grid.kept_mask()) {
        if !keep {
            *c = ZERO;
        }
    }
}

/// Physical samples to dealiased coefficients.
pub(crate) fn forward_dealiased(grid: &TorusGrid, values: &[f64]) -> Vec<Complex64> {
    let mut coeffs = grid.fft().forward_real(values);
    dealias_in_place(grid, &mut coeffs);
    coeffs
}

/// Physical samples of `∂_a f` for every axis.
pub(crate) fn gradient_values(f: &SpectralField) -> Vec<Vec<f64>> {
    let grid = f.grid();
    (0..grid.dim())
        .map(|axis| {
            grid.fft()
                .inverse_real(&derivative_coeffs(grid, f.coeffs(), axis))
        })
        .collect()
}

/// `Σ_a v_a ∂_a f` in physical space, given samples of `v` and of `∇f`.
pub(crate) fn advective_product(velocity: &[Vec<f64>], gradient: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; velocity[0].len()];
    for (v, g) in velocity.iter().zip(gradient) {
        for ((o, &a), &b) in out.iter_mut().zip(v).zip(g) {
            *o += a * b;
        }
    }
    out
}

pub(crate) fn lp_norm_values(values: &[f64], cell_volume: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    // scaled by the peak so that large p cannot overflow
    let sum: f64 = if p == 2.0 {
        values.iter().map(|v| (v / peak) * (v / peak)).sum()
    } else if p == 1.0 {
        values.iter().map(|v| v.abs() / peak).sum()
    } else {
        values.iter().map(|v| libm::pow(v.abs() / peak, p)).sum()
    };
    peak * libm::pow(sum * cell_volume, 1.0 / p)
}

/// `∂_axis f` as the multiplier `i k_axis`; the Nyquist entry of that axis
/// contributes nothing.
pub fn derivative(f: &SpectralField, axis: usize) -> Result<SpectralField, SpectralError> {
    let grid = f.grid();
    if axis >= grid.dim() {
        return Err(SpectralError::AxisOutOfRange {
            axis,
            dim: grid.dim(),
        });
    }
    Ok(SpectralField::from_coeffs_unchecked(
        grid,
        derivative_coeffs(grid, f.coeffs(), axis),
    ))
}

/// `∇f` as a (not divergence-free) vector field.
pub fn gradient(f: &SpectralField) -> VectorField {
    let grid = f.grid();
    let comps = (0..grid.dim())
        .map(|axis| {
            SpectralField::from_coeffs_unchecked(grid, derivative_coeffs(grid, f.coeffs(), axis))
        })
        .collect();
    VectorField::from_parts(comps, false)
}

/// `Δf` with symbol `−|k|²`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let k2 = f.grid().k_squared();
    f.map_modes(|i, c| c * -k2[i])
}

/// Orthogonal projection onto divergence-free fields, mode-wise
/// `Id − k kᵀ/|k|²`; the mean mode passes through.
pub fn leray_project(v: &VectorField) -> VectorField {
    let grid = v.grid().clone();
    let mut comps: Vec<Vec<Complex64>> =
        v.components().iter().map(|c| c.coeffs().to_vec()).collect();
    leray_in_place(&grid, &mut comps);
    let comps = comps
        .into_iter()
        .map(|c| SpectralField::from_coeffs_unchecked(&grid, c))
        .collect();
    VectorField::from_parts(comps, true)
}

/// Pointwise product of two scalar fields, dealiased.
pub fn product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField, SpectralError> {
    if !a.same_grid(b) {
        return Err(SpectralError::GridMismatch);
    }
    let grid = a.grid();
    let values: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values().iter())
        .map(|(x, y)| x * y)
        .collect();
    Ok(SpectralField::from_coeffs_unchecked(
        grid,
        forward_dealiased(grid, &values),
    ))
}

/// Targets of the advection operator `v · ∇(·)`.
pub trait Advect: Sized {
    fn advected_by(&self, v: &VectorField) -> Result<Self, SpectralError>;
}

impl Advect for SpectralField {
    fn advected_by(&self, v: &VectorField) -> Result<Self, SpectralError> {
        if !v.component(0).same_grid(self) {
            return Err(SpectralError::GridMismatch);
        }
        let grid = self.grid();
        let velocity: Vec<Vec<f64>> = v
            .components()
            .iter()
            .map(|c| c.values().into_owned())
            .collect();
        let product = advective_product(&velocity, &gradient_values(self));
        Ok(SpectralField::from_coeffs_unchecked(
            grid,
            forward_dealiased(grid, &product),
        ))
    }
}

impl Advect for VectorField {
    fn advected_by(&self, v: &VectorField) -> Result<Self, SpectralError> {
        if !v.same_grid(self) {
            return Err(SpectralError::GridMismatch);
        }
        let grid = self.grid();
        let velocity: Vec<Vec<f64>> = v
            .components()
            .iter()
            .map(|c| c.values().into_owned())
            .collect();
        let comps = self
            .components()
            .iter()
            .map(|c| {
                let product = advective_product(&velocity, &gradient_values(c));
                SpectralField::from_coeffs_unchecked(grid, forward_dealiased(grid, &product))
            })
            .collect();
        Ok(VectorField::from_parts(comps, false))
    }
}

/// Dealiased `v · ∇f` for a scalar or vector `f`.
pub fn advect<F: Advect>(v: &VectorField, f: &F) -> Result<F, SpectralError> {
    f.advected_by(v)
}

/// `∇(−Δ)^{-1} div(u · ∇w)`, mode-wise `−k kᵀ/|k|²` applied to the
/// dealiased spectrum of `u · ∇w`.
pub fn pressure_gradient(u: &VectorField, w: &VectorField) -> Result<VectorField, SpectralError> {
    let q = advect(u, w)?;
    let grid = u.grid().clone();
    let dim = grid.dim();
    let k2 = grid.effective_k_squared();
    let mut out: Vec<Vec<Complex64>> = vec![vec![ZERO; grid.len()]; dim];
    for i in 0..grid.len() {
        if k2[i] == 0.0 {
            continue;
        }
        let k = grid.effective_wavenumber(i);
        let mut dot = ZERO;
        for a in 0..dim {
            dot += q.component(a).coeffs()[i] * k[a];
        }
        let dot = dot / k2[i];
        for a in 0..dim {
            out[a][i] = -dot * k[a];
        }
    }
    let comps = out
        .into_iter()
        .map(|c| SpectralField::from_coeffs_unchecked(&grid, c))
        .collect();
    Ok(VectorField::from_parts(comps, false))
}

/// `(Σ |f(x)|^p Δx)^{1/p}` over grid points, `Δx = (2π/n)^d`; `p = ∞` is
/// the grid maximum.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64, SpectralError> {
    norm_of(f, p)
}

/// L^p norm of the pointwise Euclidean magnitude of a multi-component field.
pub fn norm_of<F: Components + ?Sized>(f: &F, p: f64) -> Result<f64, SpectralError> {
    if !(p >= 1.0) {
        return Err(SpectralError::InvalidExponent(p));
    }
    let parts = f.parts();
    let grid = parts[0].grid();
    let values = if parts.len() == 1 {
        parts[0].values().into_owned()
    } else {
        pointwise_magnitude(parts)
    };
    Ok(lp_norm_values(&values, grid.cell_volume(), p))
}

pub(crate) fn pointwise_magnitude(parts: &[SpectralField]) -> Vec<f64> {
    let mut out = vec![0.0; parts[0].grid().len()];
    for comp in parts {
        for (o, v) in out.iter_mut().zip(comp.values().iter()) {
            *o += v * v;
        }
    }
    out.iter_mut().for_each(|o| *o = libm::sqrt(*o));
    out
}

/// `‖∇f‖_{L^∞}` with the pointwise Frobenius norm over all components.
pub fn gradient_sup<F: Components + ?Sized>(f: &F) -> f64 {
    let parts = f.parts();
    let mut sq = vec![0.0; parts[0].grid().len()];
    for comp in parts {
        for g in gradient_values(comp) {
            for (s, v) in sq.iter_mut().zip(g) {
                *s += v * v;
            }
        }
    }
    libm::sqrt(sq.into_iter().fold(0.0, f64::max))
}
