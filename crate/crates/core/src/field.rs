//! Scalar and vector fields on a [`TorusGrid`].

use alloc::borrow::Cow;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::SpectralError;
use crate::grid::TorusGrid;
use num_complex::Complex64;

/// Relative spectral-divergence tolerance behind the divergence-free flag.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// A real scalar field held by its Fourier coefficients, with the physical
/// samples cached once they have been computed.
///
/// Coefficients are always current. `values` is `Some` only when the cached
/// samples match the coefficients.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<TorusGrid>,
    coeffs: Vec<Complex64>,
    values: Option<Vec<f64>>,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
            values: Some(vec![0.0; grid.len()]),
        }
    }

    pub fn constant(grid: &Arc<TorusGrid>, value: f64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        coeffs[0] = Complex64::new(value, 0.0);
        Self {
            grid: grid.clone(),
            coeffs,
            values: Some(vec![value; grid.len()]),
        }
    }

    pub fn from_values(grid: &Arc<TorusGrid>, values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let coeffs = grid.fft().forward_real(&values);
        Ok(Self {
            grid: grid.clone(),
            coeffs,
            values: Some(values),
        })
    }

    /// Samples `f` at every grid point (coordinates are padded to length 3).
    pub fn from_fn(grid: &Arc<TorusGrid>, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::from_values(grid, values).expect("length matches grid")
    }

    /// Wraps coefficients; the caller is responsible for Hermitian symmetry.
    pub fn from_coeffs(
        grid: &Arc<TorusGrid>,
        coeffs: Vec<Complex64>,
    ) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
            values: None,
        })
    }

    pub(crate) fn from_coeffs_unchecked(grid: &Arc<TorusGrid>, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self {
            grid: grid.clone(),
            coeffs,
            values: None,
        }
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Physical samples, borrowed from the cache when synced.
    pub fn values(&self) -> Cow<'_, [f64]> {
        match &self.values {
            Some(v) => Cow::Borrowed(v.as_slice()),
            None => Cow::Owned(self.grid.fft().inverse_real(&self.coeffs)),
        }
    }

    /// Fills the physical cache.
    pub fn synced(mut self) -> Self {
        if self.values.is_none() {
            self.values = Some(self.grid.fft().inverse_real(&self.coeffs));
        }
        self
    }

    pub fn is_synced(&self) -> bool {
        self.values.is_some()
    }

    pub fn same_grid(&self, other: &SpectralField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// New field with coefficients `f(index, ĉ)`.
    pub fn map_modes(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(i, c))
            .collect();
        Self::from_coeffs_unchecked(&self.grid, coeffs)
    }

    /// Multiplies each coefficient by a real symbol evaluated on the mode.
    pub fn apply_symbol(&self, symbol: &[f64]) -> Self {
        debug_assert_eq!(symbol.len(), self.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(symbol)
            .map(|(&c, &m)| c * m)
            .collect();
        Self::from_coeffs_unchecked(&self.grid, coeffs)
    }

    /// Zeroes every mode with some `|k_i| > n/3`.
    pub fn dealiased(&self) -> Self {
        let grid = &self.grid;
        self.map_modes(|i, c| {
            if grid.is_kept(i) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * alpha).collect(),
            values: self
                .values
                .as_ref()
                .map(|v| v.iter().map(|&x| x * alpha).collect()),
        }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &SpectralField) -> Result<Self, SpectralError> {
        if !self.same_grid(other) {
            return Err(SpectralError::GridMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a + b * alpha)
            .collect();
        Ok(Self::from_coeffs_unchecked(&self.grid, coeffs))
    }

    /// Largest deviation from `ĉ(-k) = conj(ĉ(k))` over the lattice.
    pub fn hermitian_residual(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| {
                let j = self.grid.conjugate_index(i);
                (self.coeffs[i] - self.coeffs[j].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `⟨f, g⟩ = ∫ f g dx`, evaluated through Parseval.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        sum * self.grid.volume()
    }

    /// `‖f‖_{L²}` from the coefficients.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        libm::sqrt(sum * self.grid.volume())
    }

    /// Grid maximum of `|f|`.
    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Mean over the torus (the `k = 0` coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs).expect("fields on different grids")
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs).expect("fields on different grids")
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;

    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

/// `d` scalar components on one grid plus a divergence-free certificate.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<SpectralField>,
    divergence_free: bool,
}

impl VectorField {
    pub fn new(components: Vec<SpectralField>) -> Result<Self, SpectralError> {
        let first = components.first().ok_or(SpectralError::ComponentCount {
            expected: 2,
            found: 0,
        })?;
        let dim = first.grid().dim();
        if components.len() != dim {
            return Err(SpectralError::ComponentCount {
                expected: dim,
                found: components.len(),
            });
        }
        if components.iter().any(|c| !c.same_grid(first)) {
            return Err(SpectralError::GridMismatch);
        }
        Ok(Self {
            components,
            divergence_free: false,
        })
    }

    pub(crate) fn from_parts(components: Vec<SpectralField>, divergence_free: bool) -> Self {
        Self {
            components,
            divergence_free,
        }
    }

    pub fn zeros(grid: &Arc<TorusGrid>) -> Self {
        Self {
            components: (0..grid.dim())
                .map(|_| SpectralField::zeros(grid))
                .collect(),
            divergence_free: true,
        }
    }

    /// Samples a vector-valued function; only the first `d` entries are used.
    pub fn from_fn(grid: &Arc<TorusGrid>, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> Self {
        let points: Vec<[f64; 3]> = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        let components = (0..grid.dim())
            .map(|c| {
                SpectralField::from_values(grid, points.iter().map(|p| p[c]).collect())
                    .expect("length matches grid")
            })
            .collect();
        Self {
            components,
            divergence_free: false,
        }
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &SpectralField {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<SpectralField> {
        self.components
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub fn same_grid(&self, other: &VectorField) -> bool {
        self.components[0].same_grid(&other.components[0])
    }

    /// Spectral divergence `Σ_i i k_i v̂_i`.
    pub fn divergence(&self) -> SpectralField {
        let grid = self.grid().clone();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (axis, comp) in self.components.iter().enumerate() {
            for (i, (out, &c)) in coeffs.iter_mut().zip(comp.coeffs()).enumerate() {
                if grid.is_nyquist(i, axis) {
                    continue;
                }
                let k = grid.wavenumber(i)[axis] as f64;
                *out += Complex64::new(0.0, k) * c;
            }
        }
        SpectralField::from_coeffs_unchecked(&grid, coeffs)
    }

    /// Grid maximum of `|div v|` over grid maximum of `|v|` (0 for the zero field).
    pub fn divergence_ratio(&self) -> f64 {
        let scale = self.max_magnitude();
        if scale == 0.0 {
            return 0.0;
        }
        self.divergence().max_abs() / scale
    }

    /// Sets the divergence-free flag after checking it numerically; returns
    /// the measured ratio on failure.
    pub fn certify(mut self) -> Result<Self, f64> {
        let ratio = self.divergence_ratio();
        if ratio <= DIVERGENCE_TOLERANCE {
            self.divergence_free = true;
            Ok(self)
        } else {
            Err(ratio)
        }
    }

    pub fn synced(self) -> Self {
        Self {
            components: self
                .components
                .into_iter()
                .map(SpectralField::synced)
                .collect(),
            divergence_free: self.divergence_free,
        }
    }

    /// Pointwise Euclidean magnitude at each grid point.
    pub fn magnitude_values(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid().len()];
        for comp in &self.components {
            for (o, v) in out.iter_mut().zip(comp.values().iter()) {
                *o += v * v;
            }
        }
        out.iter_mut().for_each(|o| *o = libm::sqrt(*o));
        out
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude_values().into_iter().fold(0.0, f64::max)
    }

    pub fn map_components(
        &self,
        f: impl Fn(&SpectralField) -> SpectralField,
        keeps_divergence: bool,
    ) -> Self {
        Self {
            components: self.components.iter().map(f).collect(),
            divergence_free: self.divergence_free && keeps_divergence,
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map_components(|c| c.scale(alpha), true)
    }

    pub fn dealiased(&self) -> Self {
        self.map_components(SpectralField::dealiased, true)
    }

    /// `self + alpha * other`; stays certified when both inputs are.
    pub fn axpy(&self, alpha: f64, other: &VectorField) -> Result<Self, SpectralError> {
        if !self.same_grid(other) {
            return Err(SpectralError::GridMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.axpy(alpha, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            components,
            divergence_free: self.divergence_free && other.divergence_free,
        })
    }

    /// `∫ v · w dx`.
    pub fn inner(&self, other: &VectorField) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.inner(self).max(0.0))
    }
}

impl Add for &VectorField {
    type Output = VectorField;

    fn add(self, rhs: &VectorField) -> VectorField {
        self.axpy(1.0, rhs).expect("fields on different grids")
    }
}

impl Sub for &VectorField {
    type Output = VectorField;

    fn sub(self, rhs: &VectorField) -> VectorField {
        self.axpy(-1.0, rhs).expect("fields on different grids")
    }
}

impl Mul<f64> for &VectorField {
    type Output = VectorField;

    fn mul(self, rhs: f64) -> VectorField {
        self.scale(rhs)
    }
}

/// Anything made of scalar components on a common grid. Norms treat a
/// vector field through the pointwise Euclidean combination of components.
pub trait Components {
    fn parts(&self) -> &[SpectralField];

    fn grid(&self) -> &Arc<TorusGrid> {
        self.parts()[0].grid()
    }
}

impl Components for SpectralField {
    fn parts(&self) -> &[SpectralField] {
        core::slice::from_ref(self)
    }
}

impl Components for VectorField {
    fn parts(&self) -> &[SpectralField] {
        &self.components
    }
}

impl Components for [SpectralField] {
    fn parts(&self) -> &[SpectralField] {
        self
    }
}

impl Components for Vec<SpectralField> {
    fn parts(&self) -> &[SpectralField] {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn round_trip_is_tight() {
        let g = make_grid(2, 32).unwrap();
        let f = SpectralField::from_fn(&g, |x| libm::exp(libm::sin(x[0]) * libm::cos(2.0 * x[1])));
        let back = SpectralField::from_coeffs(&g, f.coeffs().to_vec()).unwrap();
        let (a, b) = (f.values(), back.values());
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = a
            .iter()
            .zip(b.iter())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err <= 1e-12 * scale, "round trip error {err}");
        assert!(f.hermitian_residual() < 1e-15);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = make_grid(2, 16).unwrap();
        let f =
            SpectralField::from_fn(&g, |x| libm::cos(x[0]) + 0.5 * libm::sin(3.0 * x[1] - x[0]));
        let quad: f64 = f.values().iter().map(|v| v * v).sum::<f64>() * g.cell_volume();
        assert!((quad.sqrt() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn certificate_rejects_gradients() {
        let g = make_grid(2, 16).unwrap();
        let grad = VectorField::from_fn(&g, |x| [libm::cos(x[0]), 0.0, 0.0]);
        assert!(grad.certify().is_err());
        let rot = VectorField::from_fn(&g, |x| [libm::sin(x[1]), libm::cos(x[0]), 0.0]);
        assert!(rot.certify().unwrap().is_divergence_free());
    }

    #[test]
    fn component_count_checked() {
        let g = make_grid(3, 8).unwrap();
        let err = VectorField::new(vec![SpectralField::zeros(&g)]).unwrap_err();
        assert_eq!(
            err,
            SpectralError::ComponentCount {
                expected: 3,
                found: 1
            }
        );
    }
}
