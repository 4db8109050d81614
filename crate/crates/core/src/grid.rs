//! Uniform discretization of the torus `[0, 2π)^d`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::SpectralError;
use crate::fft::FftNd;

/// Uniform grid on `[0, 2π)^d` with `n` points per axis and the matching
/// integer wavenumber lattice `{-n/2+1, …, n/2}^d`.
///
/// Storage is row-major with axis 0 slowest; the same flat index addresses a
/// physical point and a Fourier mode.
#[derive(Debug)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    len: usize,
    axis_wavenumbers: Vec<i32>,
    wavenumbers: Vec<[i32; 3]>,
    k2: Vec<f64>,
    effective: Vec<[f64; 3]>,
    effective_k2: Vec<f64>,
    kept: Vec<bool>,
    fft: FftNd,
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n
    }
}

/// Builds a shared grid; `d ∈ {2, 3}`, `n` a power of two no smaller than 8.
pub fn make_grid(d: usize, n: usize) -> Result<Arc<TorusGrid>, SpectralError> {
    TorusGrid::new(d, n).map(Arc::new)
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self, SpectralError> {
        if !(2..=3).contains(&dim) {
            return Err(SpectralError::UnsupportedDimension(dim));
        }
        if !n.is_power_of_two() {
            return Err(SpectralError::NotPowerOfTwo(n));
        }
        if n < 8 {
            return Err(SpectralError::GridTooSmall(n));
        }
        let half = (n / 2) as i32;
        let axis_wavenumbers: Vec<i32> = (0..n as i32)
            .map(|i| if i <= half { i } else { i - n as i32 })
            .collect();
        let len = n.pow(dim as u32);
        let cutoff = (n / 3) as i32;
        let mut wavenumbers = Vec::with_capacity(len);
        let mut k2 = Vec::with_capacity(len);
        let mut kept = Vec::with_capacity(len);
        let mut effective = Vec::with_capacity(len);
        let mut effective_k2 = Vec::with_capacity(len);
        for flat in 0..len {
            let mut k = [0i32; 3];
            let mut rest = flat;
            for axis in (0..dim).rev() {
                k[axis] = axis_wavenumbers[rest % n];
                rest /= n;
            }
            let sq: i64 = k.iter().map(|&c| (c as i64) * (c as i64)).sum();
            let mut keff = [0.0f64; 3];
            for axis in 0..dim {
                if k[axis] != half {
                    keff[axis] = k[axis] as f64;
                }
            }
            effective_k2.push(keff.iter().map(|c| c * c).sum());
            effective.push(keff);
            wavenumbers.push(k);
            k2.push(sq as f64);
            kept.push(k.iter().all(|c| c.abs() <= cutoff));
        }
        Ok(Self {
            dim,
            n,
            len,
            axis_wavenumbers,
            wavenumbers,
            k2,
            effective,
            effective_k2,
            kept,
            fft: FftNd::new(dim, n),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points (and Fourier modes).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Volume element `(2π/n)^d`.
    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.spacing(), self.dim as f64)
    }

    /// `(2π)^d`, the measure of the torus.
    pub fn volume(&self) -> f64 {
        libm::pow(2.0 * PI, self.dim as f64)
    }

    /// Wavenumbers along one axis, indexed by the axis position.
    pub fn axis_wavenumbers(&self) -> &[i32] {
        &self.axis_wavenumbers
    }

    /// Wavenumber vector of a flat mode index (unused trailing slots are 0).
    pub fn wavenumber(&self, index: usize) -> [i32; 3] {
        self.wavenumbers[index]
    }

    pub fn wavenumbers(&self) -> &[[i32; 3]] {
        &self.wavenumbers
    }

    /// `|k|^2` for every mode.
    pub fn k_squared(&self) -> &[f64] {
        &self.k2
    }

    /// Wavenumber used by odd (first-derivative) symbols: the Nyquist entry
    /// `k_i = n/2` is replaced by 0 so that odd multipliers keep fields real.
    pub fn effective_wavenumber(&self, index: usize) -> &[f64; 3] {
        &self.effective[index]
    }

    /// `|k|^2` of [`effective_wavenumber`](Self::effective_wavenumber).
    pub fn effective_k_squared(&self) -> &[f64] {
        &self.effective_k2
    }

    /// Largest retained `|k_i|` under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// True when the mode survives 2/3-rule dealiasing.
    pub fn is_kept(&self, index: usize) -> bool {
        self.kept[index]
    }

    pub fn kept_mask(&self) -> &[bool] {
        &self.kept
    }

    /// Largest `|k|` over the dealiased lattice.
    pub fn max_kept_magnitude(&self) -> f64 {
        let max_k2 = self
            .k2
            .iter()
            .zip(&self.kept)
            .filter(|(_, &keep)| keep)
            .fold(0.0f64, |acc, (&k2, _)| acc.max(k2));
        libm::sqrt(max_k2)
    }

    /// True when `k_axis` sits on the Nyquist wavenumber `n/2`.
    pub fn is_nyquist(&self, index: usize, axis: usize) -> bool {
        self.wavenumbers[index][axis] == (self.n / 2) as i32
    }

    /// Flat index of the mode `-k` (the Hermitian partner slot).
    pub fn conjugate_index(&self, index: usize) -> usize {
        let mut out = 0;
        let mut rest = index;
        let mut place = 1;
        for _ in 0..self.dim {
            let i = rest % self.n;
            rest /= self.n;
            out += ((self.n - i) % self.n) * place;
            place *= self.n;
        }
        out
    }

    /// Flat index of a wavenumber vector, if it lies on the lattice.
    pub fn index_of(&self, k: &[i32]) -> Option<usize> {
        let half = (self.n / 2) as i32;
        let mut index = 0;
        for &c in k.iter().take(self.dim) {
            if c <= -half || c > half {
                return None;
            }
            let slot = if c < 0 { c + self.n as i32 } else { c } as usize;
            index = index * self.n + slot;
        }
        Some(index)
    }

    /// Physical coordinates of a flat point index.
    pub fn point(&self, index: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let mut rest = index;
        for axis in (0..self.dim).rev() {
            x[axis] = (rest % self.n) as f64 * self.spacing();
            rest /= self.n;
        }
        x
    }

    pub(crate) fn fft(&self) -> &FftNd {
        &self.fft
    }
}
