use alloc::vec::Vec;

use super::filter::LPFilterBank;
use crate::error::LpError;
use crate::field::{Components, SpectralField};
use crate::spectral::{lp_norm_values, pointwise_magnitude};

/// Regularity `s`, integrability `p ∈ [1, ∞]`, summation exponent `r ∈ [1, ∞]`.
/// Infinite exponents are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self, LpError> {
        if !s.is_finite() {
            return Err(LpError::InvalidIndex("s must be finite"));
        }
        if !(p >= 1.0) {
            return Err(LpError::InvalidIndex("p must lie in [1, ∞]"));
        }
        if !(r >= 1.0) {
            return Err(LpError::InvalidIndex("r must lie in [1, ∞]"));
        }
        Ok(Self { s, p, r })
    }

    /// `B^s_{2,2}`, equivalent to `H^s`.
    pub fn sobolev(s: f64) -> Self {
        Self { s, p: 2.0, r: 2.0 }
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }

    /// `d/p` with `d/∞ = 0`.
    pub fn scaling(&self, dim: usize) -> f64 {
        if self.p.is_infinite() {
            0.0
        } else {
            dim as f64 / self.p
        }
    }

    /// Well-posedness window: `s > d/p + 1` with `1 < r < ∞`, or the critical
    /// case `s = d/p + 1` with `r = 1`.
    pub fn admissible(&self, dim: usize) -> bool {
        let critical = self.scaling(dim) + 1.0;
        let supercritical = self.s > critical && self.r > 1.0 && self.r.is_finite();
        let endpoint = (self.s - critical).abs() <= 1e-12 && self.r == 1.0;
        self.p >= 1.0 && (supercritical || endpoint)
    }
}

/// `ℓ^r` norm of a finite sequence (`r = ∞` is the max).
pub fn sequence_norm(terms: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return terms.iter().fold(0.0, |m, t| m.max(t.abs()));
    }
    let peak = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    let sum: f64 = terms.iter().map(|t| libm::pow(t.abs() / peak, r)).sum();
    peak * libm::pow(sum, 1.0 / r)
}

/// `(j, ‖Δ_j f‖_{L^p})` for every block in range. Multi-component fields
/// take the pointwise Euclidean magnitude of the block components.
pub fn block_norms<F: Components + ?Sized>(
    f: &F,
    p: f64,
    bank: &LPFilterBank,
    homogeneous: bool,
) -> Result<Vec<(i32, f64)>, LpError> {
    let parts = f.parts();
    if !parts[0].same_grid_as(bank) {
        return Err(crate::error::SpectralError::GridMismatch.into());
    }
    let grid = bank.grid();
    let (lo, hi) = bank.block_range(homogeneous);
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for j in lo..=hi {
        let symbol = bank.symbol_for(j, homogeneous);
        let blocks: Vec<SpectralField> = parts.iter().map(|c| c.apply_symbol(&symbol)).collect();
        let values = if blocks.len() == 1 {
            blocks[0].values().into_owned()
        } else {
            pointwise_magnitude(&blocks)
        };
        out.push((j, lp_norm_values(&values, grid.cell_volume(), p)));
    }
    Ok(out)
}

/// `‖(2^{js} ‖Δ_j f‖_{L^p})_j‖_{ℓ^r}` over blocks `−1 … j_max`
/// (or the homogeneous range). Blocks above `j_max` carry nothing for
/// dealiased fields.
pub fn besov_norm<F: Components + ?Sized>(
    f: &F,
    idx: &BesovIndex,
    bank: &LPFilterBank,
    homogeneous: bool,
) -> Result<f64, LpError> {
    let blocks = block_norms(f, idx.p, bank, homogeneous)?;
    Ok(weighted_sequence_norm(&blocks, idx.s, idx.r))
}

pub(crate) fn weighted_sequence_norm(blocks: &[(i32, f64)], s: f64, r: f64) -> f64 {
    let terms: Vec<f64> = blocks
        .iter()
        .map(|&(j, v)| libm::exp2(j as f64 * s) * v)
        .collect();
    sequence_norm(&terms, r)
}

/// `‖f‖²_{H^s} = (2π)^d Σ_k (1 + |k|²)^s |f̂(k)|²`, summed over components.
pub fn sobolev_norm_direct<F: Components + ?Sized>(f: &F, s: f64) -> f64 {
    let parts = f.parts();
    let grid = parts[0].grid();
    let weights: Vec<f64> = grid
        .k_squared()
        .iter()
        .map(|k2| libm::pow(1.0 + k2, s))
        .collect();
    let sum: f64 = parts
        .iter()
        .map(|c| {
            c.coeffs()
                .iter()
                .zip(&weights)
                .map(|(z, w)| w * z.norm_sqr())
                .sum::<f64>()
        })
        .sum();
    libm::sqrt(sum * grid.volume())
}

impl SpectralField {
    pub(crate) fn same_grid_as(&self, bank: &LPFilterBank) -> bool {
        **self.grid() == **bank.grid()
    }
}
