//! Brute-force oracles: naive DFTs, direct convolutions, and the radial
//! cut-off written out from its definition.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use mhdlab_core::{SpectralField, TorusGrid, VectorField};
use num_complex::Complex64;

pub type Spectrum = BTreeMap<[i32; 3], Complex64>;

/// All lattice wavenumbers `k_i ∈ [−n/2, n/2)` of the grid.
pub fn lattice(grid: &TorusGrid) -> Vec<[i32; 3]> {
    let n = grid.n() as i32;
    let axis: Vec<i32> = (-n / 2..n / 2).collect();
    let mut out = Vec::new();
    for &a in &axis {
        for &b in &axis {
            if grid.dim() == 2 {
                out.push([a, b, 0]);
            } else {
                for &c in &axis {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn phase(k: &[i32; 3], x: &[f64; 3]) -> f64 {
    k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]
}

/// `f̂(k) = N⁻¹ Σ_x f(x) e^{−ik·x}` by direct summation.
pub fn dft(grid: &TorusGrid, values: &[f64]) -> Spectrum {
    let points: Vec<[f64; 3]> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let inv = 1.0 / grid.len() as f64;
    lattice(grid)
        .into_iter()
        .map(|k| {
            let sum: Complex64 = points
                .iter()
                .zip(values)
                .map(|(x, v)| Complex64::from_polar(*v, -phase(&k, x)))
                .sum();
            (k, sum * inv)
        })
        .collect()
}

/// `Re Σ_k ĉ(k) e^{ik·x}` at every grid point.
pub fn synthesize(grid: &TorusGrid, spectrum: &Spectrum) -> Vec<f64> {
    (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            spectrum
                .iter()
                .map(|(k, c)| (c * Complex64::from_polar(1.0, phase(k, &x))).re)
                .sum()
        })
        .collect()
}

pub fn kept(k: &[i32; 3], n: usize) -> bool {
    k.iter().all(|c| 3 * c.unsigned_abs() as usize <= n)
}

/// Modes with every `|k_i| ≤ n/3`.
pub fn truncate(spectrum: &Spectrum, n: usize) -> Spectrum {
    spectrum
        .iter()
        .filter(|(k, _)| kept(k, n))
        .map(|(k, c)| (*k, *c))
        .collect()
}

/// Full (unwrapped) convolution restricted to the kept modes.
pub fn convolve(a: &Spectrum, b: &Spectrum, n: usize) -> Spectrum {
    let mut out = Spectrum::new();
    for (p, x) in a {
        if x.norm_sqr() == 0.0 {
            continue;
        }
        for (q, y) in b {
            let k = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            if kept(&k, n) {
                *out.entry(k).or_default() += x * y;
            }
        }
    }
    out
}

pub fn add(a: &Spectrum, b: &Spectrum, alpha: f64) -> Spectrum {
    let mut out = a.clone();
    for (k, c) in b {
        *out.entry(*k).or_default() += c * alpha;
    }
    out
}

/// `(i k_axis) ĉ(k)`.
pub fn derivative(a: &Spectrum, axis: usize) -> Spectrum {
    a.iter()
        .map(|(k, c)| (*k, c * Complex64::new(0.0, k[axis] as f64)))
        .collect()
}

/// `Σ_i v_i ∂_i f` by convolution.
pub fn advect(v: &[Spectrum], f: &Spectrum, n: usize) -> Spectrum {
    let mut out = Spectrum::new();
    for (axis, vi) in v.iter().enumerate() {
        out = add(&out, &convolve(vi, &derivative(f, axis), n), 1.0);
    }
    out
}

pub fn magnitude(k: &[i32; 3]) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}

/// Radial cut-off: 1 on `|ξ| ≤ 3/4`, 0 on `|ξ| ≥ 4/3`, and in between
/// `g((4/3 − r)/(4/3 − 3/4))` with `g(t) = e^{−1/t} / (e^{−1/t} + e^{−1/(1−t)})`.
pub fn chi(r: f64) -> f64 {
    if r <= 0.75 {
        return 1.0;
    }
    if r >= 4.0 / 3.0 {
        return 0.0;
    }
    let t = (4.0 / 3.0 - r) / (4.0 / 3.0 - 0.75);
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Symbol of the nonhomogeneous block `Δ_j` at radius `r`.
pub fn block_symbol(j: i32, r: f64) -> f64 {
    match j {
        j if j < -1 => 0.0,
        -1 => chi(r),
        j => {
            let s = 2f64.powi(-j);
            chi(0.5 * s * r) - chi(s * r)
        }
    }
}

pub fn apply(spectrum: &Spectrum, symbol: impl Fn(&[i32; 3]) -> f64) -> Spectrum {
    spectrum.iter().map(|(k, c)| (*k, c * symbol(k))).collect()
}

/// Deterministic pseudo-random samples in `[−1, 1)` (xorshift64*).
pub fn noise(len: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..len)
        .map(|_| {
            s ^= s >> 12;
            s ^= s << 25;
            s ^= s >> 27;
            let r = s.wrapping_mul(0x2545_F491_4F6C_DD1D);
            (r >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect()
}

/// Dealiased random scalar field.
pub fn random_scalar(grid: &Arc<TorusGrid>, seed: u64) -> SpectralField {
    SpectralField::from_values(grid, noise(grid.len(), seed))
        .unwrap()
        .dealiased()
}

/// Dealiased random vector field (not divergence-free).
pub fn random_vector(grid: &Arc<TorusGrid>, seed: u64) -> VectorField {
    let comps = (0..grid.dim())
        .map(|c| random_scalar(grid, seed * 31 + c as u64))
        .collect();
    VectorField::new(comps).unwrap()
}

pub fn spectrum_of(f: &SpectralField) -> Spectrum {
    dft(f.grid(), &f.values())
}

/// Largest deviation between a field's coefficients and an oracle spectrum
/// (missing oracle entries count as zero).
pub fn spectrum_error(f: &SpectralField, oracle: &Spectrum) -> f64 {
    let grid = f.grid();
    (0..grid.len())
        .map(|i| {
            let mut k = grid.wavenumber(i);
            let n = grid.n() as i32;
            for c in k.iter_mut().take(grid.dim()) {
                if *c == n / 2 {
                    *c = -n / 2;
                }
            }
            let expected = oracle.get(&k).copied().unwrap_or_default();
            (f.coeffs()[i] - expected).norm()
        })
        .fold(0.0, f64::max)
}

pub fn lp_norm(values: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
}

pub fn lr_norm(terms: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return terms.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    terms
        .iter()
        .map(|v| v.abs().powf(r))
        .sum::<f64>()
        .powf(1.0 / r)
}
