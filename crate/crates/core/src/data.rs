//! Seeded random initial data.
//!
//! Every Fourier coefficient is a pure function of `(seed, stream, component,
//! k)`, hashed with a counter-based mixer, so output does not depend on the
//! order of generation or on the grid size: the same seed on a finer grid
//! yields the same modes plus nothing else.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::DataError;
use crate::field::{SpectralField, VectorField};
use crate::grid::TorusGrid;
use crate::lp::besov::sobolev_norm_direct;
use crate::lp::constants::FieldSampler;
use crate::spectral::leray_project;

/// Stream of the velocity field.
pub const VELOCITY_STREAM: u64 = 0;
/// Stream of the magnetic field.
pub const MAGNETIC_STREAM: u64 = 1;

/// Parameters of [`generate_data`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSpec {
    pub seed: u64,
    /// Coefficient standard deviation decays like `|k|^{-gamma}`.
    pub gamma: f64,
    /// Closed shell `k_min ≤ |k| ≤ k_max` of populated modes; `k = 0` is never populated.
    pub band: (f64, f64),
    /// Target `H^s` norm of each generated field.
    pub amplitude: f64,
    pub s: f64,
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            gamma: 6.0,
            band: (1.0, 8.0),
            amplitude: 1.0,
            s: 2.5,
        }
    }
}

impl DataSpec {
    pub fn validate(&self, grid: &TorusGrid) -> Result<(), DataError> {
        let (lo, hi) = self.band;
        if !(self.gamma > 0.0) {
            return Err(DataError::InvalidDecay(self.gamma));
        }
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(DataError::InvalidAmplitude(self.amplitude));
        }
        if !(lo >= 0.0 && hi >= lo && hi >= 1.0) {
            return Err(DataError::EmptyBand(lo, hi));
        }
        if hi > grid.dealias_cutoff() as f64 {
            return Err(DataError::BandAboveCutoff {
                k_max: hi,
                cutoff: grid.dealias_cutoff(),
            });
        }
        let populated = grid
            .k_squared()
            .iter()
            .any(|&k2| k2 > 0.0 && k2 >= lo * lo && k2 <= hi * hi);
        if !populated {
            return Err(DataError::EmptyBand(lo, hi));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based hash of a key sequence.
pub fn counter_hash(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6a09_e667_f3bc_c909, |h, &w| splitmix64(h ^ splitmix64(w)))
}

/// Uniform in `(0, 1]` from the top 53 bits.
fn unit(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard complex Gaussian (each part has variance ½) keyed by
/// `(seed, stream, component, k)`.
pub fn gaussian_coefficient(seed: u64, stream: u64, component: u64, k: [i32; 3]) -> Complex64 {
    let key = [
        seed,
        stream,
        component,
        k[0] as i64 as u64,
        k[1] as i64 as u64,
        k[2] as i64 as u64,
    ];
    let h = counter_hash(&key);
    let u1 = unit(h);
    let u2 = unit(splitmix64(h));
    let radius = libm::sqrt(-libm::log(u1));
    let angle = 2.0 * PI * u2;
    Complex64::new(radius * libm::cos(angle), radius * libm::sin(angle))
}

/// First nonzero entry positive: one of each `±k` pair.
fn is_canonical(k: &[i32; 3]) -> bool {
    k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Raw Hermitian coefficients of `components` fields in the band.
fn raw_components(
    grid: &Arc<TorusGrid>,
    spec: &DataSpec,
    stream: u64,
    components: usize,
) -> Vec<Vec<Complex64>> {
    let (lo, hi) = spec.band;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; components];
    for i in 0..grid.len() {
        let k = grid.wavenumber(i);
        let k2 = grid.k_squared()[i];
        if k2 == 0.0 || k2 < lo * lo || k2 > hi * hi || !is_canonical(&k) {
            continue;
        }
        let std = libm::pow(k2, -0.5 * spec.gamma);
        let partner = grid.conjugate_index(i);
        for (a, comp) in out.iter_mut().enumerate() {
            let z = gaussian_coefficient(spec.seed, stream, a as u64, k) * std;
            comp[i] = z;
            comp[partner] = z.conj();
        }
    }
    out
}

fn rescale(parts: Vec<SpectralField>, s: f64, amplitude: f64) -> Vec<SpectralField> {
    let norm = sobolev_norm_direct(&parts, s);
    let factor = if norm > 0.0 { amplitude / norm } else { 0.0 };
    parts.into_iter().map(|c| c.scale(factor)).collect()
}

/// Divergence-free random field on one stream, scaled to `‖·‖_{H^s} = amplitude`.
pub fn solenoidal_field(
    grid: &Arc<TorusGrid>,
    spec: &DataSpec,
    stream: u64,
) -> Result<VectorField, DataError> {
    spec.validate(grid)?;
    let raw = raw_components(grid, spec, stream, grid.dim());
    let comps: Vec<SpectralField> = raw
        .into_iter()
        .map(|c| SpectralField::from_coeffs_unchecked(grid, c))
        .collect();
    let projected = leray_project(&VectorField::from_parts(comps, false));
    let scaled = rescale(projected.into_components(), spec.s, spec.amplitude);
    Ok(VectorField::from_parts(scaled, true))
}

/// Real scalar random field on one stream, scaled to `‖·‖_{H^s} = amplitude`.
pub fn scalar_field(
    grid: &Arc<TorusGrid>,
    spec: &DataSpec,
    stream: u64,
) -> Result<SpectralField, DataError> {
    spec.validate(grid)?;
    let raw = raw_components(grid, spec, stream, 1)
        .pop()
        .expect("one component");
    let field = SpectralField::from_coeffs_unchecked(grid, raw);
    Ok(rescale(vec![field], spec.s, spec.amplitude)
        .pop()
        .expect("one component"))
}

/// Initial velocity and magnetic fields `(u0, b0)`.
pub fn generate_data(
    grid: &Arc<TorusGrid>,
    spec: &DataSpec,
) -> Result<(VectorField, VectorField), DataError> {
    Ok((
        solenoidal_field(grid, spec, VELOCITY_STREAM)?,
        solenoidal_field(grid, spec, MAGNETIC_STREAM)?,
    ))
}

/// Random-field source for inequality trials: trial `t`, slot `k` draws
/// from a stream disjoint from the initial-data streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomFields {
    pub spec: DataSpec,
    /// Raise the band's upper edge to each grid's dealiasing cutoff, so a
    /// finer grid draws more modes.
    pub fill_to_cutoff: bool,
}

impl RandomFields {
    pub fn new(spec: DataSpec) -> Self {
        Self {
            spec,
            fill_to_cutoff: false,
        }
    }

    pub fn filling(spec: DataSpec) -> Self {
        Self {
            spec,
            fill_to_cutoff: true,
        }
    }

    fn spec_for(&self, grid: &TorusGrid) -> DataSpec {
        let mut spec = self.spec;
        if self.fill_to_cutoff {
            spec.band.1 = grid.dealias_cutoff() as f64;
        }
        spec
    }

    fn stream(trial: usize, slot: usize) -> u64 {
        16 + 16 * trial as u64 + slot as u64
    }
}

impl FieldSampler for RandomFields {
    fn scalar(&self, grid: &Arc<TorusGrid>, trial: usize, slot: usize) -> SpectralField {
        scalar_field(grid, &self.spec_for(grid), Self::stream(trial, slot))
            .expect("sampler spec fits the grid")
    }

    fn solenoidal(&self, grid: &Arc<TorusGrid>, trial: usize, slot: usize) -> VectorField {
        solenoidal_field(grid, &self.spec_for(grid), Self::stream(trial, slot))
            .expect("sampler spec fits the grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn zero_amplitude_gives_zero_fields() {
        let g = make_grid(2, 32).unwrap();
        let spec = DataSpec {
            amplitude: 0.0,
            ..DataSpec::default()
        };
        let (u, b) = generate_data(&g, &spec).unwrap();
        assert_eq!(u.max_magnitude(), 0.0);
        assert_eq!(b.max_magnitude(), 0.0);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let g = make_grid(2, 32).unwrap();
        let spec = DataSpec::default();
        let (u1, b1) = generate_data(&g, &spec).unwrap();
        let (u2, b2) = generate_data(&g, &spec).unwrap();
        for (x, y) in u1
            .components()
            .iter()
            .chain(b1.components())
            .zip(u2.components().iter().chain(b2.components()))
        {
            assert!(
                x.coeffs()
                    .iter()
                    .zip(y.coeffs())
                    .all(|(p, q)| p.re.to_bits() == q.re.to_bits()
                        && p.im.to_bits() == q.im.to_bits())
            );
        }
        let other = generate_data(&g, &DataSpec { seed: 2, ..spec }).unwrap().0;
        assert!((&other - &u1).max_magnitude() > 1e-3);
    }

    #[test]
    fn fields_are_real_solenoidal_and_scaled() {
        let g = make_grid(2, 32).unwrap();
        let spec = DataSpec::default();
        let (u, _) = generate_data(&g, &spec).unwrap();
        assert!(u.is_divergence_free());
        assert!(u.divergence_ratio() < 1e-12);
        for c in u.components() {
            assert!(c.hermitian_residual() < 1e-15);
        }
        assert!((sobolev_norm_direct(&u, spec.s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resolution_independent() {
        let spec = DataSpec::default();
        let coarse = make_grid(2, 32).unwrap();
        let fine = make_grid(2, 64).unwrap();
        let (u32, _) = generate_data(&coarse, &spec).unwrap();
        let (u64, _) = generate_data(&fine, &spec).unwrap();
        for i in 0..coarse.len() {
            let k = coarse.wavenumber(i);
            if k[0].abs() == 16 || k[1].abs() == 16 {
                continue;
            }
            let j = fine.index_of(&k[..2]).unwrap();
            let (a, b) = (u32.component(0).coeffs()[i], u64.component(0).coeffs()[j]);
            assert!((a - b).norm() <= 1e-14 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let g = make_grid(2, 32).unwrap();
        let base = DataSpec::default();
        assert_eq!(
            generate_data(
                &g,
                &DataSpec {
                    band: (5.0, 4.0),
                    ..base
                }
            )
            .unwrap_err(),
            DataError::EmptyBand(5.0, 4.0)
        );
        assert_eq!(
            generate_data(
                &g,
                &DataSpec {
                    band: (1.2, 1.3),
                    ..base
                }
            )
            .unwrap_err(),
            DataError::EmptyBand(1.2, 1.3)
        );
        assert_eq!(
            generate_data(
                &g,
                &DataSpec {
                    band: (1.0, 12.0),
                    ..base
                }
            )
            .unwrap_err(),
            DataError::BandAboveCutoff {
                k_max: 12.0,
                cutoff: 10
            }
        );
        assert_eq!(
            generate_data(&g, &DataSpec { gamma: 0.0, ..base }).unwrap_err(),
            DataError::InvalidDecay(0.0)
        );
    }
}
