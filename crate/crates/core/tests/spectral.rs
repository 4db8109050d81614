mod common;

use common::*;
use mhdlab_core::data::{solenoidal_field, DataSpec};
use mhdlab_core::spectral::{advect, leray_project, pressure_gradient};
use mhdlab_core::{make_grid, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn advection_matches_convolution() {
    for dim in [2, 3] {
        let n = if dim == 2 { 16 } else { 8 };
        let g = make_grid(dim, n).unwrap();
        let v = random_vector(&g, 5);
        let f = random_scalar(&g, 6);
        let vs: Vec<Spectrum> = v.components().iter().map(spectrum_of).collect();
        let oracle = common::advect(&vs, &spectrum_of(&f), n);
        let got: SpectralField = mhdlab_core::spectral::advect(&v, &f).unwrap();
        assert!(spectrum_error(&got, &oracle) < 1e-13, "d={dim}");
    }
}

#[test]
fn pressure_gradient_matches_convolution() {
    let g = make_grid(2, 16).unwrap();
    let u = random_vector(&g, 7);
    let w = random_vector(&g, 8);
    let us: Vec<Spectrum> = u.components().iter().map(spectrum_of).collect();
    let q: Vec<Spectrum> = w
        .components()
        .iter()
        .map(|c| common::advect(&us, &spectrum_of(c), g.n()))
        .collect();
    let got = pressure_gradient(&u, &w).unwrap();
    for axis in 0..2 {
        let mut oracle = Spectrum::new();
        for k in q[0].keys() {
            let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
            if k2 == 0.0 {
                continue;
            }
            let kq: Complex64 = (0..2).map(|l| q[l][k] * k[l] as f64).sum();
            oracle.insert(*k, -kq * (k[axis] as f64 / k2));
        }
        assert!(spectrum_error(got.component(axis), &oracle) < 1e-13);
    }
    let sum = &advect(&u, &w).unwrap() + &got;
    assert!(sum.divergence().max_abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leray_is_an_idempotent_orthogonal_projection(seed in 1u64..1_000_000) {
        let g = make_grid(2, 16).unwrap();
        let v = random_vector(&g, seed);
        let p = leray_project(&v);
        prop_assert!(p.divergence().max_abs() < 1e-12);
        prop_assert!((&leray_project(&p) - &p).max_abs_components() < 1e-14);
        let rest = &v - &p;
        prop_assert!(rest.inner(&p).abs() < 1e-12 * v.inner(&v));
    }

    #[test]
    fn advection_of_solenoidal_fields_is_skew(seed in 1u64..1_000_000) {
        let g = make_grid(2, 32).unwrap();
        let spec = DataSpec { seed, ..DataSpec::default() };
        let v = solenoidal_field(&g, &spec, 0).unwrap();
        let f = random_scalar(&g, seed);
        let vf: SpectralField = advect(&v, &f).unwrap();
        prop_assert!(vf.inner(&f).abs() < 1e-12 * f.inner(&f).max(1e-300));
    }
}

trait MaxAbs {
    fn max_abs_components(&self) -> f64;
}

impl MaxAbs for mhdlab_core::VectorField {
    fn max_abs_components(&self) -> f64 {
        self.components()
            .iter()
            .map(SpectralField::max_abs)
            .fold(0.0, f64::max)
    }
}
