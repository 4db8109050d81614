mod common;

use common::*;
use mhdlab_core::lp::{
    besov_norm, commutator_block, paraproduct, paraproduct_term, remainder, BesovIndex,
    LPFilterBank,
};
use mhdlab_core::spectral::product;
use mhdlab_core::{make_grid, VectorField};
use proptest::prelude::*;

/// Besov norm from a direct DFT, the written-out block symbols, and direct
/// synthesis, summing blocks until they leave the lattice.
fn oracle_besov(f: &mhdlab_core::SpectralField, idx: &BesovIndex) -> f64 {
    let grid = f.grid();
    let spectrum = truncate(&spectrum_of(f), grid.n());
    let top = spectrum.keys().map(magnitude).fold(0.0, f64::max);
    let mut terms = Vec::new();
    let mut j = -1;
    while 0.75 * 2f64.powi(j) <= top {
        let block = apply(&spectrum, |k| block_symbol(j, magnitude(k)));
        let values = synthesize(grid, &block);
        terms.push(2f64.powf(j as f64 * idx.s) * lp_norm(&values, grid.cell_volume(), idx.p));
        j += 1;
    }
    lr_norm(&terms, idx.r)
}

#[test]
fn besov_norms_match_brute_force_on_small_lattices() {
    let indices = [
        BesovIndex::new(1.5, 2.0, 2.0).unwrap(),
        BesovIndex::new(0.5, 1.0, 1.0).unwrap(),
        BesovIndex::new(2.1, 4.0, 2.0).unwrap(),
        BesovIndex::new(-0.5, f64::INFINITY, f64::INFINITY).unwrap(),
        BesovIndex::new(1.0, 3.0, f64::INFINITY).unwrap(),
    ];
    for dim in [2, 3] {
        let g = make_grid(dim, 8).unwrap();
        let bank = LPFilterBank::new(&g).unwrap();
        for seed in 1..=3 {
            let f = random_scalar(&g, seed);
            for idx in &indices {
                let got = besov_norm(&f, idx, &bank, false).unwrap();
                let want = oracle_besov(&f, idx);
                assert!(
                    (got - want).abs() <= 1e-12 * want,
                    "d={dim} seed={seed} {idx:?}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn paraproduct_terms_live_in_the_enlarged_annulus() {
    let g = make_grid(2, 64).unwrap();
    let bank = LPFilterBank::new(&g).unwrap();
    let u = random_scalar(&g, 11);
    let v = random_scalar(&g, 12);
    for j in 1..=bank.j_max() {
        let term = paraproduct_term(&u, &v, j, &bank).unwrap();
        let scale = 2f64.powi(j);
        let peak = term.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(peak > 0.0);
        for (i, c) in term.coeffs().iter().enumerate() {
            let r = g.k_squared()[i].sqrt() / scale;
            if !(1.0 / 12.0..=10.0 / 3.0).contains(&r) {
                assert!(c.norm() <= 1e-13 * peak, "j={j} r={r} |c|={}", c.norm());
            }
        }
    }
}

#[test]
fn bony_pieces_rebuild_the_product_and_match_convolution() {
    let g = make_grid(2, 16).unwrap();
    let bank = LPFilterBank::new(&g).unwrap();
    let u = random_scalar(&g, 21);
    let v = random_scalar(&g, 22);
    let uv = product(&u, &v).unwrap();
    let oracle = convolve(&spectrum_of(&u), &spectrum_of(&v), g.n());
    assert!(spectrum_error(&uv, &oracle) < 1e-13);
    let split = &(&paraproduct(&u, &v, &bank).unwrap() + &paraproduct(&v, &u, &bank).unwrap())
        + &remainder(&u, &v, &bank).unwrap();
    assert!((&split - &uv).max_abs() < 1e-13);
}

#[test]
fn commutator_matches_convolution() {
    let g = make_grid(2, 16).unwrap();
    let bank = LPFilterBank::new(&g).unwrap();
    let v = random_vector(&g, 31);
    let f = random_scalar(&g, 32);
    let vs: Vec<Spectrum> = v.components().iter().map(spectrum_of).collect();
    let fs = spectrum_of(&f);
    for j in -1..=bank.j_max() {
        let sym = |k: &[i32; 3]| block_symbol(j, magnitude(k));
        let oracle = add(
            &advect(&vs, &apply(&fs, sym), g.n()),
            &apply(&advect(&vs, &fs, g.n()), sym),
            -1.0,
        );
        let got = commutator_block(&v, &f, j, &bank).unwrap();
        assert!(spectrum_error(&got, &oracle) < 1e-13, "j={j}");
    }
    let zero = commutator_block(&VectorField::zeros(&g), &f, 1, &bank).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn besov_norm_is_a_norm(seed in 1u64..1_000_000, alpha in -5.0f64..5.0, s in -1.0f64..3.0) {
        let g = make_grid(2, 16).unwrap();
        let bank = LPFilterBank::new(&g).unwrap();
        let idx = BesovIndex::new(s, 3.0, 2.0).unwrap();
        let f = random_scalar(&g, seed);
        let h = random_scalar(&g, seed + 1);
        let nf = besov_norm(&f, &idx, &bank, false).unwrap();
        let nh = besov_norm(&h, &idx, &bank, false).unwrap();
        let scaled = besov_norm(&f.scale(alpha), &idx, &bank, false).unwrap();
        prop_assert!((scaled - alpha.abs() * nf).abs() <= 1e-12 * nf.max(1e-300));
        let sum = besov_norm(&(&f + &h), &idx, &bank, false).unwrap();
        prop_assert!(sum <= (nf + nh) * (1.0 + 1e-12));
    }

    #[test]
    fn blocks_partition_dealiased_fields(seed in 1u64..1_000_000) {
        let g = make_grid(2, 32).unwrap();
        let bank = LPFilterBank::new(&g).unwrap();
        let f = random_scalar(&g, seed);
        let rebuilt = bank.decompose(&f, false).reconstruct();
        prop_assert!((&rebuilt - &f).max_abs() < 1e-13);
    }
}
