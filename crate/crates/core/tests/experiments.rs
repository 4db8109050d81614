use std::sync::Arc;

use mhdlab_core::data::{generate_data, solenoidal_field, DataSpec};
use mhdlab_core::exec::Sequential;
use mhdlab_core::experiments::*;
use mhdlab_core::lp::{BesovIndex, LPFilterBank};
use mhdlab_core::solver::{solve, MHDState, SolverConfig, Source, Trajectory};
use mhdlab_core::{make_grid, ExperimentError, SpectralField, TorusGrid, VectorField};
use proptest::prelude::*;

fn data(grid: &Arc<TorusGrid>, seed: u64) -> (VectorField, VectorField) {
    generate_data(
        grid,
        &DataSpec {
            seed,
            ..DataSpec::default()
        },
    )
    .unwrap()
}

fn short() -> SolverConfig {
    SolverConfig {
        t_end: 0.1,
        snapshot_stride: 5,
        ..SolverConfig::default()
    }
}

fn single(u: VectorField, b: VectorField) -> Trajectory {
    Trajectory {
        snapshots: vec![MHDState::new(u, b, 0.0).unwrap()],
        diagnostics: Vec::new(),
    }
}

const H: [Metric; 2] = [Metric::Sobolev(2.5), Metric::Sobolev(1.5)];

#[test]
fn identical_runs_differ_by_nothing() {
    let g = make_grid(2, 32).unwrap();
    let (u, b) = data(&g, 1);
    let traj = solve(&MHDState::new(u, b, 0.0).unwrap(), &short()).unwrap();
    let bank = LPFilterBank::new(&g).unwrap();
    let besov = Metric::Besov(BesovIndex::new(2.1, 4.0, 2.0).unwrap());
    let series = difference_metrics(&traj, &traj, &[H[0], besov], &bank).unwrap();
    assert_eq!(series.times, traj.times());
    for m in 0..2 {
        assert!(series.combined(m).iter().all(|&e| e == 0.0));
        assert_eq!(series.sup(m), 0.0);
    }
}

#[test]
fn initial_gap_is_the_perturbation_norm() {
    let g = make_grid(2, 32).unwrap();
    let (u, b) = data(&g, 2);
    let w = solenoidal_field(
        &g,
        &DataSpec {
            seed: 9,
            ..DataSpec::default()
        },
        0,
    )
    .unwrap();
    let alpha = 0.125;
    let bank = LPFilterBank::new(&g).unwrap();
    let a = single(u.clone(), b.clone());
    let p = single(u.axpy(alpha, &w).unwrap(), b);
    let series = difference_metrics(&p, &a, &H, &bank).unwrap();
    for (m, metric) in H.iter().enumerate() {
        let expected = alpha * metric.norm(&w, &bank).unwrap();
        let got = series.points[m][0];
        assert!((got.du - expected).abs() < 1e-13 * expected);
        assert_eq!(got.db, 0.0);
    }
}

#[test]
fn interpolation_between_snapshots() {
    let g = make_grid(2, 16).unwrap();
    let (u, b) = generate_data(
        &g,
        &DataSpec {
            band: (1.0, 5.0),
            ..DataSpec::default()
        },
    )
    .unwrap();
    let traj = Trajectory {
        snapshots: vec![
            MHDState {
                u: u.clone(),
                b: b.clone(),
                t: 0.0,
            },
            MHDState {
                u: u.scale(3.0),
                b: b.scale(3.0),
                t: 0.5,
            },
        ],
        diagnostics: Vec::new(),
    };
    let mid = state_at(&traj, 0.25).unwrap();
    assert!((&mid.u - &u.scale(2.0)).l2_norm() < 1e-14);
    assert!(matches!(
        state_at(&traj, 0.75),
        Err(ExperimentError::TimeGridMismatch(_))
    ));
    let bank = LPFilterBank::new(&g).unwrap();
    let late = Trajectory {
        snapshots: vec![MHDState { u, b, t: 1.0 }],
        diagnostics: Vec::new(),
    };
    assert!(difference_metrics(&late, &traj, &H, &bank).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn elsasser_and_direct_differences_are_equivalent(seed in 1u64..100_000, s in -1.0f64..3.0) {
        let g = make_grid(2, 16).unwrap();
        let spec = DataSpec { seed, band: (1.0, 5.0), ..DataSpec::default() };
        let (u1, b1) = generate_data(&g, &spec).unwrap();
        let (u2, b2) = generate_data(&g, &DataSpec { seed: seed + 1, ..spec }).unwrap();
        let bank = LPFilterBank::new(&g).unwrap();
        let metrics = [Metric::Sobolev(s), Metric::Besov(BesovIndex::new(s, 3.0, 1.0).unwrap())];
        let series = difference_metrics(&single(u1, b1), &single(u2, b2), &metrics, &bank).unwrap();
        for m in 0..2 {
            let p = series.points[m][0];
            let tol = 1e-12 * p.elsasser_sum();
            prop_assert!(0.5 * p.elsasser_sum() <= p.direct_sum() + tol);
            prop_assert!(p.direct_sum() <= p.elsasser_sum() + tol);
        }
    }
}

#[test]
fn vanishing_parameters_give_vanishing_errors() {
    let g = make_grid(2, 16).unwrap();
    let (u, b) = generate_data(
        &g,
        &DataSpec {
            band: (1.0, 5.0),
            ..DataSpec::default()
        },
    )
    .unwrap();
    let zeros = [0.0; 4];
    let r = inviscid_sweep(&Sequential, &u, &b, &zeros, &zeros, &H, &short()).unwrap();
    assert!(r.errors.iter().flatten().all(|&e| e == 0.0));
    assert!(r.fits.iter().all(Option::is_none));
    let w = VectorField::zeros(&g);
    let r = data_perturbation_sweep(&Sequential, &u, &b, &u, &w, &[0.0], &H, &short()).unwrap();
    assert_eq!(r.errors[0], vec![0.0]);
}

#[test]
fn sweep_validation_and_member_failures() {
    let g = make_grid(2, 16).unwrap();
    let (u, b) = generate_data(
        &g,
        &DataSpec {
            band: (1.0, 5.0),
            ..DataSpec::default()
        },
    )
    .unwrap();
    let bad = inviscid_sweep(
        &Sequential,
        &u,
        &b,
        &[0.01, 0.02],
        &[0.01, 0.02],
        &H,
        &short(),
    );
    assert!(matches!(bad, Err(ExperimentError::InvalidParameters(_))));
    let bad = inviscid_sweep(&Sequential, &u, &b, &[0.01], &[0.01, 0.0], &H, &short());
    assert!(matches!(bad, Err(ExperimentError::InvalidParameters(_))));
    let tight = SolverConfig {
        blowup_threshold: 1e-6,
        ..short()
    };
    let failed = inviscid_sweep(&Sequential, &u, &b, &[0.01], &[0.01], &H, &tight);
    assert!(matches!(failed, Err(ExperimentError::Reference(_))));
}

#[test]
fn viscosity_sweep_errors_shrink() {
    let g = make_grid(2, 32).unwrap();
    let (u, b) = data(&g, 3);
    let mus = [0.04, 0.02, 0.01, 0.005];
    let config = SolverConfig {
        t_end: 0.2,
        ..short()
    };
    let r = inviscid_sweep(&Sequential, &u, &b, &mus, &mus, &H, &config).unwrap();
    for m in 0..2 {
        assert!(r.errors[m].windows(2).all(|w| w[1] <= 1.05 * w[0]));
        let fit = r.fits[m].unwrap();
        assert_eq!(fit.points, 4);
        assert!(fit.slope > 0.5);
    }
    assert!(r.slope(1).unwrap() >= r.slope(0).unwrap() - 1e-3);
}

#[test]
fn split_at_the_top_block_without_viscosity_is_trivial() {
    let g = make_grid(2, 32).unwrap();
    let (u, b) = data(&g, 4);
    let bank = LPFilterBank::new(&g).unwrap();
    let r = mollification_split(&Sequential, &u, &b, bank.j_max(), 0.0, 0.0, &H, &short()).unwrap();
    for series in [&r.viscous_tail, &r.middle, &r.ideal_tail, &r.total] {
        assert!(series.sup(0) < 1e-12);
    }
    assert!(r.data_tail[0] < 1e-12);
    assert!(mollification_split(
        &Sequential,
        &u,
        &b,
        bank.j_max() + 1,
        0.0,
        0.0,
        &H,
        &short()
    )
    .is_err());
}

#[test]
fn split_obeys_the_triangle_inequality() {
    let g = make_grid(2, 32).unwrap();
    let (u, b) = data(&g, 5);
    let r = mollification_split(&Sequential, &u, &b, 1, 0.01, 0.01, &H, &short()).unwrap();
    assert!(r.data_tail[0] > 0.0);
    assert!((r.viscous_tail.combined(0)[0] - r.data_tail[0]).abs() < 1e-14 * r.data_tail[0]);
    for m in 0..2 {
        assert!(r.triangle_excess(m) <= 1e-14 * r.total.sup(m));
    }
}

#[test]
fn envelope_examples() {
    let g = make_grid(2, 32).unwrap();
    let (u, b) = data(&g, 6);
    let state = MHDState::new(u, b, 0.0).unwrap();
    let idx = BesovIndex::sobolev(2.5);
    let ideal = solve(&state, &short()).unwrap();
    let same = envelope_check(&ideal, &ideal, 2.5, 0.0, 0.0, &idx).unwrap();
    assert_eq!(same.constant, 1.0);
    assert!(same.measured.iter().all(|&m| m == 0.0));

    let viscous = solve(&state, &short().with_coefficients(0.01, 0.01)).unwrap();
    let r = envelope_check(&viscous, &ideal, 2.5, 0.01, 0.01, &idx).unwrap();
    assert!(r.constant >= 1.0 && r.constant.is_finite());
    for (m, e) in r.measured.iter().zip(r.envelope()) {
        assert!(*m <= e * (1.0 + 1e-12));
    }
    assert!(r.b_integral.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(r.exponents.len(), r.times.len());

    let rest = MHDState::zeros(&g);
    let zero = solve(&rest, &short()).unwrap();
    assert!(matches!(
        envelope_check(&viscous, &zero, 2.5, 0.01, 0.01, &idx),
        Err(ExperimentError::DegenerateReference)
    ));
}

#[test]
fn uniformity_examples() {
    let g = make_grid(2, 16).unwrap();
    let idx = BesovIndex::new(1.5, 2.0, 2.0).unwrap();
    let f0 = SpectralField::from_fn(&g, |x| x[0].sin() + (2.0 * x[1]).cos());
    let rest = Source::Steady(VectorField::zeros(&g));
    let r = transport_diffusion_uniformity(&Sequential, &rest, &f0, None, &[0.0], &idx, &short())
        .unwrap();
    assert_eq!(r.rows[0].ratio, 1.0);

    let zero = SpectralField::zeros(&g);
    let forcing = Source::Steady(f0.clone());
    let r = transport_diffusion_uniformity(
        &Sequential,
        &rest,
        &zero,
        Some(&forcing),
        &[0.1, 0.0],
        &idx,
        &short(),
    )
    .unwrap();
    assert_eq!(r.constant, 0.0);
    for row in &r.rows {
        for (l, d) in row.lhs.iter().zip(&row.data) {
            assert!(*l <= d * (1.0 + 1e-12));
        }
    }
    assert!((r.rows[1].ratio - 1.0).abs() < 1e-12);
    let bad = BesovIndex::new(-1.5, 2.0, 2.0).unwrap();
    assert!(
        transport_diffusion_uniformity(&Sequential, &rest, &f0, None, &[0.0], &bad, &short())
            .is_err()
    );
}
