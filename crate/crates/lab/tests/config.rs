use mhdlab::config::{PerturbationTarget, RunConfig, SweepAxis, TimeStep};
use mhdlab_core::lp::BesovIndex;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1e6f64..1e6),
        (1e-300f64..1e300),
        Just(0.1),
        Just(1.0 / 3.0),
        Just(-0.0),
    ]
}

fn index() -> impl Strategy<Value = BesovIndex> {
    let exponent = prop_oneof![(1.0f64..10.0), Just(f64::INFINITY)];
    (finite(), exponent.clone(), exponent).prop_map(|(s, p, r)| BesovIndex { s, p, r })
}

fn config() -> impl Strategy<Value = RunConfig> {
    (
        (
            2usize..=3,
            3u32..=8,
            finite(),
            finite(),
            prop_oneof![
                finite().prop_map(TimeStep::Fixed),
                finite().prop_map(TimeStep::Cfl)
            ],
        ),
        (finite(), 1usize..1000, finite(), finite()),
        (
            prop::collection::vec(index(), 0..4),
            prop_oneof![
                Just(SweepAxis::Viscosity),
                Just(SweepAxis::DataPerturbation),
                Just(SweepAxis::Mollification)
            ],
            prop::collection::vec(finite(), 0..6),
            prop::collection::vec(-1i32..10, 0..4),
        ),
        (
            any::<u64>(),
            finite(),
            finite(),
            finite(),
            finite(),
            finite(),
        ),
        (
            any::<u64>(),
            finite(),
            prop_oneof![
                Just(PerturbationTarget::Velocity),
                Just(PerturbationTarget::Magnetic),
                Just(PerturbationTarget::Both)
            ],
            prop::option::of("[a-z][a-z0-9_/]{0,12}"),
        ),
    )
        .prop_map(|(grid, solver, sweep, data, pert)| {
            let mut c = RunConfig {
                dim: grid.0,
                n: 1 << grid.1,
                mu: grid.2,
                nu: grid.3,
                dt: grid.4,
                t_end: solver.0,
                snapshot_stride: solver.1,
                blowup_threshold: solver.2,
                cfl_limit: solver.3,
                norms: sweep.0,
                sweep_kind: sweep.1,
                sweep_values: sweep.2,
                sweep_levels: sweep.3,
                ..RunConfig::default()
            };
            c.data.seed = data.0;
            c.data.gamma = data.1;
            c.data.band = (data.2, data.3);
            c.data.amplitude = data.4;
            c.data.s = data.5;
            c.perturbation_seed = pert.0;
            c.perturbation_amplitude = pert.1;
            c.perturbation_target = pert.2;
            c.output_dir = pert.3.map(Into::into);
            c
        })
}

proptest! {
    #[test]
    fn parse_serialize_round_trip(cfg in config()) {
        let text = cfg.serialize();
        let parsed = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.serialize(), text);
    }
}

#[test]
fn example_file_parses_and_validates() {
    let text = "\
# viscosity sweep on a 64^2 grid
grid.dim = 2
grid.n = 64
solver.mu = 0.01
solver.nu = 0.01
solver.dt = 1e-3
norms.indices = 2.5,2,2; 2.1,4,2
sweep.kind = viscosity
sweep.values = 2e-2, 1e-2, 5e-3, 2.5e-3
data.band = 1, 8
";
    let cfg = RunConfig::parse(text).unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg.sweep_values, vec![2e-2, 1e-2, 5e-3, 2.5e-3]);
    assert_eq!(cfg.norms.len(), 2);
}

#[test]
fn violations_name_their_key() {
    let cases = [
        ("grid.dim = 4", "grid.dim"),
        ("grid.n = 12", "grid.n"),
        ("solver.nu = -0.1", "solver.nu"),
        ("solver.t_end = 0", "solver.t_end"),
        ("solver.snapshot_stride = 0", "solver.snapshot_stride"),
        ("data.gamma = 0", "data.gamma"),
        ("data.amplitude = -1", "data.amplitude"),
        ("norms.indices = 1,2", "norms.indices"),
        ("sweep.kind = sideways", "sweep.kind"),
        ("sweep.levels = 9", "sweep.levels"),
        ("perturbation.target = pressure", "perturbation.target"),
    ];
    for (text, field) in cases {
        let err = RunConfig::parse(text)
            .and_then(|c| c.validate().map(|_| c))
            .unwrap_err();
        assert_eq!(err.field, field, "{text}");
        assert!(err.to_string().contains(field));
    }
}
