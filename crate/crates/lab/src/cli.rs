//! The `mhdlab` command line.

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mhdlab_core::data::{
    generate_data, scalar_field, solenoidal_field, DataSpec, RandomFields, MAGNETIC_STREAM,
    VELOCITY_STREAM,
};
use mhdlab_core::experiments::{
    data_perturbation_sweep, envelope_check, inviscid_sweep, mollification_split,
    transport_diffusion_uniformity, Metric, SplitReport, SweepRecord, UniformityReport,
};
use mhdlab_core::lp::{
    besov_norm, empirical_constant, BesovIndex, Inequality, InequalityId, LPFilterBank,
};
use mhdlab_core::solver::{solve, MHDState, SolverConfig, Source};
use mhdlab_core::{make_grid, ExperimentError, VectorField};

use crate::config::{parse_indices, PerturbationTarget, RunConfig, SweepAxis};
use crate::error::{ConfigError, LabError};
use crate::exec::RayonExecutor;
use crate::report;
use crate::snapshot::SnapshotFile;
use crate::svg::{LinePlot, Series};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MHDLAB_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "mhdlab",
    version,
    about = "Incompressible MHD inviscid-limit laboratory on the torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Run configuration (`section.key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory (default: `output.dir`, then $MHDLAB_OUT, then `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for independent runs (0: one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Constants,
    Uniformity,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One solve: snapshots, diagnostics.csv, and envelope.csv when viscous.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Start from a snapshot instead of generated data.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Skip writing snapshot files.
        #[arg(long)]
        no_snapshots: bool,
    },
    /// Viscosity or data-perturbation sweep: sweep.csv and sweep.svg.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// viscosity, data-perturbation, or mollification.
        #[arg(long)]
        kind: Option<String>,
        /// Comma-separated sweep values, decreasing toward 0.
        #[arg(long)]
        values: Option<String>,
    },
    /// Mollification split at each level `j`: split.csv and per-level series.
    Split {
        #[command(flatten)]
        common: Common,
        /// Comma-separated mollification levels.
        #[arg(long)]
        levels: Option<String>,
        /// Viscosity and resistivity of the viscous runs.
        #[arg(long)]
        mu: Option<String>,
    },
    /// Besov norms of the fields in a snapshot.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// `s,p,r` triples separated by `;`.
        #[arg(long)]
        norms: String,
        /// CSV destination (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical inequality constants and transport-diffusion uniformity.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Coarse resolution; constants are also measured at twice this.
        #[arg(long, default_value_t = 32)]
        base_n: usize,
        /// Spectral decay exponent of the inequality trial fields, whose
        /// band reaches each grid's dealiasing cutoff.
        #[arg(long, default_value_t = 4.0)]
        trial_gamma: f64,
        /// Random (v, f0) pairs for the uniformity suite.
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        /// H^s size of the transporting velocity.
        #[arg(long, default_value_t = 20.0)]
        velocity_amplitude: f64,
        /// Diffusivities, comma separated.
        #[arg(long, default_value = "0.1,0.01,0.001,0")]
        eps: String,
        /// Besov indices of the uniformity suite.
        #[arg(long, default_value = "1.5,2,2; 2.1,4,2")]
        index: String,
        /// Run only one suite.
        #[arg(long, value_enum)]
        only: Option<Suite>,
    },
    /// Write the configured initial data as a snapshot.
    GenData {
        #[command(flatten)]
        common: Common,
        /// Snapshot path (default: `<out>/initial.mhds`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(t) = e.trip_time() {
                eprintln!("run tripped at t = {t}");
            }
            e.exit_code()
        }
    }
}

struct Setup {
    cfg: RunConfig,
    out: PathBuf,
    exec: RayonExecutor,
}

fn setup(common: &Common, overrides: &[(&str, Option<&str>)]) -> Result<Setup, LabError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for item in &common.set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| ConfigError::new("--set", format!("`{item}` is not KEY=VALUE")))?;
        let key = key.trim();
        cfg.set(key, value.trim())
            .map_err(|m| ConfigError::new(key, m))?;
    }
    for (key, value) in overrides {
        if let Some(value) = value {
            cfg.set(key, value).map_err(|m| ConfigError::new(*key, m))?;
        }
    }
    cfg.validate()?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out).map_err(LabError::file(&out))?;
    let exec = RayonExecutor::new(common.jobs)?;
    Ok(Setup { cfg, out, exec })
}

/// Norm used for an index: the Fourier-weight Sobolev norm for `p = r = 2`,
/// the Littlewood-Paley Besov norm otherwise.
pub fn metric_for(idx: &BesovIndex) -> Metric {
    if idx.p == 2.0 && idx.r == 2.0 {
        Metric::Sobolev(idx.s)
    } else {
        Metric::Besov(*idx)
    }
}

fn initial_data(cfg: &RunConfig) -> Result<MHDState, LabError> {
    let grid = make_grid(cfg.dim, cfg.n)?;
    let (u, b) = generate_data(&grid, &cfg.data)?;
    Ok(MHDState::new(u, b, 0.0)?)
}

fn solver_for(cfg: &RunConfig, state: &MHDState) -> SolverConfig {
    cfg.solver_for_speed(state.u.max_magnitude() + state.b.max_magnitude())
}

fn write_svg(path: &Path, plot: &LinePlot) -> Result<(), LabError> {
    fs::write(path, plot.render()).map_err(LabError::file(path))
}

fn run(command: Command) -> Result<(), LabError> {
    match command {
        Command::Simulate {
            common,
            input,
            no_snapshots,
        } => simulate(&setup(&common, &[])?, input.as_deref(), no_snapshots),
        Command::Sweep {
            common,
            kind,
            values,
        } => {
            let s = setup(
                &common,
                &[
                    ("sweep.kind", kind.as_deref()),
                    ("sweep.values", values.as_deref()),
                ],
            )?;
            match s.cfg.sweep_kind {
                SweepAxis::Mollification => split(&s),
                _ => sweep(&s),
            }
        }
        Command::Split { common, levels, mu } => split(&setup(
            &common,
            &[
                ("sweep.levels", levels.as_deref()),
                ("solver.mu", mu.as_deref()),
                ("solver.nu", mu.as_deref()),
            ],
        )?),
        Command::Analyze { input, norms, out } => analyze(&input, &norms, out.as_deref()),
        Command::Verify {
            common,
            trials,
            base_n,
            trial_gamma,
            pairs,
            velocity_amplitude,
            eps,
            index,
            only,
        } => {
            let s = setup(&common, &[])?;
            let eps = eps
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ConfigError::new("--eps", format!("`{eps}` is not a number list")))?;
            let indices = parse_indices(&index).map_err(|m| ConfigError::new("--index", m))?;
            if only != Some(Suite::Uniformity) {
                verify_constants(&s, trials, base_n, trial_gamma)?;
            }
            if only != Some(Suite::Constants) {
                verify_uniformity(&s, pairs, base_n, velocity_amplitude, &eps, &indices)?;
            }
            Ok(())
        }
        Command::GenData { common, output } => {
            let s = setup(&common, &[])?;
            let path = output.unwrap_or_else(|| s.out.join("initial.mhds"));
            SnapshotFile::from_state(&initial_data(&s.cfg)?).save(&path)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn simulate(s: &Setup, input: Option<&Path>, no_snapshots: bool) -> Result<(), LabError> {
    let cfg = &s.cfg;
    let state = match input {
        Some(path) => SnapshotFile::load(path)?.to_state()?,
        None => initial_data(cfg)?,
    };
    let solver = solver_for(cfg, &state);
    let traj = solve(&state, &solver)?;
    report::to_file(&s.out.join("diagnostics.csv"), |w| {
        report::diagnostics(w, &traj.diagnostics)
    })?;
    let times: Vec<f64> = traj.diagnostics.iter().map(|d| d.t).collect();
    let energy: Vec<f64> = traj.diagnostics.iter().map(|d| d.energy).collect();
    let helicity: Vec<f64> = traj.diagnostics.iter().map(|d| d.cross_helicity).collect();
    write_svg(
        &s.out.join("diagnostics.svg"),
        &LinePlot::new("Invariants", "t", "value", false, false)
            .with(Series::new("energy", &times, &energy))
            .with(Series::new("cross helicity", &times, &helicity)),
    )?;
    if !no_snapshots {
        let dir = s.out.join("snapshots");
        fs::create_dir_all(&dir).map_err(LabError::file(&dir))?;
        for (i, snap) in traj.snapshots.iter().enumerate() {
            SnapshotFile::from_state(snap).save(&dir.join(format!("snap_{i:05}.mhds")))?;
        }
    }
    println!(
        "solved to t = {} with dt = {:?}: {} snapshots, final energy {:.6e}",
        traj.last().t,
        solver.dt,
        traj.snapshots.len(),
        traj.last().energy()
    );
    if cfg.mu > 0.0 || cfg.nu > 0.0 {
        let ideal = solve(&state, &solver.with_coefficients(0.0, 0.0))?;
        match envelope_check(&traj, &ideal, cfg.data.s, cfg.mu, cfg.nu, &cfg.norms[0]) {
            Ok(env) => {
                report::to_file(&s.out.join("envelope.csv"), |w| report::envelope(w, &env))?;
                write_svg(
                    &s.out.join("envelope.svg"),
                    &LinePlot::new("Viscous-ideal gap", "t", "squared H^{s-1} gap", false, true)
                        .with(Series::new("measured", &env.times, &env.measured))
                        .with(Series::new("envelope", &env.times, &env.envelope())),
                )?;
                println!("envelope constant {:.6e}", env.constant);
            }
            Err(ExperimentError::DegenerateReference) => {
                println!("ideal run is identically zero; no envelope written");
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn perturbation(cfg: &RunConfig, state: &MHDState) -> Result<(VectorField, VectorField), LabError> {
    let grid = state.grid();
    let spec = DataSpec {
        seed: cfg.perturbation_seed,
        amplitude: cfg.perturbation_amplitude,
        ..cfg.data
    };
    let zero = VectorField::zeros(grid);
    let (wu, wb) = match cfg.perturbation_target {
        PerturbationTarget::Velocity => (solenoidal_field(grid, &spec, VELOCITY_STREAM)?, zero),
        PerturbationTarget::Magnetic => (zero, solenoidal_field(grid, &spec, MAGNETIC_STREAM)?),
        PerturbationTarget::Both => (
            solenoidal_field(grid, &spec, VELOCITY_STREAM)?,
            solenoidal_field(grid, &spec, MAGNETIC_STREAM)?,
        ),
    };
    Ok((wu, wb))
}

/// Runs the configured viscosity (`μ_n = ν_n`) or data-perturbation sweep.
pub fn run_sweep(cfg: &RunConfig, exec: &RayonExecutor) -> Result<SweepRecord, LabError> {
    let state = initial_data(cfg)?;
    let solver = solver_for(cfg, &state);
    let metrics: Vec<Metric> = cfg.norms.iter().map(metric_for).collect();
    let values = &cfg.sweep_values;
    Ok(match cfg.sweep_kind {
        SweepAxis::DataPerturbation => {
            let (wu, wb) = perturbation(cfg, &state)?;
            data_perturbation_sweep(
                exec, &state.u, &state.b, &wu, &wb, values, &metrics, &solver,
            )?
        }
        _ => inviscid_sweep(exec, &state.u, &state.b, values, values, &metrics, &solver)?,
    })
}

fn sweep(s: &Setup) -> Result<(), LabError> {
    let record = run_sweep(&s.cfg, &s.exec)?;
    report::to_file(&s.out.join("sweep.csv"), |w| report::sweep(w, &record))?;
    let mut plot = LinePlot::new(
        &format!("{} sweep", record.kind.name()),
        record.kind.name(),
        "sup-in-time error",
        true,
        true,
    );
    for (m, metric) in record.metrics.iter().enumerate() {
        plot = plot.with(Series::new(
            metric.to_string(),
            &record.parameters,
            &record.errors[m],
        ));
    }
    write_svg(&s.out.join("sweep.svg"), &plot)?;
    for (m, metric) in record.metrics.iter().enumerate() {
        match record.slope(m) {
            Some(slope) => println!("{metric}: slope {slope:.4}"),
            None => println!("{metric}: too few points above the floor for a slope"),
        }
    }
    Ok(())
}

fn split(s: &Setup) -> Result<(), LabError> {
    let cfg = &s.cfg;
    let state = initial_data(cfg)?;
    let solver = solver_for(cfg, &state);
    let metrics: Vec<Metric> = cfg.norms.iter().map(metric_for).collect();
    let reports = cfg
        .sweep_levels
        .iter()
        .map(|&j| {
            mollification_split(
                &s.exec, &state.u, &state.b, j, cfg.mu, cfg.nu, &metrics, &solver,
            )
        })
        .collect::<Result<Vec<SplitReport>, _>>()?;
    report::to_file(&s.out.join("split.csv"), |w| {
        report::split_summary(w, &reports)
    })?;
    for r in &reports {
        report::to_file(&s.out.join(format!("split_j{}.csv", r.j)), |w| {
            report::split_series(w, r)
        })?;
    }
    let levels: Vec<f64> = reports.iter().map(|r| r.j as f64).collect();
    let leg = |f: &dyn Fn(&SplitReport) -> f64| reports.iter().map(f).collect::<Vec<f64>>();
    write_svg(
        &s.out.join("split.svg"),
        &LinePlot::new(
            "Mollification split",
            "j",
            &format!("sup-in-time {}", metrics[0]),
            false,
            true,
        )
        .with(Series::new(
            "viscous tail",
            &levels,
            &leg(&|r| r.viscous_tail.sup(0)),
        ))
        .with(Series::new("middle", &levels, &leg(&|r| r.middle.sup(0))))
        .with(Series::new(
            "ideal tail",
            &levels,
            &leg(&|r| r.ideal_tail.sup(0)),
        ))
        .with(Series::new("total", &levels, &leg(&|r| r.total.sup(0)))),
    )?;
    for r in &reports {
        println!(
            "j = {}: viscous tail {:.4e}, middle {:.4e}, ideal tail {:.4e}, total {:.4e}",
            r.j,
            r.viscous_tail.sup(0),
            r.middle.sup(0),
            r.ideal_tail.sup(0),
            r.total.sup(0)
        );
    }
    Ok(())
}

fn analyze(input: &Path, norms: &str, out: Option<&Path>) -> Result<(), LabError> {
    let indices = parse_indices(norms).map_err(|m| ConfigError::new("--norms", m))?;
    if indices.is_empty() {
        return Err(ConfigError::new("--norms", "at least one index is required").into());
    }
    let snap = SnapshotFile::load(input)?;
    let (u, b) = snap.vector_fields().map_err(|source| LabError::Snapshot {
        path: input.to_path_buf(),
        source,
    })?;
    let bank = LPFilterBank::new(u.grid())?;
    let mut rows = Vec::new();
    for (name, field) in [("u", &u), ("b", &b)] {
        for idx in &indices {
            rows.push((
                name.to_string(),
                *idx,
                besov_norm(field, idx, &bank, false)?,
            ));
        }
    }
    match out {
        Some(path) => report::to_file(path, |w| report::norms(w, &rows)),
        None => {
            let mut w = csv::Writer::from_writer(io::stdout());
            report::norms(&mut w, &rows)?;
            w.flush().map_err(LabError::file("<stdout>"))?;
            Ok(())
        }
    }
}

/// Trial-field source for the constants suite: the configured data with
/// decay `gamma` and the band filled to each grid's cutoff.
pub fn trial_sampler(cfg: &RunConfig, gamma: f64) -> Result<RandomFields, LabError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(ConfigError::new("--trial-gamma", "must be positive").into());
    }
    Ok(RandomFields::filling(DataSpec { gamma, ..cfg.data }))
}

fn verify_constants(s: &Setup, trials: usize, base_n: usize, gamma: f64) -> Result<(), LabError> {
    let sampler = trial_sampler(&s.cfg, gamma)?;
    let mut all = mhdlab_core::lp::ConstantReport::default();
    let mut summary = Vec::new();
    for id in InequalityId::ALL {
        let ineq = Inequality::default_for(id, s.cfg.dim);
        let rep = empirical_constant(&s.exec, &ineq, &sampler, trials, s.cfg.dim, base_n)?;
        let worst = |n| {
            rep.max_ratio(n)
                .map_or("none".to_string(), |r| format!("{r:.4e}"))
        };
        println!(
            "{id}: max ratio {} at n = {base_n}, {} at n = {}, change {:.3}",
            worst(base_n),
            worst(2 * base_n),
            2 * base_n,
            rep.resolution_change()
        );
        all.rows.extend(rep.rows.iter().cloned());
        summary.push((id.name().to_string(), ineq.index, rep));
    }
    report::to_file(&s.out.join("constants.csv"), |w| report::constants(w, &all))?;
    report::to_file(&s.out.join("constants_summary.csv"), |w| {
        report::constant_summary(w, &summary)
    })
}

/// Uniformity reports for `pairs` random `(v, f0)` pairs, pair-major then
/// index order.
pub fn uniformity_suite(
    cfg: &RunConfig,
    exec: &RayonExecutor,
    pairs: usize,
    n: usize,
    velocity_amplitude: f64,
    eps: &[f64],
    indices: &[BesovIndex],
) -> Result<Vec<UniformityReport>, LabError> {
    let grid = make_grid(cfg.dim, n)?;
    let solver = cfg.solver();
    let mut reports = Vec::new();
    for pair in 0..pairs {
        let spec = DataSpec {
            seed: cfg.data.seed.wrapping_add(99 + pair as u64),
            ..cfg.data
        };
        let v = solenoidal_field(
            &grid,
            &DataSpec {
                amplitude: velocity_amplitude,
                ..spec
            },
            16,
        )?;
        let f0 = scalar_field(&grid, &spec, 17)?;
        let v = Source::Steady(v);
        for idx in indices {
            reports.push(transport_diffusion_uniformity(
                exec, &v, &f0, None, eps, idx, &solver,
            )?);
        }
    }
    Ok(reports)
}

fn verify_uniformity(
    s: &Setup,
    pairs: usize,
    n: usize,
    velocity_amplitude: f64,
    eps: &[f64],
    indices: &[BesovIndex],
) -> Result<(), LabError> {
    let reports = uniformity_suite(&s.cfg, &s.exec, pairs, n, velocity_amplitude, eps, indices)?;
    report::to_file(&s.out.join("uniformity.csv"), |w| {
        report::uniformity(w, &reports)
    })?;
    let worst = reports
        .iter()
        .map(UniformityReport::spread)
        .fold(1.0, f64::max);
    println!(
        "uniformity: {} reports, worst ratio spread {worst:.4}",
        reports.len()
    );
    Ok(())
}
