//! Batch front end: scenario ingestion, subcommand dispatch, CSV emission.
//!
//! Exit codes: 0 success, 1 analysis found a violation (SPR sweep failed,
//! trajectory diverged), 2 input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use swingnet::{
    check_spr, classify_single, load_scenario, log_omega_grid, network_modes, random_initial_state,
    simulate, spectrum, DisturbanceShape, Error, GridParams, LaplacianWeights, LureSystem, Method,
    NetworkSystem, NetworkVerdict, Scenario, SectorDisturbance, SimConfig, SprVerdict,
    TransientKind,
};

#[derive(Parser)]
#[command(
    name = "swingnet",
    version,
    about = "Swing-equation toolkit for single and interconnected micro-grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-grid and network transient classification for a scenario
    Classify(ClassifyArgs),
    /// Laplacian spectrum, maximal eigenvalue and degree bounds
    Spectrum(ScenarioArg),
    /// Integrate trajectories and write one CSV per damping value
    Simulate(SimulateArgs),
    /// Strict-positive-realness check of the disturbed single-grid loop
    SprCheck(SprArgs),
    /// Run both replication campaigns end to end
    ReplicatePaper(ReplicateArgs),
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario file (TOML); defaults to the bundled Nigerian case study
    #[arg(long)]
    scenario: Option<PathBuf>,
}

impl ScenarioArg {
    fn load(&self) -> anyhow::Result<Scenario> {
        match &self.scenario {
            Some(path) => {
                load_scenario(path).with_context(|| format!("loading {}", path.display()))
            }
            None => Ok(Scenario::nigeria()),
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Damping values to classify at (overrides the scenario's)
    #[arg(long, value_delimiter = ',')]
    damping: Vec<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArg,
    /// Damping sweep; one CSV per value (default: the scenario's damping)
    #[arg(long, value_delimiter = ',')]
    damping: Vec<f64>,
    /// Seed for initial states and reinitialization draws
    #[arg(long)]
    seed: Option<u64>,
    /// Integration method (overrides the scenario's)
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Output directory for CSV files
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SprArgs {
    /// Inertia constant M
    #[arg(long, default_value_t = 1.0)]
    inertia: f64,
    /// Damping constant D
    #[arg(long, default_value_t = 1.0)]
    damping: f64,
    /// Synchronizing coefficient T
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Sector gain k (K = k I)
    #[arg(long, default_value_t = 1.0)]
    gain: f64,
    #[arg(long, default_value_t = 1e-3)]
    omega_min: f64,
    #[arg(long, default_value_t = 1e3)]
    omega_max: f64,
    #[arg(long, default_value_t = 200)]
    omega_points: usize,
    /// Write the sweep as CSV to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplicateArgs {
    /// Output directory for the campaign CSVs
    #[arg(long, default_value = "replication")]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// First-campaign damping sweep on the Nigerian network
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0, 6.0])]
    damping: Vec<f64>,
    /// Second-campaign periodicity factors for the sector disturbance
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 10.0])]
    xi: Vec<f64>,
    /// Second-campaign damping sweep at fixed xi = 1
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0, 5.0])]
    second_damping: Vec<f64>,
    /// Integration method (the paper's fixed step is closest to Euler)
    #[arg(long, value_enum, default_value_t = MethodArg::Euler)]
    method: MethodArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Euler,
    Rk4,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Euler => Method::Euler,
            MethodArg::Rk4 => Method::Rk4,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::SprCheck(args) => cmd_spr_check(args),
        Command::ReplicatePaper(args) => cmd_replicate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Analysis outcomes map to exit 1, input problems bubble up as Err (exit 2).
type CmdResult = anyhow::Result<ExitCode>;

fn fmt_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re:.4}")
    } else {
        format!(
            "{re:.4} {} {:.4}i",
            if im >= 0.0 { "+" } else { "-" },
            im.abs()
        )
    }
}

fn scenario_header(sc: &Scenario) {
    let d_max = sc.topology.max_degree();
    let components = sc.topology.component_count();
    println!(
        "scenario: {} ({} nodes, {} edges, d_max = {d_max}, {})",
        sc.name,
        sc.topology.node_count(),
        sc.topology.edges().len(),
        if components == 1 {
            "connected".to_string()
        } else {
            format!("{components} components")
        }
    );
}

fn cmd_classify(args: ClassifyArgs) -> CmdResult {
    let sc = args.scenario.load()?;
    scenario_header(&sc);

    // Per-node classification against the mains, through the node's
    // strongest incident line.
    println!("single-grid classification vs mains:");
    for (i, label) in sc.topology.node_labels().iter().enumerate() {
        let t_mains = sc
            .topology
            .edges()
            .iter()
            .filter(|e| e.i == i || e.j == i)
            .map(|e| e.t)
            .fold(f64::NAN, f64::max);
        if t_mains.is_nan() {
            println!("  {label:<10} isolated node, no line to classify against");
            continue;
        }
        let p = GridParams::new(sc.inertias[i], sc.dampings[i], t_mains)
            .map_err(|e| anyhow!("node '{label}': {e}"))?;
        let class = classify_single(&p);
        let kind = match class.kind {
            TransientKind::AsymptoticallyStableNode => "asymptotically stable node",
            TransientKind::AsymptoticallyStableSpiral => "asymptotically stable spiral",
            TransientKind::Boundary => "boundary (critically damped)",
        };
        println!(
            "  {label:<10} M={} D={} T={}  threshold 2*sqrt(TM)={:.4}  {kind}",
            p.m, p.d, p.t, class.damping_threshold
        );
    }

    let ratio = sc.homogeneous_ratio().ok_or_else(|| {
        anyhow!("network classification requires a homogeneous D/M ratio across grids")
    })?;
    let uniform_m = sc
        .inertias
        .iter()
        .all(|&m| (m - sc.inertias[0]).abs() < 1e-12);
    let l = sc.topology.laplacian(LaplacianWeights::FromT);
    let s = if uniform_m && (sc.inertias[0] - 1.0).abs() < 1e-12 {
        spectrum(&l)?
    } else {
        spectrum(&swingnet::weighted_laplacian(&l, &sc.inertias)?)?
    };
    let (d_max, _, _) = swingnet::degree_bounds(&sc.topology);

    let dampings = if args.damping.is_empty() {
        vec![ratio]
    } else {
        args.damping
    };
    for d in dampings {
        let nc = network_modes(&s, d, Some(d_max))?;
        let (no_osc, osc) = nc.bounds.expect("d_max supplied");
        println!("network modes at D/M = {d}: bounds no-oscillation >= {no_osc:.4}, oscillation <= {osc:.4}");
        for mode in &nc.per_mode {
            println!(
                "  mu_tilde = {:>8.4}  lambda+ = {:>18}  lambda- = {:>18}",
                mode.mu_tilde,
                fmt_complex(mode.lambda_plus.re, mode.lambda_plus.im),
                fmt_complex(mode.lambda_minus.re, mode.lambda_minus.im)
            );
        }
        let verdict = match nc.bound_verdict {
            Some(NetworkVerdict::AllRealGuaranteed) => {
                format!("AllRealGuaranteed (D = {d} >= {no_osc:.4})")
            }
            Some(NetworkVerdict::ComplexModeExists) => {
                format!("ComplexModeExists (D = {d} <= {osc:.4})")
            }
            _ => format!(
                "Indeterminate band ({osc:.4} < D = {d} < {no_osc:.4}); resolved by inspection: {:?}",
                nc.by_inspection()
            ),
        };
        println!(
            "verdict: {verdict}; {} of {} modes complex",
            nc.complex_modes.len(),
            nc.per_mode.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(args: ScenarioArg) -> CmdResult {
    let sc = args.load()?;
    scenario_header(&sc);
    let s = spectrum(&sc.topology.laplacian(LaplacianWeights::Unit))?;
    let list: Vec<String> = s.eigenvalues().iter().map(|e| format!("{e:.6}")).collect();
    println!("unweighted Laplacian eigenvalues: [{}]", list.join(", "));
    println!("mu_tilde_max = {:.6}", s.max());
    let (d_max, lo, hi) = swingnet::degree_bounds(&sc.topology);
    println!("degree bounds: d_max = {d_max}, bracket [{lo}, {hi}]");
    let zeros = s.zero_multiplicity();
    if zeros > 1 {
        println!("warning: {zeros} zero eigenvalues -> {zeros} connected components; consensus claims need a connected graph");
    }

    let uniform_m = sc
        .inertias
        .iter()
        .all(|&m| (m - sc.inertias[0]).abs() < 1e-12);
    if !uniform_m {
        let lw = swingnet::weighted_laplacian(
            &sc.topology.laplacian(LaplacianWeights::FromT),
            &sc.inertias,
        )?;
        let sw = spectrum(&lw)?;
        let list: Vec<String> = sw.eigenvalues().iter().map(|e| format!("{e:.6}")).collect();
        println!(
            "inertia-weighted Laplacian eigenvalues: [{}]",
            list.join(", ")
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn band_summary(r: &swingnet::SimResult) -> String {
    let fmin = r
        .frequencies()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let fmax = r
        .frequencies()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let pmin = r.powers().iter().copied().fold(f64::INFINITY, f64::min);
    let pmax = r.powers().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    format!("f in [{fmin:.4}, {fmax:.4}], P in [{pmin:.4}, {pmax:.4}]")
}

fn run_and_write(
    sys: &NetworkSystem,
    cfg: &SimConfig,
    dist: Option<&SectorDisturbance>,
    path: &Path,
) -> CmdResult {
    let x0 = random_initial_state(sys, cfg.seed);
    match simulate(sys, &x0, cfg, dist) {
        Ok(result) => {
            result
                .write_csv(path)
                .with_context(|| format!("writing {}", path.display()))?;
            println!(
                "wrote {} ({} samples, {})",
                path.display(),
                result.samples(),
                band_summary(&result)
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::NonFinite { step }) => {
            eprintln!("trajectory diverged at step {step}; no CSV written");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let sc = args.scenario.load()?;
    scenario_header(&sc);
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;

    let mut cfg = sc.sim.clone();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(m) = args.method {
        cfg.method = m.into();
    }

    let sweep: Vec<Option<f64>> = if args.damping.is_empty() {
        vec![None]
    } else {
        args.damping.iter().copied().map(Some).collect()
    };
    let mut worst = ExitCode::SUCCESS;
    for damping in sweep {
        let (sys, tag) = match damping {
            None => (sc.system()?, "scenario".to_string()),
            Some(d) => {
                let n = sc.topology.node_count();
                (
                    NetworkSystem::assemble(sc.topology.clone(), sc.inertias.clone(), vec![d; n])?,
                    format!("D{d}"),
                )
            }
        };
        let path = args.out.join(format!("{}_{tag}.csv", sc.name));
        let code = run_and_write(&sys, &cfg, sc.disturbance.as_ref(), &path)?;
        if code != ExitCode::SUCCESS {
            worst = code;
        }
    }
    Ok(worst)
}

fn cmd_spr_check(args: SprArgs) -> CmdResult {
    let params = GridParams::new(args.inertia, args.damping, args.coupling)?;
    let sys = LureSystem::new(params, args.gain)?;
    let grid_ok = args.omega_points >= 2
        && args.omega_min > 0.0
        && args.omega_max > args.omega_min
        && args.omega_max.is_finite();
    if !grid_ok {
        return Err(anyhow!(
            "omega grid must satisfy 0 < omega-min < omega-max with at least 2 points"
        ));
    }
    let grid = log_omega_grid(args.omega_min, args.omega_max, args.omega_points);
    let report = check_spr(&sys, &grid)?;

    let (p1, p2) = report.poles;
    println!(
        "poles: {:.6} {} {:.6}i, {:.6} {} {:.6}i ({})",
        p1.re,
        if p1.im >= 0.0 { "+" } else { "-" },
        p1.im.abs(),
        p2.re,
        if p2.im >= 0.0 { "+" } else { "-" },
        p2.im.abs(),
        if report.hurwitz {
            "Hurwitz"
        } else {
            "NOT Hurwitz"
        }
    );
    println!("limit: Z(inf) + Z(inf)^T = 2I exactly: {}", report.limit_ok);
    println!(
        "sweep: {} points in [{:.0e}, {:.0e}], min eigenvalue margin {:.6}",
        report.freq_sweep.len(),
        args.omega_min,
        args.omega_max,
        report.margin()
    );
    if let Some(path) = &args.out {
        report
            .write_csv(path)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    match report.verdict {
        SprVerdict::StrictlyPositiveReal => {
            println!(
                "verdict: StrictlyPositiveReal -> absolutely stable for sector gains up to k = {}",
                args.gain
            );
            Ok(ExitCode::SUCCESS)
        }
        SprVerdict::Violated(w) => {
            println!("verdict: Violated at omega = {w:.6e}");
            Ok(ExitCode::from(1))
        }
        SprVerdict::Inconclusive => {
            println!("verdict: Inconclusive (Hurwitz or limit check failed)");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_replicate(args: ReplicateArgs) -> CmdResult {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let sc = Scenario::nigeria();
    let mut worst = ExitCode::SUCCESS;
    let track = |code: ExitCode, worst: &mut ExitCode| {
        if code != ExitCode::SUCCESS {
            *worst = code;
        }
    };

    println!(
        "campaign 1: Nigerian network, D sweep {:?}, {} steps at dt = {} ({} s horizon)",
        args.damping,
        sc.sim.steps,
        sc.sim.dt,
        sc.sim.horizon()
    );
    for (k, &d) in args.damping.iter().enumerate() {
        let n = sc.topology.node_count();
        let sys = NetworkSystem::assemble(sc.topology.clone(), sc.inertias.clone(), vec![d; n])?;
        let cfg = SimConfig {
            seed: args.seed + k as u64,
            method: args.method.into(),
            ..sc.sim.clone()
        };
        let path = args.out.join(format!("campaign1_D{d}.csv"));
        track(run_and_write(&sys, &cfg, None, &path)?, &mut worst);
    }

    println!(
        "campaign 2: isolated grid, multiplicative sinusoid disturbance; xi sweep {:?} at D = 1, then D sweep {:?} at xi = 1",
        args.xi, args.second_damping
    );
    let single = |d: f64| -> anyhow::Result<NetworkSystem> {
        Ok(NetworkSystem::single_grid(&GridParams::new(1.0, d, 1.0)?))
    };
    let cfg2 = SimConfig {
        dt: 0.01,
        steps: 1000,
        method: args.method.into(),
        reinit_period: None,
        seed: args.seed,
        rescale: sc.sim.rescale,
    };
    for (k, &xi) in args.xi.iter().enumerate() {
        let dist = SectorDisturbance::new(2.0, xi, DisturbanceShape::PaperSinusoid)?;
        let cfg = SimConfig {
            seed: args.seed + 100 + k as u64,
            ..cfg2.clone()
        };
        let path = args.out.join(format!("campaign2_xi{xi}.csv"));
        track(
            run_and_write(&single(1.0)?, &cfg, Some(&dist), &path)?,
            &mut worst,
        );
    }
    for (k, &d) in args.second_damping.iter().enumerate() {
        let dist = SectorDisturbance::new(2.0, 1.0, DisturbanceShape::PaperSinusoid)?;
        let cfg = SimConfig {
            seed: args.seed + 200 + k as u64,
            ..cfg2.clone()
        };
        let path = args.out.join(format!("campaign2_xi1_D{d}.csv"));
        track(
            run_and_write(&single(d)?, &cfg, Some(&dist), &path)?,
            &mut worst,
        );
    }
    Ok(worst)
}
