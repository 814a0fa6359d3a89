//! Command-line front end: solve polynomial files, run the surrogate loop,
//! quadratize, run the multiplier method on harvest-constrained instances,
//! generate instances, and drive benchmark sweeps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hobopt::bench::{
    self, run_convergence, run_sweep, run_timing, ExperimentConfig, Scheme,
};
use hobopt::constrained::{solve_alm, AlmConfig, ConstrainedProblem, InnerRoute};
use hobopt::hobo::{minimize_hobo, HoboConfig, InitialPoint, SurrogateSolver};
use hobopt::model::text::{read_polynomial_file, write_polynomial_file};
use hobopt::model::SolverModel;
use hobopt::quadratize::quadratize;
use hobopt::solvers::{dsb, exhaustive, sa};
use hobopt::swipt::{build_instance, sample_channel, ScenarioConfig, SwiptInstance};
use hobopt::{Error, Result};

#[derive(Parser)]
#[command(name = "hobopt", version, about = "Ising machines for constrained binary optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize a degree-<=2 polynomial file with one solver call.
    Solve(SolveArgs),
    /// Run the Taylor-surrogate loop on a higher-order polynomial file.
    Hobo(HoboArgs),
    /// Reduce a polynomial file to quadratic; write the result and the
    /// substitution map.
    Quadratize(QuadratizeArgs),
    /// Run the multiplier method on a harvest-constrained instance.
    Alm(AlmArgs),
    /// Generate harvest-constrained instances as JSON files.
    Gen(GenArgs),
    /// Benchmark sweeps and traces.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Dsb,
    Sa,
    Exhaustive,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    solver: SolverKind,
    /// Polynomial text file (degree <= 2).
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    b0: Option<f64>,
    /// Coupling scale: a number, or "auto".
    #[arg(long)]
    xi0: Option<String>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct HoboArgs {
    /// Polynomial text file (any degree).
    #[arg(long)]
    poly: PathBuf,
    #[arg(long, value_enum, default_value = "dsb")]
    solver: SolverKind,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuadratizeArgs {
    /// Polynomial text file.
    #[arg(long)]
    poly: PathBuf,
    /// Quadratic polynomial destination (default: <poly>.quadratic).
    #[arg(long)]
    out_poly: Option<PathBuf>,
    /// Substitution map JSON destination (default: <poly>.substitutions.json).
    #[arg(long)]
    out_subs: Option<PathBuf>,
}

#[derive(Args)]
struct AlmArgs {
    /// Instance JSON file, or "gen:n=14,delta=500,channel=0[,seed=0]".
    #[arg(long)]
    problem: String,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    min_iters: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_enum, default_value = "dsb")]
    inner_solver: SolverKind,
    /// Inner route: taylor (surrogate loop) or quadratize.
    #[arg(long, default_value = "taylor")]
    inner_route: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Harvest requirement in microwatts.
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    channels: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Sweep the element count.
    SweepN(BenchArgs),
    /// Sweep the harvest requirement.
    SweepDelta(BenchArgs),
    /// Median solver wall time per scheme and size.
    Timing(BenchArgs),
    /// Per-iteration trace of the multiplier method on one screened channel.
    Converge(BenchArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Flat key=value config file; explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated element counts.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated harvest requirements in microwatts.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    channels: Option<usize>,
    /// Comma-separated scheme names.
    #[arg(long)]
    schemes: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Screen channels at this threshold instead of each sweep point's own.
    #[arg(long)]
    screen_delta: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Hobo(args) => cmd_hobo(args),
        Command::Quadratize(args) => cmd_quadratize(args),
        Command::Alm(args) => cmd_alm(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(cmd) => cmd_bench(cmd),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let poly = read_polynomial_file(&args.model)?;

    let (assignment, energy, restart_index, wall_ms) = match args.solver {
        SolverKind::Exhaustive => {
            let started = Instant::now();
            let (best, energy) = exhaustive::minimize_polynomial(&poly)?;
            (best, energy, 0usize, started.elapsed().as_secs_f64() * 1e3)
        }
        SolverKind::Dsb => {
            let mut cfg = dsb::DsbConfig {
                seed: args.seed,
                ..dsb::DsbConfig::default()
            };
            if let Some(steps) = args.steps {
                cfg.steps = steps;
            }
            if let Some(dt) = args.dt {
                cfg.dt = dt;
            }
            if let Some(b0) = args.b0 {
                cfg.b0 = b0;
            }
            if let Some(xi0) = &args.xi0 {
                cfg.xi0 = parse_xi0(xi0)?;
            }
            if let Some(restarts) = args.restarts {
                cfg.restarts = restarts;
            }
            run_quadratic(&poly, |ising| dsb::solve_dsb(ising, &cfg))?
        }
        SolverKind::Sa => {
            let mut cfg = sa::SaConfig {
                seed: args.seed,
                ..sa::SaConfig::default()
            };
            if let Some(sweeps) = args.steps {
                cfg.sweeps = sweeps;
            }
            if let Some(restarts) = args.restarts {
                cfg.restarts = restarts;
            }
            run_quadratic(&poly, |ising| sa::solve_sa(ising, &cfg))?
        }
    };

    let report = serde_json::json!({
        "energy": energy,
        "assignment": assignment.values(),
        "wall_ms": wall_ms,
        "restart_index": restart_index,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn parse_xi0(text: &str) -> Result<dsb::Xi0> {
    text.parse().map_err(Error::InvalidConfig)
}

/// Lower to the domain's matrix model, solve in spin space, map back.
fn run_quadratic(
    poly: &hobopt::BinaryPolynomial,
    solve: impl Fn(&hobopt::IsingModel) -> Result<hobopt::solvers::SolveResult>,
) -> Result<(hobopt::Assignment, f64, usize, f64)> {
    match poly.to_solver_model()? {
        SolverModel::Ising(m) => {
            let r = solve(&m)?;
            Ok((r.assignment, r.energy, r.restart_index, r.wall_time.as_secs_f64() * 1e3))
        }
        SolverModel::Qubo(q) => {
            let r = solve(&q.to_ising())?;
            let bits = r.assignment.to_bits();
            let energy = q.energy(&bits)?;
            Ok((bits, energy, r.restart_index, r.wall_time.as_secs_f64() * 1e3))
        }
    }
}

fn solver_for(kind: SolverKind, seed: u64) -> SurrogateSolver {
    match kind {
        SolverKind::Dsb => SurrogateSolver::Dsb(dsb::DsbConfig {
            seed,
            ..dsb::DsbConfig::default()
        }),
        SolverKind::Sa => SurrogateSolver::Sa(sa::SaConfig {
            seed,
            ..sa::SaConfig::default()
        }),
        SolverKind::Exhaustive => SurrogateSolver::Exhaustive,
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => bench::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_hobo(args: HoboArgs) -> Result<()> {
    let poly = read_polynomial_file(&args.poly)?;
    let mut cfg = HoboConfig {
        solver: solver_for(args.solver, args.seed),
        initial_point: InitialPoint::Random { seed: args.seed },
        ..HoboConfig::default()
    };
    if let Some(max_iters) = args.max_iters {
        cfg.max_iters = max_iters;
    }
    let outcome = minimize_hobo(&poly, &cfg)?;

    let mut csv = String::from("iter,surrogate_value,true_value,best_so_far\r\n");
    for (i, row) in outcome.trace.iterations.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{}\r\n",
            i, row.surrogate_value, row.true_value, row.best_so_far
        ));
    }
    write_or_print(args.out.as_deref(), &csv)?;
    eprintln!("best value {} at {:?}", outcome.value, outcome.assignment.values());
    Ok(())
}

fn cmd_quadratize(args: QuadratizeArgs) -> Result<()> {
    let poly = read_polynomial_file(&args.poly)?;
    let result = quadratize(&poly);

    let out_poly = args
        .out_poly
        .unwrap_or_else(|| args.poly.with_extension("quadratic"));
    let out_subs = args
        .out_subs
        .unwrap_or_else(|| args.poly.with_extension("substitutions.json"));
    write_polynomial_file(&result.quadratic, &out_poly)?;

    let subs: Vec<_> = result
        .substitutions
        .iter()
        .map(|s| {
            serde_json::json!({
                "pair": [s.pair.0, s.pair.1],
                "aux": s.aux,
                "M": s.penalty_weight,
            })
        })
        .collect();
    bench::write_text(&out_subs, &serde_json::to_string_pretty(&subs)?)?;

    let quadratic_terms = result
        .quadratic
        .terms()
        .filter(|(key, _)| key.len() == 2)
        .count();
    let linear_terms = result
        .quadratic
        .terms()
        .filter(|(key, _)| key.len() == 1)
        .count();
    println!(
        "variables: {} -> {}; linear terms: {}; quadratic terms: {}; substitutions: {}",
        result.original_num_vars,
        result.quadratic.num_vars(),
        linear_terms,
        quadratic_terms,
        result.substitutions.len()
    );
    println!("wrote {} and {}", out_poly.display(), out_subs.display());
    Ok(())
}

/// "gen:n=14,delta=500,channel=0[,seed=7]" -> a generated instance.
fn parse_generator(arg: &str) -> Result<SwiptInstance> {
    let body = arg.strip_prefix("gen:").ok_or_else(|| {
        Error::InvalidConfig("problem: expected a JSON path or gen:key=value,...".into())
    })?;
    let mut n = None;
    let mut delta = None;
    let mut channel = 0u64;
    let mut seed = 0u64;
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("generator: expected key=value, got {part:?}"))
        })?;
        let bad = |e: String| Error::InvalidConfig(format!("generator {key}: {e}"));
        match key.trim() {
            "n" => n = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "delta" => delta = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            "channel" => channel = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "seed" => seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            other => return Err(Error::InvalidConfig(format!("generator: unknown key {other:?}"))),
        }
    }
    let scenario = ScenarioConfig {
        n_elements: n.ok_or_else(|| Error::InvalidConfig("generator: n is required".into()))?,
        delta_uw: delta.ok_or_else(|| Error::InvalidConfig("generator: delta is required".into()))?,
        seed,
        ..ScenarioConfig::default()
    };
    let ch = sample_channel(&scenario, channel)?;
    build_instance(&scenario, &ch)
}

fn load_problem(arg: &str) -> Result<SwiptInstance> {
    if arg.starts_with("gen:") {
        return parse_generator(arg);
    }
    let text = std::fs::read_to_string(arg)?;
    let inst: SwiptInstance = serde_json::from_str(&text)?;
    Ok(inst)
}

fn cmd_alm(args: AlmArgs) -> Result<()> {
    let inst = load_problem(&args.problem)?;
    let problem: ConstrainedProblem = inst.to_constrained_problem()?;

    let mut cfg = AlmConfig {
        inner: HoboConfig {
            solver: solver_for(args.inner_solver, args.seed),
            initial_point: InitialPoint::Random { seed: args.seed },
            ..HoboConfig::default()
        },
        ..AlmConfig::default()
    };
    cfg.inner_route = match args.inner_route.as_str() {
        "taylor" => InnerRoute::Hobo,
        "quadratize" => InnerRoute::Quadratize,
        other => {
            return Err(Error::InvalidConfig(format!(
                "inner_route: expected taylor or quadratize, got {other:?}"
            )))
        }
    };
    if let Some(lambda0) = args.lambda0 {
        cfg.lambda0 = lambda0;
    }
    if let Some(mu0) = args.mu0 {
        cfg.mu0 = mu0;
    }
    if let Some(rho) = args.rho {
        cfg.rho = rho;
    }
    if let Some(min_iters) = args.min_iters {
        cfg.min_iters = min_iters;
    }
    if let Some(max_iters) = args.max_iters {
        cfg.max_iters = max_iters;
    }

    let outcome = solve_alm(&problem, &cfg)?;

    let mut csv = String::from("iter,lambda,mu,v,g_value,objective,feasible,best_so_far\r\n");
    for row in &outcome.trace {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\r\n",
            row.iteration,
            row.lambdas[0],
            row.mu,
            row.vs[0],
            row.constraint_values[0],
            row.objective,
            row.feasible,
            row.best_so_far.map(|b| b.to_string()).unwrap_or_default()
        ));
    }
    write_or_print(args.out.as_deref(), &csv)?;

    match &outcome.best_feasible {
        Some((x, value)) => eprintln!("best feasible objective {value} at {:?}", x.values()),
        None => eprintln!("infeasible; smallest violation {}", outcome.min_violation),
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let scenario = ScenarioConfig {
        n_elements: args.n,
        delta_uw: args.delta,
        seed: args.seed,
        ..ScenarioConfig::default()
    };
    std::fs::create_dir_all(&args.out)?;
    for channel in 0..args.channels as u64 {
        let ch = sample_channel(&scenario, channel)?;
        let inst = build_instance(&scenario, &ch)?;
        let path = args
            .out
            .join(format!("instance_n{}_d{}_ch{}.json", args.n, args.delta, channel));
        bench::write_text(&path, &serde_json::to_string_pretty(&inst)?)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| Error::InvalidConfig(format!("{what}: {e}")))
        })
        .collect()
}

fn experiment_config(args: &BenchArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => bench::parse_config_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = &args.n {
        cfg.ns = parse_list(n, "n")?;
    }
    if let Some(delta) = &args.delta {
        cfg.deltas_uw = parse_list(delta, "delta")?;
    }
    if let Some(channels) = args.channels {
        cfg.channels = channels;
    }
    if let Some(schemes) = &args.schemes {
        cfg.schemes = schemes
            .split(',')
            .map(|s| s.trim().parse::<Scheme>())
            .collect::<Result<_>>()?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    if let Some(screen_delta) = args.screen_delta {
        cfg.screen_delta_uw = Some(screen_delta);
    }
    Ok(cfg)
}

fn cmd_bench(cmd: BenchCommand) -> Result<()> {
    match cmd {
        BenchCommand::SweepN(args) | BenchCommand::SweepDelta(args) => {
            let cfg = experiment_config(&args)?;
            let outcome = run_sweep(&cfg)?;
            bench::write_outputs(&cfg, &outcome, &args.out)?;
            for s in &outcome.summaries {
                println!(
                    "{} n={} delta={} feasibility {:.3} mean relative snr {}",
                    s.scheme,
                    s.n,
                    s.delta_uw,
                    s.feasibility_rate,
                    s.mean_relative_snr
                        .map(|v| format!("{v:.4}"))
                        .unwrap_or_else(|| "-".into()),
                );
            }
            println!("wrote {}", args.out.display());
            Ok(())
        }
        BenchCommand::Timing(args) => {
            let mut cfg = experiment_config(&args)?;
            cfg.relative_metrics = false;
            let rows = run_timing(&cfg)?;
            bench::write_text(&args.out.join("timing.csv"), &bench::timing_table_csv(&rows))?;
            println!("wrote {}", args.out.join("timing.csv").display());
            Ok(())
        }
        BenchCommand::Converge(args) => {
            let cfg = experiment_config(&args)?;
            let rows = run_convergence(&cfg)?;
            bench::write_text(
                &args.out.join("convergence.csv"),
                &bench::convergence_csv(&rows),
            )?;
            println!("wrote {}", args.out.join("convergence.csv").display());
            Ok(())
        }
    }
}
