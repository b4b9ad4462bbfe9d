//! `shadowlab` command line.
//!
//! Exit codes: 0 pass or found, 1 a legitimate negative (check failed, no
//! shadowing point), 2 bad usage or configuration.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use shadowlab_core::conditions::{
    check_condition1, check_condition2, check_derivative_conditions, check_monomial_admissibility, check_w_condition,
    compute_alpha, estimate_condition_d, find_smallness_neighborhood, pattern_witness, Admissibility, CheckParams,
};
use shadowlab_core::pseudo::{generate, generate_adversarial, ErrorModel, Pseudotrajectory, Push};
use shadowlab_core::scaling::ScalingConfig;
use shadowlab_core::solver::{
    shadow_1d_constructive, shadow_2d_search, shadow_auto, shadow_decoupled, shadow_weighted, SearchOptions, DEFAULT_N,
};
use shadowlab_core::{LyapunovPair, MapSpec, Monomial, Neighborhood, Point, Point2};

use crate::io::{read_json, read_spec, read_trajectory_csv, write_json, write_scaling_csv, write_trajectory_csv};
use crate::manifest::RunManifest;
use crate::parallel;

#[derive(Debug, Parser, Serialize)]
#[command(name = "shadowlab", version, about = "Finite shadowing near nonhyperbolic fixed points")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Sample one of the condition checks.
    Check(CheckArgs),
    /// Build a pseudotrajectory and look for a shadowing point.
    Shadow(ShadowArgs),
    /// Measure d_max(ε) and fit d = c·ε^p.
    Scaling(ScalingArgs),
    /// Write a pseudotrajectory only.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ConditionKind {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "W")]
    W,
    Derivative,
    Monomial,
    Smallness,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum PairArg {
    Box,
    Weighted,
}

impl From<PairArg> for LyapunovPair {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::Box => LyapunovPair::BoxPair,
            PairArg::Weighted => LyapunovPair::WeightedPair,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum PushArg {
    None,
    YUp,
    YDown,
    XOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SolverArg {
    Auto,
    Pullback,
    Decoupled,
    Search,
    Weighted,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub condition: ConditionKind,
    /// Map spec JSON.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long = "A")]
    pub big_a: Option<f64>,
    #[arg(long = "a")]
    pub small_a: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long = "Delta", default_value_t = 2e-3)]
    pub big_delta: f64,
    /// Half-width of the neighborhood K.
    #[arg(long = "K", default_value_t = 0.1)]
    pub k: f64,
    #[arg(long, default_value_t = 256)]
    pub boundary_samples: usize,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 33)]
    pub nu_samples: usize,
    #[arg(long, value_enum, default_value_t = PairArg::Box)]
    pub pair: PairArg,
    /// Center `x,y` for the W battery.
    #[arg(long)]
    pub p: Option<String>,
    /// Target `x,y` for the W battery (default f(p)).
    #[arg(long)]
    pub q: Option<String>,
    /// Exponent m of the saddle for the monomial verdict.
    #[arg(long)]
    pub m: Option<u32>,
    /// Monomial `a,k,l`.
    #[arg(long)]
    pub mono: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Starting point `x` or `x,y`.
    #[arg(long)]
    pub p0: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    /// `exact`, `uniform:d` or `weighted:d`.
    #[arg(long, default_value = "exact")]
    pub model: String,
    #[arg(long, env = "SHADOWLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Half-width of K (default 0.5, or 1 with the axis removed for the skew map).
    #[arg(long = "K")]
    pub k: Option<f64>,
    /// Full-strength errors in a fixed direction instead of random ones.
    #[arg(long, value_enum, default_value_t = PushArg::None)]
    pub push: PushArg,
}

#[derive(Debug, Args, Serialize)]
pub struct ShadowArgs {
    #[command(flatten)]
    pub traj: TrajectoryArgs,
    /// Read the pseudotrajectory from a CSV instead of generating one.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    #[arg(long, value_enum, default_value_t = PairArg::Box)]
    pub pair: PairArg,
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScalingArgs {
    /// Scaling config JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long, env = "SHADOWLAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub traj: TrajectoryArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A negative but valid outcome.
enum Outcome {
    Pass,
    Negative,
}

fn parse_point(s: &str) -> anyhow::Result<Point> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad coordinate {v:?}")))
        .collect::<anyhow::Result<_>>()?;
    match vals[..] {
        [x] => Ok(Point::One(x)),
        [x, y] => Ok(Point::Two(Point2::new(x, y))),
        _ => bail!("a point has one or two coordinates, got {s:?}"),
    }
}

fn parse_point2(s: &str) -> anyhow::Result<Point2> {
    match parse_point(s)? {
        Point::Two(p) => Ok(p),
        Point::One(_) => bail!("expected `x,y`, got {s:?}"),
    }
}

pub fn parse_model(s: &str) -> anyhow::Result<ErrorModel> {
    let (kind, level) = match s.split_once(':') {
        Some((k, d)) => (k, Some(d.parse::<f64>().with_context(|| format!("bad error level in {s:?}"))?)),
        None => (s, None),
    };
    match (kind, level) {
        ("exact", None) => Ok(ErrorModel::Exact),
        ("uniform", Some(d)) => Ok(ErrorModel::Uniform { d }),
        ("weighted", Some(d)) => Ok(ErrorModel::Weighted { d }),
        _ => bail!("model must be exact, uniform:d or weighted:d, got {s:?}"),
    }
}

fn parse_mono(s: &str) -> anyhow::Result<Monomial> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, k, l] = parts[..] else { bail!("monomial must be `a,k,l`, got {s:?}") };
    Ok(Monomial::new(a.parse()?, k.parse()?, l.parse()?))
}

fn require_spec(path: &Option<PathBuf>) -> anyhow::Result<MapSpec> {
    let path = path.as_ref().ok_or_else(|| anyhow!("--spec is required"))?;
    let spec = read_spec(path)?;
    spec.validate()?;
    Ok(spec)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, file: &str) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(dir) = out {
        write_json(&dir.join(file), value)?;
    }
    Ok(())
}

fn prepare_out(out: &Option<PathBuf>) -> anyhow::Result<Option<&Path>> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(out.as_deref())
}

fn finish(
    out: Option<&Path>,
    command: &str,
    config: serde_json::Value,
    seed: u64,
    start: Instant,
) -> anyhow::Result<()> {
    if let Some(dir) = out {
        RunManifest::new(command, config, seed, start.elapsed()).write(dir)?;
    }
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let out = prepare_out(&args.out)?;
    let params = CheckParams {
        delta: args.delta,
        big_delta: args.big_delta,
        boundary_samples: args.boundary_samples,
        grid_per_axis: args.grid,
        nu_samples: args.nu_samples,
        aliasing_guard: false,
    };
    let k = Neighborhood::new(args.k);
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| anyhow!("--{name} is required"));
    let passed = match args.condition {
        ConditionKind::Monomial => {
            let m = args.m.ok_or_else(|| anyhow!("--m is required"))?;
            let mono = parse_mono(args.mono.as_deref().ok_or_else(|| anyhow!("--mono is required"))?)?;
            let verdict = check_monomial_admissibility(m, &mono)?;
            let witness = match verdict {
                Admissibility::Inadmissible(_) => {
                    let spec = MapSpec::PlanarSaddle { n: 1, m, x_terms: vec![], y_terms: vec![mono] };
                    pattern_witness(&spec, &mono, args.k)?
                }
                _ => None,
            };
            emit(&json!({ "m": m, "mono": mono, "result": verdict, "witness": witness }), out, "report.json")?;
            !matches!(verdict, Admissibility::Inadmissible(_))
        }
        ConditionKind::One => {
            let spec = require_spec(&args.spec)?;
            let r = check_condition1(&spec, need(args.big_a, "A")?, need(args.small_a, "a")?, &params)?;
            emit(&r, out, "report.json")?;
            r.passed
        }
        ConditionKind::Smallness => {
            let spec = require_spec(&args.spec)?;
            let MapSpec::Expanding1D { n, .. } = spec else { bail!("smallness needs the one-dimensional family") };
            let alpha = compute_alpha(n)?;
            let start_box = (need(args.big_a, "A")?, need(args.small_a, "a")?);
            let found = find_smallness_neighborhood(&spec, start_box, alpha, 20, &params)?;
            emit(&json!({ "alpha": alpha, "report": found }), out, "report.json")?;
            found.is_some()
        }
        ConditionKind::Two => {
            let r = check_condition2(&require_spec(&args.spec)?, &k, &params)?;
            emit(&r, out, "report.json")?;
            r.passed
        }
        ConditionKind::Derivative => {
            let r = check_derivative_conditions(&require_spec(&args.spec)?, &k, &params)?;
            emit(&r, out, "report.json")?;
            r.passed
        }
        ConditionKind::W => {
            let spec = require_spec(&args.spec)?;
            let map = spec.planar()?;
            let p = parse_point2(args.p.as_deref().ok_or_else(|| anyhow!("--p is required"))?)?;
            let q = match &args.q {
                Some(q) => parse_point2(q)?,
                None => spec.apply2(p),
            };
            let r = check_w_condition(&map, args.pair.into(), p, q, &params)?;
            emit(&r, out, "report.json")?;
            r.passed
        }
        ConditionKind::D => {
            let est = estimate_condition_d(&require_spec(&args.spec)?, args.pair.into(), &k, &params)?;
            emit(&est, out, "report.json")?;
            est.d > 0.0
        }
    };
    finish(out, "check", serde_json::to_value(args)?, 0, start)?;
    Ok(if passed { Outcome::Pass } else { Outcome::Negative })
}

fn build_trajectory(args: &TrajectoryArgs) -> anyhow::Result<(MapSpec, Pseudotrajectory)> {
    let spec = require_spec(&args.spec)?;
    let p0 = parse_point(args.p0.as_deref().ok_or_else(|| anyhow!("--p0 is required"))?)?;
    let model = parse_model(&args.model)?;
    let k = match (args.k, &spec) {
        (Some(a), MapSpec::NonisolatedSkew) => Neighborhood::excluding_axis(a),
        (Some(a), _) => Neighborhood::new(a),
        (None, MapSpec::NonisolatedSkew) => Neighborhood::excluding_axis(1.0),
        (None, _) => Neighborhood::new(0.5),
    };
    let push = match args.push {
        PushArg::None => None,
        PushArg::YUp => Some(Push::PushYUp),
        PushArg::YDown => Some(Push::PushYDown),
        PushArg::XOut => Some(Push::PushXOut),
    };
    let traj = match push {
        None => generate(&spec, p0, args.m, model, &k, args.seed)?,
        Some(push) => generate_adversarial(&spec, p0, args.m, model, &k, push)?,
    };
    Ok((spec, traj))
}

fn write_trajectory_file(dir: &Path, spec: &MapSpec, traj: &Pseudotrajectory) -> anyhow::Result<()> {
    let path = dir.join("trajectory.csv");
    let mut file = std::io::BufWriter::new(fs::File::create(&path).with_context(|| path.display().to_string())?);
    write_trajectory_csv(&mut file, Some(spec), traj)?;
    file.flush()?;
    Ok(())
}

fn cmd_shadow(args: &ShadowArgs) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let out = prepare_out(&args.out)?;
    let (spec, traj) = match &args.input {
        Some(path) => {
            let file = fs::File::open(path).with_context(|| path.display().to_string())?;
            let (header, traj) = read_trajectory_csv(file)?;
            let spec = match (&args.traj.spec, header.spec) {
                (Some(_), _) => require_spec(&args.traj.spec)?,
                (None, Some(s)) => s,
                (None, None) => bail!("--spec is required when the CSV header has no spec"),
            };
            (spec, traj)
        }
        None => build_trajectory(&args.traj)?,
    };
    let opts = SearchOptions { depth: args.depth, ..SearchOptions::default() };
    let eps = args.eps;
    let result = match args.solver {
        SolverArg::Auto => shadow_auto(&spec, &traj, eps, args.pair.into(), &opts)?,
        SolverArg::Pullback => shadow_1d_constructive(&spec, &traj, eps)?,
        SolverArg::Decoupled => shadow_decoupled(&spec, &traj, eps)?,
        SolverArg::Search => shadow_2d_search(&spec, &traj, eps, args.pair.into(), &opts)?,
        SolverArg::Weighted => shadow_weighted(&spec, &traj, eps, DEFAULT_N)?,
    };
    emit(&result, out, "shadow.json")?;
    if let Some(dir) = out {
        write_trajectory_file(dir, &spec, &traj)?;
    }
    finish(out, "shadow", serde_json::to_value(args)?, args.traj.seed, start)?;
    Ok(if result.found { Outcome::Pass } else { Outcome::Negative })
}

fn cmd_scaling(args: &ScalingArgs, threads: Option<usize>) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let mut config: ScalingConfig = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    let out = prepare_out(&args.out)?;
    let result = parallel::run_scaling(&config, threads)?;
    emit(&result, out, "summary.json")?;
    if let Some(dir) = out {
        let path = dir.join("scaling.csv");
        write_scaling_csv(fs::File::create(&path).with_context(|| path.display().to_string())?, &result.rows)?;
    }
    finish(out, "scaling", serde_json::to_value(&config)?, config.seed, start)?;
    Ok(Outcome::Pass)
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let out = prepare_out(&args.out)?;
    let (spec, traj) = build_trajectory(&args.traj)?;
    match out {
        Some(dir) => write_trajectory_file(dir, &spec, &traj)?,
        None => match write_trajectory_csv(std::io::stdout().lock(), Some(&spec), &traj) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        },
    }
    finish(out, "gen", serde_json::to_value(args)?, args.traj.seed, start)?;
    Ok(Outcome::Pass)
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Shadow(a) => cmd_shadow(a),
        Command::Scaling(a) => cmd_scaling(a, cli.threads),
        Command::Gen(a) => cmd_gen(a),
    };
    match outcome {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
