//! `pe`: run pure-exploration experiments and emit CSV/JSON results.

mod verify;

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pe_core::{
    emit, run_batch, ExperimentConfig, InstanceSource, OutputPaths, ProblemKind, SamplerKind, StoppingRule, Structure, ThresholdMode,
};

#[derive(Parser)]
#[command(name = "pe", version, about = "Fixed-confidence pure exploration with piece elimination")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of seeded experiments.
    Run(RunArgs),
    /// Check closed forms and compact active sets against the enumeration oracles.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Bai,
    Topm,
    Osi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StructureArg {
    Linear,
    Unstructured,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdArg {
    Heuristic,
    Theory,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, value_enum)]
    structure: StructureArg,
    /// f2_small, f2_large, uns40, example_g or file:<path>.
    #[arg(long)]
    instance: String,
    #[arg(long, value_parser = SamplerKind::from_str)]
    algo: SamplerKind,
    #[arg(long, value_parser = StoppingRule::from_str)]
    stopping: StoppingRule,
    #[arg(long, value_enum, default_value = "off")]
    elim_sampling: OnOff,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Answer size for top-m.
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Gap parameter of the two-dimensional example.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Number of arms, overriding the generator's reference size.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "heuristic")]
    threshold: ThresholdArg,
    /// First reset time of the sampling-side sets (theory mode).
    #[arg(long, default_value_t = 2)]
    tbar0: u64,
    /// Solve the allocation every this many steps (Track-and-Stop).
    #[arg(long, default_value_t = 1)]
    recompute_every: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random cases per problem and structure for the closed forms.
    #[arg(long, default_value_t = 200)]
    cases: usize,
    /// Seeded trajectories per problem for the enumeration oracle.
    #[arg(long, default_value_t = 10)]
    runs: u64,
}

fn instance_source(args: &RunArgs) -> Result<InstanceSource> {
    let src = match args.instance.as_str() {
        "f2_small" => match args.k {
            Some(k) => InstanceSource::F2Small { k, d: 10 },
            None => InstanceSource::f2_small(),
        },
        "f2_large" => match args.k {
            Some(k) => InstanceSource::F2Large { k, d: 20, n_canonical: 10, n_high: 4 },
            None => InstanceSource::f2_large(),
        },
        "uns40" => InstanceSource::Uns40 { k: args.k.unwrap_or(40) },
        "example_g" => InstanceSource::ExampleG { k: args.k.unwrap_or(5), epsilon: args.epsilon },
        other => match other.strip_prefix("file:") {
            Some(path) => InstanceSource::File { path: PathBuf::from(path) },
            None => bail!("unknown instance {other:?}"),
        },
    };
    Ok(src)
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let problem = match args.problem {
        ProblemArg::Bai => ProblemKind::Bai,
        ProblemArg::Topm => ProblemKind::TopM { m: args.m },
        ProblemArg::Osi => ProblemKind::Osi,
    };
    let mut cfg = ExperimentConfig::new(problem, instance_source(args)?, args.algo, args.stopping);
    cfg.elim_sampling = matches!(args.elim_sampling, OnOff::On);
    cfg.delta = args.delta;
    cfg.reps = args.reps;
    cfg.seed = args.seed;
    cfg.tbar0 = args.tbar0;
    cfg.threshold_mode = match args.threshold {
        ThresholdArg::Heuristic => ThresholdMode::Heuristic,
        ThresholdArg::Theory => ThresholdMode::Theory,
    };
    cfg.sampler.recompute_every = args.recompute_every;
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = build_config(&args)?;
    let inst = cfg.build_instance()?;
    let wanted = match args.structure {
        StructureArg::Linear => Structure::Linear,
        StructureArg::Unstructured => Structure::Unstructured,
    };
    if inst.structure() != wanted {
        bail!("instance {} is {}, not {}", args.instance, inst.structure().as_str(), wanted.as_str());
    }
    let (records, summary) = run_batch(&cfg)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    emit(&records, &OutputPaths::in_dir(&args.out))?;
    std::fs::write(args.out.join("config.json"), cfg.to_json())?;
    println!(
        "{} runs: samples {:.1} ± {:.1}, error rate {:.4}, {:.0} ns/iter, {:.1} minimizations, {} capped (config {})",
        summary.runs,
        summary.mean_samples,
        summary.std_samples,
        summary.error_rate,
        summary.mean_per_iter_ns,
        summary.mean_minimizations,
        summary.capped,
        cfg.hash()
    );
    if summary.capped > 0 {
        eprintln!("warning: {} runs hit the step cap of {}", summary.capped, cfg.step_cap);
    }
    Ok(())
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("PE_THREADS") {
        let n: usize = v.parse().with_context(|| format!("PE_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::init();
    init_threads()?;
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Verify(args) => verify::run(args.cases, args.runs),
    }
}
