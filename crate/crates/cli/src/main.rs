//! `psps`: scenario simulation, shut-off planning, benchmarking and plots.

mod artifact;
mod commands;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use artifact::{CliResult, RunConfig};

/// Wildfire-aware de-energization planning for transmission networks.
#[derive(Parser)]
#[command(name = "psps", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (default: logical cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output directory; a manifest.json records every run into it.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Optimization backend.
    #[arg(long, global = true, env = "PSPS_SOLVER", default_value = "highs")]
    solver: String,
}

#[derive(Subcommand)]
enum Command {
    /// Sample disruption scenarios with the cellular-automaton simulator.
    Simulate(SimulateArgs),
    /// Solve the two-stage problem by decomposition or in extensive form.
    Solve(SolveArgs),
    /// Evaluate plans out of sample, or run an SAA bound study.
    Evaluate(EvaluateArgs),
    /// Deterministic, wait-and-see, risk-based and robust comparison plans.
    Benchmark(BenchmarkArgs),
    /// Re-solve with shifted no-disruption probability.
    Sensitivity(SensitivityArgs),
    /// Exogenous/endogenous interaction experiment.
    Interact(InteractArgs),
    /// Render SVG figures from plans, studies and reports.
    Plot(PlotArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Case file (TOML).
    #[arg(long)]
    case: PathBuf,

    /// Grid cell edge in metres.
    #[arg(long, default_value_t = psps_core::geo::DEFAULT_CELL_SIZE)]
    cell_size: f64,

    /// Per-cell raster CSV (`col,row,fuel,q0,veg,den,slope`).
    #[arg(long)]
    raster: Option<PathBuf>,

    /// Per-period wind CSV (`period,speed,direction_deg`).
    #[arg(long)]
    wind: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MaskArg {
    Mixed,
    Exo,
    Endo,
}

#[derive(Clone, Copy, ValueEnum)]
enum CutArg {
    Lc,
    Smc,
}

#[derive(Args)]
struct DecompArgs {
    /// Cut family.
    #[arg(long, value_enum, default_value = "smc")]
    cut: CutArg,

    /// Relative optimality gap at which to stop.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,

    /// Slack on the SMC anchor value.
    #[arg(long, default_value_t = 1e-4)]
    delta: f64,

    #[arg(long, default_value_t = 500)]
    max_iterations: usize,

    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Number of scenarios.
    #[arg(long)]
    n: usize,

    /// Fire processes to include.
    #[arg(long, value_enum, default_value = "mixed")]
    mask: MaskArg,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    case: PathBuf,

    /// Scenario file written by `simulate`.
    #[arg(long)]
    scenarios: PathBuf,

    /// Solve the extensive form directly instead of decomposing.
    #[arg(long)]
    extensive: bool,

    /// Resume from a checkpoint file.
    #[arg(long)]
    resume: Option<PathBuf>,

    #[command(flatten)]
    decomp: DecompArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Evaluation scenario file.
    #[arg(long)]
    scenarios: Option<PathBuf>,

    /// Plan files to evaluate; the first is the RRI reference.
    #[arg(long = "plan")]
    plans: Vec<PathBuf>,

    /// Sample sizes of an SAA study (switches to study mode).
    #[arg(long, value_delimiter = ',')]
    saa_sizes: Vec<usize>,

    #[arg(long, default_value_t = 5)]
    replicates: usize,

    /// Size of the common evaluation sample of the SAA study.
    #[arg(long, default_value_t = 500)]
    eval_n: usize,

    #[command(flatten)]
    decomp: DecompArgs,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    case: PathBuf,

    /// In-sample scenario file.
    #[arg(long)]
    scenarios: PathBuf,

    /// Stochastic plan from `solve`, the RRI reference.
    #[arg(long)]
    plan: PathBuf,

    /// Out-of-sample scenario file (default: the in-sample set).
    #[arg(long)]
    eval: Option<PathBuf>,

    /// Risk weights of the risk-based sweep.
    #[arg(long, value_delimiter = ',', default_values_t = psps_core::benchmarks::default_alphas())]
    alphas: Vec<f64>,

    #[arg(long, default_value_t = 100)]
    ro_max_iterations: usize,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long)]
    case: PathBuf,

    /// Base scenario file.
    #[arg(long)]
    scenarios: PathBuf,

    /// Evaluation scenario file (default: the base set).
    #[arg(long)]
    eval: Option<PathBuf>,

    /// Shifts of the no-disruption probability.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    deltas: Vec<f64>,

    #[command(flatten)]
    decomp: DecompArgs,
}

#[derive(Args)]
struct InteractArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Training scenarios per mask.
    #[arg(long, default_value_t = 50)]
    n: usize,

    /// Test scenarios per mask.
    #[arg(long, default_value_t = 500)]
    eval_n: usize,

    #[command(flatten)]
    decomp: DecompArgs,
}

#[derive(Args)]
struct PlotArgs {
    #[command(subcommand)]
    kind: PlotKind,
}

#[derive(Subcommand)]
enum PlotKind {
    /// Network snapshot at one period.
    Network {
        #[arg(long)]
        case: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Period to draw (default: two thirds into the horizon).
        #[arg(long)]
        period: Option<usize>,
    },
    /// Lower/upper bound intervals of an SAA study.
    Ci {
        #[arg(long)]
        study: PathBuf,
    },
    /// Per-scenario costs from one or more report files.
    Scatter {
        #[arg(long = "report", required = true)]
        reports: Vec<PathBuf>,
    },
}

fn execute(cli: &Cli) -> CliResult<()> {
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(artifact::CliError::validation("--threads must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| artifact::CliError::validation(e.to_string()))?;
    let config = |name: &str| RunConfig::new(name, cli.seed, &cli.solver, threads, &cli.out);
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a, config("simulate")),
        Command::Solve(a) => commands::solve(a, config("solve")),
        Command::Evaluate(a) => commands::evaluate(a, config("evaluate")),
        Command::Benchmark(a) => commands::benchmark(a, config("benchmark")),
        Command::Sensitivity(a) => commands::sensitivity(a, config("sensitivity")),
        Command::Interact(a) => commands::interact(a, config("interact")),
        Command::Plot(a) => commands::plot(a, config("plot")),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
