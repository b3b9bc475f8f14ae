//! `bootperc`: seeded bootstrap percolation experiments with CSV output.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 budget or convergence
//! exhausted, 3 invariant breach.

mod cmd;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bootperc::bounds::BoundError;
use bootperc::engine::{EngineError, ScheduleParseError};
use bootperc::graph::GraphError;
use bootperc::partition::{AuditError, PartitionError};
use bootperc::sampler::EstimateError;

#[derive(Parser, Debug)]
#[command(name = "bootperc", version, about = "Bootstrap percolation experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed for every random choice.
    #[arg(long, env = "BOOTPERC_SEED", default_value_t = 2009, global = true)]
    pub seed: u64,
    /// Worker threads for trial parallelism (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the CSV table here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Append a wall-clock `timestamp` column (unix seconds).
    #[arg(long, global = true)]
    pub timestamp: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Percolation probability over a grid of densities.
    Scan(ScanArgs),
    /// Bisection estimate of the critical probability.
    Pc(PcArgs),
    /// Estimates of p_alpha and p_(1-alpha).
    Window(WindowArgs),
    /// Bound formulas next to their exact or Monte Carlo reference.
    Bounds(BoundsArgs),
    /// Distance partitions with an independent verification.
    Partition(PartitionArgs),
    /// Structural and statistical independence audit of a vertex class.
    Audit(AuditArgs),
    /// Run invariant suites.
    Verify(VerifyArgs),
    /// Sphere-neighbour profile f_1..f_k.
    Profile(ProfileArgs),
    /// Round-by-round counts of a single run.
    Trace(TraceArgs),
}

#[derive(Args, Debug)]
pub struct Model {
    /// Graph spec, e.g. `hypercube:10`, `torus:5^3`, `file:g.adj`.
    #[arg(long)]
    pub graph: String,
    /// `majority`, `constant:<r>` or `bootk:<r>,<k>,<t>`.
    #[arg(long, default_value = "majority")]
    pub rule: String,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: Model,
    /// `lo:hi:step`, or a single density.
    #[arg(long)]
    pub p_grid: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Share uniforms across grid points, making successes monotone in p.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub coupled: bool,
}

#[derive(Args, Debug)]
pub struct Bisection {
    /// Trials per probe before any doubling.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.005)]
    pub tol: f64,
    /// Doublings allowed per probe while the CI still contains the level.
    #[arg(long, default_value_t = bootperc::sampler::MAX_DOUBLINGS)]
    pub max_doublings: u32,
    /// Also write every probe as CSV to this path.
    #[arg(long)]
    pub probe_log: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PcArgs {
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub bisection: Bisection,
}

#[derive(Args, Debug)]
pub struct WindowArgs {
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub bisection: Bisection,
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("mode").required(true).args([
    "theorem1", "sandwich", "layer4", "chernoff", "reverse_chernoff", "small_p", "central", "dreg",
])))]
pub struct BoundsArgs {
    /// Closed-form bracket for the majority p_c of Q_n, for each `--n`.
    #[arg(long, alias = "majority-window")]
    pub theorem1: bool,
    /// Every bound against its oracle for n in 10..=n-max.
    #[arg(long)]
    pub sandwich: bool,
    /// Layered weighted tail with layer sizes `--d`, at `--p`, `--t`.
    #[arg(long)]
    pub layer4: bool,
    /// exp(-2t^2/n) against the exact tail.
    #[arg(long)]
    pub chernoff: bool,
    /// Reverse Chernoff lower bound at p = 1/2 - delta.
    #[arg(long)]
    pub reverse_chernoff: bool,
    /// 2 p^(m/2) against the exact tail.
    #[arg(long)]
    pub small_p: bool,
    /// Lower bound on C(n, n/2 + m).
    #[arg(long)]
    pub central: bool,
    /// Size and smallness conditions for a d-regular graph.
    #[arg(long)]
    pub dreg: bool,

    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 30)]
    pub n_max: u64,
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<u64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = bootperc::bounds::REVERSE_CHERNOFF_N_MIN)]
    pub n_min: u64,
    /// Upper tail (`upper`) or lower tail (`lower`) for `--chernoff`.
    #[arg(long, value_enum, default_value_t = TailSide::Upper)]
    pub side: TailSide,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub lambda_lo: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub lambda_hi: f64,
    /// Monte Carlo samples for the layered tail reference.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Radius k for `--dreg`.
    #[arg(long)]
    pub k: Option<u32>,
    /// ln N for `--dreg`.
    #[arg(long)]
    pub ln_order: Option<f64>,
    /// Profile values f_1..f_k for `--dreg`.
    #[arg(long, value_delimiter = ',')]
    pub f: Vec<u32>,
    #[arg(long)]
    pub omega: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Upper,
    Lower,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionKind {
    /// Greedy colouring of a vertex set by distance > k.
    Greedy,
    /// k-subsets of the sphere S(x,k) of a hypercube, by disjointness.
    HypercubeSphere,
    /// S(x,k) of any regular graph, by distance >= 3.
    GeneralSphere,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_enum)]
    pub kind: PartitionKind,
    #[arg(long)]
    pub k: u32,
    /// Class budget for `greedy`; defaults to the largest ball size.
    #[arg(long)]
    pub m: Option<usize>,
    /// Centre of the sphere.
    #[arg(long, default_value_t = 0)]
    pub x: u64,
    /// Vertices to partition for `greedy` (default: all).
    #[arg(long, value_delimiter = ',')]
    pub vertices: Vec<u64>,
    /// Profile f_1..f_k for `general-sphere` (default: computed exhaustively).
    #[arg(long, value_delimiter = ',')]
    pub profile: Vec<u32>,
    /// Add a `members` column with each class as a space-separated list.
    #[arg(long)]
    pub emit_classes: bool,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[command(flatten)]
    pub model: Model,
    /// Vertices of the class.
    #[arg(long, value_delimiter = ',', required = true)]
    pub class: Vec<u64>,
    /// Round j of the events `y in A^(j)`.
    #[arg(long, default_value_t = 1)]
    pub round: u32,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = ProfileModeArg::Exhaustive)]
    pub mode: ProfileModeArg,
    /// Centres for `sampled` mode.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    #[command(flatten)]
    pub model: Model,
    /// Initial density; the set is trial `--trial` of the seeded sampler.
    #[arg(long, conflicts_with = "initial")]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Explicit initial set.
    #[arg(long, value_delimiter = ',')]
    pub initial: Vec<u64>,
}

/// A message and the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_BREACH: u8 = 3;

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn budget(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BUDGET,
            message: message.into(),
        }
    }

    pub fn breach(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BREACH,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::usage(format!("{}: {e}", path.display()))
    }

    pub fn csv(e: csv::Error) -> Self {
        Self::usage(format!("write failed: {e}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::BudgetExceeded { .. } => Self::budget(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<ScheduleParseError> for Failure {
    fn from(e: ScheduleParseError) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::RoundCap { .. } => Self::breach(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<EstimateError> for Failure {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::Engine(inner) => inner.into(),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<BoundError> for Failure {
    fn from(e: BoundError) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Self {
        match e {
            PartitionError::Graph(inner) => inner.into(),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<AuditError> for Failure {
    fn from(e: AuditError) -> Self {
        match e {
            AuditError::Graph(inner) => inner.into(),
            AuditError::Engine(inner) => inner.into(),
            _ => Self::usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bootperc: {f}");
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(w) = cli.global.workers {
        if w == 0 {
            return Err(Failure::usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Scan(a) => cmd::scan(g, a),
        Command::Pc(a) => cmd::pc(g, a),
        Command::Window(a) => cmd::window(g, a),
        Command::Bounds(a) => cmd::bounds(g, a),
        Command::Partition(a) => cmd::partition(g, a),
        Command::Audit(a) => cmd::audit(g, a),
        Command::Verify(a) => cmd::verify(g, a),
        Command::Profile(a) => cmd::profile(g, a),
        Command::Trace(a) => cmd::trace(g, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seed_flag_parses_after_subcommand() {
        let cli = Cli::try_parse_from([
            "bootperc", "scan", "--graph", "hypercube:4", "--p-grid", "0.1:0.2:0.1", "--seed", "7",
        ])
        .unwrap();
        assert_eq!(cli.global.seed, 7);
        let Command::Scan(a) = cli.command else { panic!() };
        assert!(a.coupled);
    }

    #[test]
    fn bounds_requires_a_mode() {
        assert!(Cli::try_parse_from(["bootperc", "bounds"]).is_err());
        assert!(Cli::try_parse_from(["bootperc", "bounds", "--theorem1", "--n", "100,1000"]).is_ok());
    }
}
