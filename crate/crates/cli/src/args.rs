//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "gvlab",
    version,
    about = "Volterra solves, little Mellin transforms and growth tests for arithmetic weights"
)]
pub struct Cli {
    /// Print the weight, sequence and target catalog, then exit.
    #[arg(long, global = true)]
    pub list: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve A_g(n) = f(n) for n = 1..=N; writes solution.csv and run.json.
    Solve(SolveArgs),
    /// Re-run one of the built-in experiments and check it.
    Reproduce(ReproduceArgs),
    /// Evaluate g* or scan it for zeros.
    #[command(subcommand)]
    Mellin(MellinCommand),
    /// Tabulate a coefficient sequence; writes sequence.csv.
    Sequence(SequenceArgs),
    /// Solve, then run the HLR, fit, bound and anti-HLR diagnostics.
    Analyze(AnalyzeArgs),
    /// Randomized checks of the Dirichlet-convolution kernel.
    Selftest(SelftestArgs),
    /// Same as --list.
    List,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output directory; every file is written inside it.
    #[arg(long, default_value = "gvlab-out")]
    pub out: PathBuf,

    /// Use the binary-float path with this many bits (53 means f64).
    #[arg(long, env = "GVLAB_PRECISION_BITS")]
    pub precision_bits: Option<u32>,

    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Weight id, e.g. ingham, affine:1/2,1/2, gingham:dh (see --list).
    #[arg(long)]
    pub weight: String,

    /// Solve A_g(n) = n^-beta.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "rhs")]
    pub beta: Option<String>,

    /// General right-hand side c*n^e, e.g. n^0.5 or 2*n^-1/3.
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: Option<String>,

    /// Horizon N.
    #[arg(long)]
    pub n: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Also solve on the other precision path and record the disagreement.
    #[arg(long)]
    pub cross_check: bool,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Eq1,
    Thm11,
    Fig1,
    Remark52,
    Tau,
    DhZeros,
    All,
}

impl Target {
    pub const EACH: [Target; 6] = [
        Target::Eq1,
        Target::Thm11,
        Target::Fig1,
        Target::Remark52,
        Target::Tau,
        Target::DhZeros,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Eq1 => "eq1",
            Target::Thm11 => "thm11",
            Target::Fig1 => "fig1",
            Target::Remark52 => "remark52",
            Target::Tau => "tau",
            Target::DhZeros => "dh-zeros",
            Target::All => "all",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    pub target: Target,

    /// Override the target's default horizon.
    #[arg(long)]
    pub n: Option<u64>,

    /// Override the search box of dh-zeros, as re0,re1,im0,im1.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bounds: Option<String>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum MellinCommand {
    /// Values of g* at points or on a grid; writes values.csv.
    Eval(MellinEvalArgs),
    /// Certified zeros of g* in a box; writes zeros.csv.
    Zeros(MellinZerosArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MellinEvalArgs {
    #[arg(long)]
    pub weight: String,

    /// Evaluation points such as -0.5 or 0.5+14.1i; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Vec<String>,

    /// Evaluate on a grid over this box, as re0,re1,im0,im1.
    #[arg(long = "box", allow_hyphen_values = true, requires = "grid")]
    pub bounds: Option<String>,

    /// Grid points per side.
    #[arg(long)]
    pub grid: Option<usize>,

    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct MellinZerosArgs {
    #[arg(long)]
    pub weight: String,

    /// Search box re0,re1,im0,im1.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bounds: String,

    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SequenceArgs {
    /// Sequence id, e.g. liouville, character:4, tau (see --list).
    #[arg(long)]
    pub sequence: String,

    #[arg(long)]
    pub n: u64,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,

    /// ε grid for the HLR test, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,

    /// Exponent e of the bound diagnostic on n^e a(n).
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub exponent: f64,

    /// Fit model: power, log-correction, secondary:ALPHA, power-log:ALPHA, sv-bound:ALPHA.
    #[arg(long, default_value = "power")]
    pub model: String,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Length of the random sequences.
    #[arg(long, default_value_t = 300)]
    pub n: u64,

    #[command(flatten)]
    pub common: Common,
}
