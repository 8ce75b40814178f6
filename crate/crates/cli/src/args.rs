use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Lipschitz widths, entropy numbers and network-approximation rate tools.
#[derive(Debug, Parser)]
#[command(name = "lipwidth", version)]
pub struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when omitted or `-`).
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Table format where a command offers both.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified and sampled Lipschitz constants of a network layout.
    Lipbound(LipboundArgs),
    /// Entropy-number brackets of a point set.
    Entropy(EntropyArgs),
    /// Lipschitz-width upper bounds from a parametrized family.
    Width(WidthArgs),
    /// Rate calculus between entropy numbers, widths and network errors.
    Carl {
        #[command(subcommand)]
        command: CarlCommand,
    },
    /// Takagi sums, the networks computing them and their truncation errors.
    Takagi(TakagiArgs),
    /// Run the full experiment suite and emit a JSON report.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Deep,
    Shallow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ActArg {
    Relu,
    Sigmoidal,
}

#[derive(Debug, Args)]
pub struct LipboundArgs {
    #[arg(long, value_enum, default_value_t = RegimeArg::Deep)]
    pub regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = ActArg::Relu)]
    pub act: ActArg,
    /// Input dimension d.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Width W.
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    /// Depth n (ignored for shallow networks).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Parameter bound w.
    #[arg(long, default_value_t = 1.0)]
    pub w: f64,
    /// Lipschitz constant L of the sigmoidal activation (tanh needs L >= 1).
    #[arg(long = "lipschitz", default_value_t = 1.0)]
    pub lipschitz: f64,
    /// Embedding constant c0 for shallow bounds.
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    /// Sampled parameter pairs for the empirical estimate.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Grid nodes per input axis.
    #[arg(long, default_value_t = 17)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exact,
    Greedy,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Point-cloud JSON, or a built-in `sigma:J`, `interval:N`, `takagi:N`.
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 6)]
    pub n_max: u32,
    /// Relative tolerance of continuous searches.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = lipwidth_core::entropy::DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    #[arg(long, default_value_t = lipwidth_core::entropy::DEFAULT_GREEDY_CAP)]
    pub greedy_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Takagi,
    CustomJson,
}

#[derive(Debug, Args)]
pub struct WidthArgs {
    #[arg(long)]
    pub set: String,
    #[arg(long, value_enum, default_value_t = FamilyArg::Takagi)]
    pub family: FamilyArg,
    /// JSON description of a `custom-json` family.
    #[arg(long)]
    pub family_file: Option<PathBuf>,
    /// Parameter dimensions for the Takagi family.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub m: Vec<usize>,
    /// Largest admissible Lipschitz constant; families above it are rejected.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Half-spacing δ of the parameter lattice.
    #[arg(long, default_value_t = 0.05)]
    pub grid_delta: f64,
}

#[derive(Debug, Subcommand)]
pub enum CarlCommand {
    /// `m log2(3γ/δ)` and its ceiling.
    Index {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Deep-network lower bound implied by an entropy rate.
    LowerDeep {
        /// Rate JSON, e.g. {"kind":"poly_log","alpha":1,"beta":0}.
        #[arg(long)]
        rate: String,
        /// Bound-family JSON, e.g. {"kind":"polynomial","c":1,"delta":1}.
        #[arg(long)]
        wfam: String,
        #[arg(long)]
        n: f64,
        /// The product L·W, checked against L W w(n) >= 2.
        #[arg(long, default_value_t = 2.0)]
        lw: f64,
    },
    /// Shallow-network lower bound implied by an entropy rate.
    LowerShallow {
        #[arg(long)]
        rate: String,
        #[arg(long)]
        wfam: String,
        #[arg(long)]
        width: f64,
    },
    /// Entropy rate implied by a width rate when γ_n = 2^{c n^p log2^q n}.
    EntropyFromWidth {
        #[arg(long)]
        rate: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        q: f64,
    },
    /// Entropy rate implied by a network approximation rate.
    EntropyFromNn {
        #[arg(long)]
        rate: String,
        #[arg(long)]
        wfam: String,
        #[arg(long, value_enum)]
        regime: RegimeArg,
    },
    /// Check entropy lower bounds against width upper bounds.
    Consistency {
        /// CSV written by `entropy`.
        #[arg(long)]
        entropy: PathBuf,
        /// CSV written by `width`.
        #[arg(long)]
        widths: PathBuf,
        /// |K|, extending the profile by zeros once 2^n >= |K|.
        #[arg(long)]
        cardinality: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitArg {
    #[value(name = "values.csv")]
    Values,
    #[value(name = "net.json")]
    Net,
    #[value(name = "error-curve.csv")]
    ErrorCurve,
}

#[derive(Debug, Args)]
pub struct TakagiArgs {
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Number of terms.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Uniform grid nodes on [0,1].
    #[arg(long, default_value_t = 4097)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = EmitArg::Values)]
    pub emit: EmitArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    Takagi,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Only the fast criteria.
    #[arg(long)]
    pub quick: bool,
    /// Corrupt one input class on purpose.
    #[arg(long, value_enum)]
    pub inject_fault: Option<FaultArg>,
}
