use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use reversal_bias::lab::{StrategyChoice, DEFAULT_BUDGET, DEFAULT_SAMPLES};
use reversal_bias::{BiasType, Rule, SearchMode};

/// Reversal-bias audits and verification runs for Minimax, Borda and Copeland.
#[derive(Debug, Parser)]
#[command(name = "revbias", version)]
pub struct Cli {
    /// Worker threads for enumeration and sampling (default: all cores).
    #[arg(long, global = true, env = "REVBIAS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit a profile: selections on p and its reversal, thresholds, bias flags.
    Audit(AuditArgs),
    /// Check a grid of (h, n, j) cells against the immunity tables.
    Verify(VerifyArgs),
    /// Majority graph of a profile at a threshold, as JSON and optionally DOT.
    Graph(GraphArgs),
    /// Decide whether two rules agree on every profile of a given shape.
    Compare(CompareArgs),
    /// Search for or construct a Minimax witness and print it as a bundle.
    Witness(WitnessArgs),
    /// Re-audit a witness bundle.
    Certify {
        /// Bundle file, or `-` for stdin.
        bundle: PathBuf,
    },
    /// List or print the built-in profiles.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
    /// Print the minimal, acyclicity and Greenberg thresholds for a grid.
    Thresholds(ThresholdArgs),
}

#[derive(Debug, Args)]
pub struct ProfileSource {
    /// Profile file (rows = ranks, columns = voters), or `-` for stdin.
    #[arg(required_unless_present = "fixture")]
    pub file: Option<PathBuf>,

    /// Use a built-in profile instead of a file.
    #[arg(long, conflicts_with = "file")]
    pub fixture: Option<String>,

    /// Parameter of a parameterized fixture.
    #[arg(long, requires = "fixture")]
    pub param: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub source: ProfileSource,

    /// Rules to audit.
    #[arg(long, value_delimiter = ',', default_values_t = Rule::ALL)]
    pub rules: Vec<Rule>,

    /// Also summarize the majority graphs at these thresholds.
    #[arg(long = "mu", value_delimiter = ',')]
    pub mus: Vec<usize>,

    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Voter counts, e.g. `2..4`, `7` or `2,5,9`.
    #[arg(long = "h", value_parser = parse_list)]
    pub hs: List,

    /// Alternative counts.
    #[arg(long = "n", value_parser = parse_list)]
    pub ns: List,

    /// Bias types.
    #[arg(long = "j", value_parser = parse_list, default_value = "1..3")]
    pub js: List,

    #[arg(long, default_value_t = StrategyChoice::Auto)]
    pub strategy: StrategyChoice,

    /// Largest enumeration space scanned exhaustively.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    /// Profiles drawn per sampled cell.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,

    #[arg(long, default_value_t = reversal_bias::SearchStrategy::DEFAULT_SEED)]
    pub seed: u64,

    /// Enumerate all anonymous profiles instead of fixing the first voter.
    #[arg(long)]
    pub no_neutral: bool,

    /// Lift the exhaustive budget so that large cells such as (5, 5) are certified.
    #[arg(long)]
    pub long_run: bool,

    /// Attach wall-clock seconds to each cell.
    #[arg(long)]
    pub timing: bool,

    #[command(flatten)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Format {
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,

    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub source: ProfileSource,

    /// Threshold; defaults to the profile threshold.
    #[arg(long)]
    pub mu: Option<usize>,

    /// Use the reversed profile.
    #[arg(long)]
    pub reversed: bool,

    /// Write the graph in DOT format to this file (`-` for stdout).
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long = "h")]
    pub h: usize,

    #[arg(long = "n")]
    pub n: usize,

    /// The two rules, e.g. `minimax,copeland`.
    #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
    pub rules: Vec<Rule>,

    #[arg(long, default_value_t = SearchMode::Exhaustive)]
    pub strategy: SearchMode,

    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    #[arg(long, default_value_t = reversal_bias::SearchStrategy::DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long = "h")]
    pub h: usize,

    #[arg(long = "n")]
    pub n: usize,

    #[arg(long = "j")]
    pub j: BiasType,

    #[arg(long, default_value_t = SearchMode::Constructive)]
    pub strategy: SearchMode,

    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,

    #[arg(long, default_value_t = reversal_bias::SearchStrategy::DEFAULT_SEED)]
    pub seed: u64,

    /// Enumerate all anonymous profiles instead of fixing the first voter.
    #[arg(long)]
    pub no_neutral: bool,

    /// Write the bundle here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FixturesCommand {
    /// Names and shapes of the built-in profiles.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print one built-in profile in the text format.
    Emit {
        name: String,
        #[arg(long)]
        param: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long = "h", value_parser = parse_list)]
    pub hs: List,

    #[arg(long = "n", value_parser = parse_list)]
    pub ns: List,

    #[command(flatten)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct List(pub Vec<usize>);

/// Parses `a..b` / `a..=b` (inclusive), `a` or a comma list of those.
pub fn parse_list(s: &str) -> Result<List, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a nonnegative integer"))
        };
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(List(out))
}
