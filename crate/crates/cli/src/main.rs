//! `armga`: mine multi-objective association rules from categorical CSV data.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use armga::ga::DEFAULT_MAX_RULE_ITEMS;
use armga::{ComprehensibilityVariant, Execution};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// A failed command: message for stderr plus the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const DATA: u8 = 2;
    pub const VERIFICATION: u8 = 3;

    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            code: Self::DATA,
            message: message.into(),
        }
    }
}

impl From<armga::Error> for Failure {
    fn from(e: armga::Error) -> Self {
        match e {
            armga::Error::InvalidParameter(_) => Failure::usage(e.to_string()),
            _ => Failure::data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::data(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    WebSessions,
    Zoo,
}

macro_rules! value_enum_from_str {
    ($t:ty) => {
        impl FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, false)
            }
        }
    };
}

value_enum_from_str!(Format);
value_enum_from_str!(Fixture);

/// Rule length bound: a count of at least two, or `none` for unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleBound(pub Option<usize>);

impl Default for RuleBound {
    fn default() -> Self {
        RuleBound(Some(DEFAULT_MAX_RULE_ITEMS))
    }
}

impl FromStr for RuleBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "none" {
            return Ok(RuleBound(None));
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 2 => Ok(RuleBound(Some(n))),
            _ => Err(format!("expected a count of at least 2 or `none`, got `{s}`")),
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct InputArgs {
    /// Flat key=value file; keys are long flag names. Flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV file with a header row of attribute names.
    #[arg(long, conflicts_with = "fixture")]
    pub input: Option<PathBuf>,
    /// Bundled dataset to use instead of --input.
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    /// Single-byte field delimiter [default: ,].
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Cell value treated as missing [default: ?].
    #[arg(long)]
    pub missing_token: Option<String>,
    /// Remove a column before anything else (repeatable).
    #[arg(long, value_name = "ATTR")]
    pub drop_column: Vec<String>,
    /// Bin a numeric column: `attr:b0,b1,...,bn` gives bins [b0,b1) ... [bn-1,bn) (repeatable).
    #[arg(long, value_name = "ATTR:BOUNDS")]
    pub discretize: Vec<String>,
    /// Merge values with fewer than N rows into OTHER: `attr:N` (repeatable).
    #[arg(long, value_name = "ATTR:MIN_ROWS")]
    pub aggregate: Vec<String>,
    /// Merge a domain into at most M contiguous groups: `attr:M` (repeatable).
    #[arg(long, value_name = "ATTR:GROUPS")]
    pub compress: Vec<String>,
    /// Leave out items whose support fraction exceeds this.
    #[arg(long, value_name = "FRACTION")]
    pub drop_items_above: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct MineArgs {
    /// Minimum support fraction in (0, 1] [default: 0.1].
    #[arg(long)]
    pub minsup: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct GaArgs {
    /// [default: 50]
    #[arg(long)]
    pub pop_size: Option<usize>,
    /// [default: 0.5]
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    /// [default: 0.8]
    #[arg(long)]
    pub crossover_rate: Option<f64>,
    /// [default: 20]
    #[arg(long)]
    pub min_generations: Option<usize>,
    /// Stop after this many generations without archive change [default: 10].
    #[arg(long)]
    pub stall_generations: Option<usize>,
    /// Hard cap on generations [default: 100000].
    #[arg(long)]
    pub max_generations: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Most conditions per rule, or `none` [default: 3].
    #[arg(long)]
    pub max_rule_items: Option<RuleBound>,
    /// Share of mutations that add, drop or resize a condition [default: 0.5].
    #[arg(long)]
    pub specialize_generalize_probability: Option<f64>,
    /// Mask operator of generalizing crossover: and | or [default: and].
    #[arg(long)]
    pub generalize_operator: Option<armga::ga::MaskOp>,
    /// Bound on archive size; unbounded when omitted.
    #[arg(long)]
    pub archive_capacity: Option<usize>,
    /// row-count | attribute-count [default: row-count].
    #[arg(long)]
    pub comprehensibility_variant: Option<ComprehensibilityVariant>,
    /// sequential | parallel [default: parallel].
    #[arg(long)]
    pub execution: Option<Execution>,
}

#[derive(Args, Debug, Default)]
pub struct OutputArgs {
    /// [default: table]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report only the best K rules by interestingness, then comprehensibility.
    #[arg(long)]
    pub top_k: Option<usize>,
}

#[derive(Parser, Debug)]
#[command(name = "armga", version, about = "Multi-objective genetic association rule mining")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the 0/1 item matrix; the item catalog goes to stderr or --catalog.
    Binarize {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// List frequent itemsets.
    Mine {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mine: MineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the genetic algorithm and report the archived rules.
    Evolve {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        mine: MineArgs,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Write the full archive here as JSON.
        #[arg(long)]
        archive: Option<PathBuf>,
        /// Write the run manifest here; otherwise it is printed to stderr.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Log one line per generation to stderr.
        #[arg(long)]
        progress: bool,
    },
    /// Check an archive against the exact front of all rules up to the bound.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        archive: PathBuf,
        /// Rule length bound of the exact front [default: the archive's].
        #[arg(long)]
        max_rule_items: Option<RuleBound>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report the rules of a saved archive.
    Report {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        archive: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Binarize { input, catalog } => commands::binarize(&input, catalog.as_deref()),
        Command::Mine { input, mine, output } => commands::mine(&input, &mine, &output),
        Command::Evolve {
            input,
            mine,
            ga,
            output,
            archive,
            manifest,
            progress,
        } => commands::evolve(&input, &mine, &ga, &output, archive.as_deref(), manifest.as_deref(), progress),
        Command::Verify {
            input,
            archive,
            max_rule_items,
            output,
        } => commands::verify(&input, &archive, max_rule_items, &output),
        Command::Report { input, archive, output } => commands::report(&input, &archive, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Failure::USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("armga: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
