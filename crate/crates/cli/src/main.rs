mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use apirec_core::QueryTermMode;
use clap::{Args, Parser, Subcommand};

/// Recommends Java API classes for natural-language code search queries,
/// using an index mined from Q&A posts.
#[derive(Debug, Parser)]
#[command(name = "apirec", version)]
pub struct Cli {
    /// TOML file with defaults for stopwords_path, query_term_mode, delta, gamma and top_k.
    #[arg(long, global = true, env = "RACK_CONFIG")]
    pub config: Option<PathBuf>,

    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a StackExchange Posts.xml dump into corpus JSONL.
    Convert(ConvertArgs),
    /// Build an index directory from corpus JSONL.
    Build(BuildArgs),
    /// Recommend API classes for a query.
    Recommend(RecommendArgs),
    /// Evaluate against a gold set.
    Eval(EvalArgs),
    /// Corpus statistics.
    #[command(subcommand)]
    Stats(StatsCommand),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Posts.xml from a data dump.
    #[arg(long)]
    pub posts: PathBuf,
    /// Output JSONL; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Required question tag.
    #[arg(long, default_value = "java", conflicts_with = "any_tag")]
    pub tag: String,
    /// Keep questions regardless of tag.
    #[arg(long)]
    pub any_tag: bool,
    #[arg(long, default_value_t = 3)]
    pub min_answers: u32,
    /// Keep accepted answers that have no <code> element.
    #[arg(long)]
    pub allow_no_code: bool,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Index directory to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Stop-word file, one word per line.
    #[arg(long, env = "RACK_STOPWORDS_PATH")]
    pub stopwords: Option<PathBuf>,
    /// Only index these class names, one per line.
    #[arg(long)]
    pub whitelist: Option<PathBuf>,
    /// Drop associations seen in fewer documents.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_count: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Candidates taken per keyword.
    #[arg(long, env = "RACK_DELTA")]
    pub delta: Option<usize>,
    /// Keyword pairs need coherence above this to contribute.
    #[arg(long, env = "RACK_GAMMA", allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Stop-word file; should match the one used to build the index.
    #[arg(long, env = "RACK_STOPWORDS_PATH")]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Number of APIs to print.
    #[arg(long, env = "RACK_TOP_K")]
    pub top: Option<usize>,
    /// Query terms kept: all-terms, noun-only, verb-only or noun-and-verb.
    #[arg(long, env = "RACK_QUERY_TERM_MODE")]
    pub terms: Option<QueryTermMode>,
    #[command(flatten)]
    pub rank: RankArgs,
    /// Show the score breakdown.
    #[arg(long)]
    pub explain: bool,
    #[arg(long)]
    pub json: bool,
    /// The query; several words may be given unquoted.
    #[arg(required = true, num_args = 1..)]
    pub query: Vec<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Gold set: query<TAB>Api1,Api2 per line.
    #[arg(long)]
    pub gold: PathBuf,
    /// Cutoffs to report.
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,10", value_parser = clap::value_parser!(usize))]
    pub k: Vec<usize>,
    /// Query term modes to compare; defaults to all four.
    #[arg(long, value_delimiter = ',')]
    pub modes: Vec<QueryTermMode>,
    #[command(flatten)]
    pub rank: RankArgs,
    #[arg(long, conflicts_with = "tsv")]
    pub json: bool,
    /// One row per mode and K.
    #[arg(long)]
    pub tsv: bool,
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// API classes per accepted answer, restricted to a whitelist.
    ApiFreq {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        whitelist: PathBuf,
        /// Count distinct classes instead of occurrences.
        #[arg(long)]
        distinct: bool,
        #[arg(long)]
        json: bool,
    },
    /// Share of each package's classes used in accepted answers.
    Coverage {
        #[arg(long)]
        corpus: PathBuf,
        /// package<TAB>Class1,Class2 per line.
        #[arg(long)]
        packages: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Overlap between search-query keywords and title keywords.
    Keywords {
        #[arg(long)]
        corpus: PathBuf,
        /// Query log: one query per line, optional YYYY-MM-DD<TAB> prefix.
        #[arg(long)]
        queries: PathBuf,
        /// Keep only queries containing one of these terms.
        #[arg(long, value_delimiter = ',')]
        filter: Vec<String>,
        #[arg(long, env = "RACK_STOPWORDS_PATH")]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("apirec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
