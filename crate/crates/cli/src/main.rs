//! Command-line front end: dedup, extract, match, eval and the full pipeline.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reliefmatch::{Method, Mode, TweetKind};

#[derive(Parser, Debug)]
#[command(
    name = "reliefmatch",
    version,
    about = "Match resource needs and availabilities in disaster tweets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Event configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Drop near-duplicate tweets from a tweet JSONL file.
    Dedup {
        #[command(flatten)]
        common: Common,
        /// Override the kind label of every tweet.
        #[arg(long, value_parser = parse_kind)]
        kind: Option<TweetKind>,
    },
    /// Extract resources, locations, sources and contacts from annotated tweets.
    Extract {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "proposed")]
        mode: Mode,
    },
    /// Rank availabilities for each need. Record-based methods read extracted
    /// records, text-based methods read annotated tweets.
    Match {
        #[command(flatten)]
        common: Common,
        /// Availability records or annotated tweets.
        #[arg(long)]
        avails: PathBuf,
        #[arg(long, default_value = "P2b")]
        method: Method,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Score a match report against relevance judgments.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        judgments: PathBuf,
    },
    /// Dedup, extract, match and (with judgments) evaluate one annotated corpus.
    /// Writes every intermediate file into the output directory.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "proposed")]
        mode: Mode,
        #[arg(long, default_value = "P2b")]
        method: Method,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        judgments: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<TweetKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "need" => Ok(TweetKind::Need),
        "availability" => Ok(TweetKind::Availability),
        "unlabeled" => Ok(TweetKind::Unlabeled),
        _ => Err(format!("unknown kind {s:?}; expected need, availability or unlabeled")),
    }
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
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
    let outcome = match cli.command {
        Command::Dedup { common, kind } => commands::dedup(&common.config, &common.input, &common.output, kind),
        Command::Extract { common, mode } => commands::extract(&common.config, &common.input, &common.output, mode),
        Command::Match {
            common,
            avails,
            method,
            k,
        } => commands::run_match(&common.config, &common.input, &avails, &common.output, method, k),
        Command::Eval { common, judgments } => {
            commands::eval(&common.config, &common.input, &judgments, &common.output)
        }
        Command::Pipeline {
            common,
            mode,
            method,
            k,
            judgments,
        } => commands::pipeline(
            &common.config,
            &common.input,
            &common.output,
            mode,
            method,
            k,
            judgments.as_deref(),
        ),
    };
    match outcome {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DATA)
        }
    }
}
