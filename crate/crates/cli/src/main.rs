use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Debug, Parser)]
#[command(name = "toxnews", version, about = "Nine-class news toxicity pipeline")]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG takes precedence.
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the corpus and feature files; print a coverage table.
    Validate {
        #[arg(long)]
        articles: PathBuf,
        #[arg(long)]
        media: PathBuf,
        /// Feature manifests (`<group>.manifest.json`).
        #[arg(long, num_args = 1..)]
        features: Vec<PathBuf>,
        /// Print the full report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Write the fold-independent native groups (stylometry, media).
    Featurize {
        #[arg(long)]
        articles: PathBuf,
        #[arg(long)]
        media: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the selected setups and write reports plus table3.csv.
    Run(RunArgs),
    /// Write a seeded synthetic corpus with feature files, for trials.
    Synthesize {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        per_class: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write every external group at its standard width.
        #[arg(long)]
        standard_groups: bool,
    },
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// JSON run configuration; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    articles: Option<PathBuf>,
    #[arg(long)]
    media: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    features: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to 42 unless the configuration sets it.
    #[arg(long)]
    seed: Option<u64>,
    /// `all` or ids and ranges, e.g. `1,2-5,14`.
    #[arg(long)]
    setups: Option<String>,
    #[arg(long, value_enum)]
    resample: Option<ResampleArg>,
    #[arg(long, value_enum)]
    classifier: Option<ClassifierArg>,
    /// Run every work unit on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ResampleArg {
    None,
    Random,
    Smote,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Softmax,
    Mlp,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Validate {
            articles,
            media,
            features,
            json,
        } => commands::validate(&articles, &media, &features, json),
        Command::Featurize { articles, media, out } => commands::featurize(&articles, &media, &out),
        Command::Run(args) => commands::run(args),
        Command::Synthesize {
            out,
            per_class,
            seed,
            standard_groups,
        } => commands::synthesize(&out, per_class, seed, standard_groups),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
