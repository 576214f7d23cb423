use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use delex::config::{ConfigOverrides, PipelineConfig};
use delex::pipeline::{run_stage, PipelineError, Stage};

#[derive(Parser)]
#[command(name = "delex", version, about = "Find downward-entailing operators via NPI contexts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Subcommand)]
enum Command {
    /// Corpus and context counts (stats.json).
    Stats(Common),
    /// Dump every NPI context (contexts.tsv).
    Contexts(Common),
    /// Score candidates (scores_distilled.tsv, scores_undistilled.tsv).
    Score(Common),
    /// Rank from a score dump (ranked_<key>.txt).
    Rank {
        #[command(flatten)]
        common: Common,
        /// Score dump to read; defaults to scores_distilled.tsv in the output directory.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Evaluate a score dump against gold labels and seeds.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// All stages.
    Run(Common),
}

fn resolve(common: Common) -> Result<PipelineConfig, PipelineError> {
    let raw = match &common.config {
        Some(path) => ConfigOverrides::from_file(path)?.overridden_by(common.overrides),
        None => common.overrides,
    };
    Ok(PipelineConfig::resolve(raw)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (stage, common) = match cli.command {
        Command::Stats(c) => (Stage::Stats, c),
        Command::Contexts(c) => (Stage::Contexts, c),
        Command::Score(c) => (Stage::Score, c),
        Command::Rank { common, scores } => (Stage::Rank { scores }, common),
        Command::Eval { common, scores } => (Stage::Eval { scores }, common),
        Command::Run(c) => (Stage::Run, c),
    };
    match resolve(common).and_then(|config| run_stage(&stage, &config)) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("delex: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
