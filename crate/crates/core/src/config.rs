//! Pipeline configuration.
//!
//! A config file is flat TOML (`key = value`, no tables). Every key can also
//! be given as a command-line flag, and flags take precedence. Relative paths
//! in a config file are resolved against the file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::eval::default_ks;
use crate::ingest::TokenizerMode;
use crate::scorer::{ContextDenominator, RankingKey};

pub const DEFAULT_MIN_CORPUS: u64 = 150;
pub const DEFAULT_MIN_CTX: u64 = 10;
pub const DEFAULT_OUTPUT_DIR: &str = "delex-out";

/// Settings as written in a config file or on the command line; every field
/// is optional until [`PipelineConfig::resolve`].
#[derive(Debug, Clone, Default, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    /// Corpus file, one sentence per line (`.gz` is decompressed).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// NPI lexicon file, or `bundled`.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Blocklist file, or `bundled`.
    #[arg(long)]
    pub blocklist: Option<PathBuf>,
    /// `pretokenized` or `basic`.
    #[arg(long)]
    pub tokenizer: Option<TokenizerMode>,
    /// Candidates need more than this many corpus occurrences.
    #[arg(long)]
    pub min_corpus: Option<u64>,
    /// Candidates need to occur in more than this many retained contexts.
    #[arg(long)]
    pub min_ctx: Option<u64>,
    /// Where artifacts are written (default `delex-out`).
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// `distilled` or `undistilled`.
    #[arg(long)]
    pub ranking_key: Option<RankingKey>,
    /// Precision cutoffs, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    /// Length of the ranked list; all candidates when unset.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Gold label file, or `bundled`.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Seed list file, or `bundled`.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Number of corpus pieces analyzed in parallel; results do not depend on it.
    #[arg(long)]
    pub shards: Option<usize>,
    /// Re-score by giving each context's budget to its best candidate only.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub winner_takes_all: Option<bool>,
    /// `retained` or `all`.
    #[arg(long)]
    pub ctx_denominator: Option<ContextDenominator>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl ConfigOverrides {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut parsed: ConfigOverrides = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut parsed.corpus,
            &mut parsed.lexicon,
            &mut parsed.blocklist,
            &mut parsed.output_dir,
            &mut parsed.gold,
            &mut parsed.seeds,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() && p.as_os_str() != BUNDLED {
                *p = base.join(&*p);
            }
        }
        Ok(parsed)
    }

    /// Fields set in `flags` replace the ones in `self`.
    pub fn overridden_by(self, flags: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            corpus: flags.corpus.or(self.corpus),
            lexicon: flags.lexicon.or(self.lexicon),
            blocklist: flags.blocklist.or(self.blocklist),
            tokenizer: flags.tokenizer.or(self.tokenizer),
            min_corpus: flags.min_corpus.or(self.min_corpus),
            min_ctx: flags.min_ctx.or(self.min_ctx),
            output_dir: flags.output_dir.or(self.output_dir),
            ranking_key: flags.ranking_key.or(self.ranking_key),
            ks: flags.ks.or(self.ks),
            top_k: flags.top_k.or(self.top_k),
            gold: flags.gold.or(self.gold),
            seeds: flags.seeds.or(self.seeds),
            shards: flags.shards.or(self.shards),
            winner_takes_all: flags.winner_takes_all.or(self.winner_takes_all),
            ctx_denominator: flags.ctx_denominator.or(self.ctx_denominator),
        }
    }
}

const BUNDLED: &str = "bundled";

/// Where a lexicon, blocklist, gold or seed file comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Bundled,
    File(PathBuf),
}

impl DataSource {
    fn from_path(path: PathBuf) -> Self {
        if path.as_os_str() == BUNDLED {
            DataSource::Bundled
        } else {
            DataSource::File(path)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub lexicon: DataSource,
    pub blocklist: DataSource,
    pub tokenizer: TokenizerMode,
    pub min_corpus: u64,
    pub min_ctx: u64,
    pub output_dir: PathBuf,
    pub ranking_key: RankingKey,
    pub ks: Vec<usize>,
    pub top_k: Option<usize>,
    pub gold: Option<DataSource>,
    pub seeds: Option<DataSource>,
    pub shards: usize,
    pub winner_takes_all: bool,
    pub ctx_denominator: ContextDenominator,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: None,
            lexicon: DataSource::Bundled,
            blocklist: DataSource::Bundled,
            tokenizer: TokenizerMode::Pretokenized,
            min_corpus: DEFAULT_MIN_CORPUS,
            min_ctx: DEFAULT_MIN_CTX,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            ranking_key: RankingKey::Distilled,
            ks: default_ks(150),
            top_k: None,
            gold: None,
            seeds: None,
            shards: 1,
            winner_takes_all: false,
            ctx_denominator: ContextDenominator::Retained,
        }
    }
}

impl PipelineConfig {
    pub fn resolve(raw: ConfigOverrides) -> Result<Self, ConfigError> {
        let defaults = PipelineConfig::default();
        let shards = raw.shards.unwrap_or(defaults.shards);
        if shards == 0 {
            return Err(ConfigError::Invalid("shards must be at least 1".into()));
        }
        let ks = raw.ks.unwrap_or(defaults.ks);
        if ks.contains(&0) {
            return Err(ConfigError::Invalid("cutoffs must be positive".into()));
        }
        Ok(PipelineConfig {
            corpus: raw.corpus,
            lexicon: raw.lexicon.map_or(DataSource::Bundled, DataSource::from_path),
            blocklist: raw.blocklist.map_or(DataSource::Bundled, DataSource::from_path),
            tokenizer: raw.tokenizer.unwrap_or(defaults.tokenizer),
            min_corpus: raw.min_corpus.unwrap_or(defaults.min_corpus),
            min_ctx: raw.min_ctx.unwrap_or(defaults.min_ctx),
            output_dir: raw.output_dir.unwrap_or(defaults.output_dir),
            ranking_key: raw.ranking_key.unwrap_or(defaults.ranking_key),
            ks,
            top_k: raw.top_k,
            gold: raw.gold.map(DataSource::from_path),
            seeds: raw.seeds.map(DataSource::from_path),
            shards,
            winner_takes_all: raw.winner_takes_all.unwrap_or(false),
            ctx_denominator: raw.ctx_denominator.unwrap_or(defaults.ctx_denominator),
        })
    }
}
