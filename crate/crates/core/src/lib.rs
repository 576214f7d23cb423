//! Unsupervised discovery of downward-entailing operators from a plain-text
//! corpus, using negative polarity items (NPIs) as a signal.
//!
//! A token that shows up unusually often to the left of NPIs such as `any` or
//! `ever` is a candidate operator. Distillation then splits each NPI
//! context's credit among the candidates found in it, which demotes words
//! that only ride along with the real licensor.
//!
//! The stages are [`ingest`], [`lexicon`], [`context`], [`scorer`] and
//! [`eval`]; [`pipeline`] ties them together and [`config`] holds the
//! settings. [`synth`] generates the synthetic fixture corpora.

pub mod config;
pub mod context;
pub mod eval;
pub mod ingest;
pub mod lexicon;
pub mod pipeline;
pub mod scorer;
pub mod synth;

pub use config::{ConfigOverrides, PipelineConfig};
pub use context::{analyze_sentence, ExtractedContext, NpiContext};
pub use eval::{EvalReport, GoldLabels, Label};
pub use ingest::{CorpusStats, Sentence, TokenizerMode};
pub use lexicon::{NpiLexicon, NpiMatch};
pub use pipeline::{analyze_corpus, score_analysis, CorpusAnalysis, ScoredCorpus, ScoringParams};
pub use scorer::{RankedEntry, RankingKey, ScoreTable};
