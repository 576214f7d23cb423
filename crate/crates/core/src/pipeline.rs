//! End-to-end pipeline: corpus analysis, scoring, ranking and evaluation, and
//! the artifact files each stage writes.
//!
//! Every stage builds all of its outputs in memory before anything touches the
//! output directory, so a failing run leaves no partial artifacts behind.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, DataSource, PipelineConfig};
use crate::context::{analyze_sentence, write_context_dump, ExtractedContext};
use crate::eval::{
    self, parse_seeds, precision_csv, rank_shift, EvalError, EvalReport, GoldLabels, LADUSAW_SEEDS,
    REFERENCE_GOLD,
};
use crate::ingest::{self, lines, read_corpus_bytes, tokenize_line, CorpusStats, IngestError, TokenizerMode};
use crate::lexicon::{parse_blocklist, LexiconError, NpiLexicon, DEFAULT_BLOCKLIST, DEFAULT_NPI_LEXICON};
use crate::scorer::{
    self, accumulate_counts, read_score_dump, select_candidates, undistilled_scores,
    write_score_dump, ContextDenominator, CountTable, DumpParseError, RankedEntry, RankingKey,
    ScoreError, ScoreTable,
};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_EMPTY: i32 = 4;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Lexicon { path: PathBuf, source: LexiconError },
    #[error("{}: {source}", path.display())]
    Gold { path: PathBuf, source: EvalError },
    #[error("{}: {source}", path.display())]
    ScoreDump { path: PathBuf, source: DumpParseError },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_)
            | PipelineError::Lexicon { .. }
            | PipelineError::Gold { .. }
            | PipelineError::ScoreDump { .. } => EXIT_CONFIG,
            PipelineError::Read { .. } | PipelineError::Write { .. } | PipelineError::Ingest(_) => {
                EXIT_IO
            }
            PipelineError::Score(ScoreError::NoRetainedContexts) => EXIT_EMPTY,
            PipelineError::Score(_) | PipelineError::Eval(_) => 1,
        }
    }
}

/// NPI contexts and token counts gathered from a corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusAnalysis {
    pub stats: CorpusStats,
    pub npi_matches: u64,
    /// Sorted by (sentence, start, end).
    pub contexts: Vec<ExtractedContext>,
}

impl CorpusAnalysis {
    pub fn retained(&self) -> impl Iterator<Item = &ExtractedContext> {
        self.contexts.iter().filter(|c| c.retained())
    }

    pub fn retained_count(&self) -> usize {
        self.retained().count()
    }
}

struct ShardResult {
    stats: CorpusStats,
    npi_matches: u64,
    contexts: Vec<ExtractedContext>,
}

fn analyze_shard(data: &[u8], mode: TokenizerMode, lexicon: &NpiLexicon) -> Result<ShardResult, IngestError> {
    let mut result = ShardResult {
        stats: CorpusStats::default(),
        npi_matches: 0,
        contexts: Vec::new(),
    };
    for line in lines(data) {
        let tokens = tokenize_line(line?.text, mode);
        if tokens.is_empty() {
            continue;
        }
        let sentence = ingest::Sentence::new(result.stats.sentence_count as usize, tokens);
        let (matches, contexts) = analyze_sentence(&sentence, lexicon);
        result.npi_matches += matches as u64;
        result.contexts.extend(contexts);
        result.stats.add_sentence(&sentence.tokens);
    }
    Ok(result)
}

/// Analyzes `data` split into `shards` line-aligned pieces processed in
/// parallel. The result does not depend on the shard count.
pub fn analyze_corpus(
    data: &[u8],
    mode: TokenizerMode,
    lexicon: &NpiLexicon,
    shards: usize,
) -> Result<CorpusAnalysis, IngestError> {
    let ranges = ingest::shard_ranges(data, shards);
    let results: Vec<Result<ShardResult, IngestError>> = ranges
        .par_iter()
        .map(|r| analyze_shard(&data[r.clone()], mode, lexicon))
        .collect();

    let mut analysis = CorpusAnalysis::default();
    for (range, result) in ranges.iter().zip(results) {
        let shard = result.map_err(|e| match e {
            IngestError::InvalidUtf8 { line } => IngestError::InvalidUtf8 {
                line: line + data[..range.start].iter().filter(|&&b| b == b'\n').count(),
            },
            other => other,
        })?;
        let offset = analysis.stats.sentence_count as usize;
        analysis.npi_matches += shard.npi_matches;
        analysis.contexts.extend(shard.contexts.into_iter().map(|mut c| {
            c.context.sentence_id += offset;
            c.context.trigger.sentence_id += offset;
            c
        }));
        analysis.stats.merge(shard.stats);
    }
    analysis.contexts.sort_by_key(|c| c.context.key());
    Ok(analysis)
}

pub fn analyze_text(text: &str, mode: TokenizerMode, lexicon: &NpiLexicon) -> CorpusAnalysis {
    analyze_corpus(text.as_bytes(), mode, lexicon, 1).expect("str input is valid UTF-8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoringParams {
    pub min_corpus: u64,
    pub min_ctx: u64,
    pub ctx_denominator: ContextDenominator,
    pub winner_takes_all: bool,
}

impl Default for ScoringParams {
    fn default() -> Self {
        ScoringParams {
            min_corpus: crate::config::DEFAULT_MIN_CORPUS,
            min_ctx: crate::config::DEFAULT_MIN_CTX,
            ctx_denominator: ContextDenominator::Retained,
            winner_takes_all: false,
        }
    }
}

impl ScoringParams {
    pub fn with_thresholds(min_corpus: u64, min_ctx: u64) -> Self {
        ScoringParams {
            min_corpus,
            min_ctx,
            ..ScoringParams::default()
        }
    }

    fn from_config(config: &PipelineConfig) -> Self {
        ScoringParams {
            min_corpus: config.min_corpus,
            min_ctx: config.min_ctx,
            ctx_denominator: config.ctx_denominator,
            winner_takes_all: config.winner_takes_all,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCorpus {
    pub counts: CountTable,
    pub scores: ScoreTable,
    pub distilled: Vec<RankedEntry>,
    pub undistilled: Vec<RankedEntry>,
}

impl ScoredCorpus {
    pub fn ranking(&self, key: RankingKey) -> &[RankedEntry] {
        match key {
            RankingKey::Distilled => &self.distilled,
            RankingKey::Undistilled => &self.undistilled,
        }
    }

    pub fn tokens(&self, key: RankingKey) -> Vec<String> {
        self.ranking(key).iter().map(|e| e.token.clone()).collect()
    }
}

pub fn score_analysis(analysis: &CorpusAnalysis, params: &ScoringParams) -> Result<ScoredCorpus, ScoreError> {
    let counts = accumulate_counts(&analysis.stats, &analysis.contexts, params.ctx_denominator);
    if counts.retained_contexts == 0 {
        return Err(ScoreError::NoRetainedContexts);
    }
    let candidates = select_candidates(&counts, params.min_corpus, params.min_ctx);
    let undistilled = undistilled_scores(&counts, &candidates)?;
    let scores = if params.winner_takes_all {
        scorer::winner_takes_all(&undistilled, analysis.retained())
    } else {
        scorer::distill(&undistilled, analysis.retained())
    };
    let distilled_rank = scorer::rank(&scores, RankingKey::Distilled, usize::MAX)?;
    let undistilled_rank = scorer::rank(&scores, RankingKey::Undistilled, usize::MAX)?;
    Ok(ScoredCorpus {
        counts,
        scores,
        distilled: distilled_rank,
        undistilled: undistilled_rank,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsSummary {
    pub sentences: u64,
    pub tokens: u64,
    pub types: usize,
    pub npi_matches: u64,
    pub npi_contexts: usize,
    pub retained_contexts: usize,
    pub discarded_contexts: usize,
    pub retained_context_tokens: u64,
}

impl StatsSummary {
    pub fn of(analysis: &CorpusAnalysis) -> Self {
        let retained = analysis.retained_count();
        StatsSummary {
            sentences: analysis.stats.sentence_count,
            tokens: analysis.stats.token_count,
            types: analysis.stats.type_counts.len(),
            npi_matches: analysis.npi_matches,
            npi_contexts: analysis.contexts.len(),
            retained_contexts: retained,
            discarded_contexts: analysis.contexts.len() - retained,
            retained_context_tokens: analysis.retained().map(|c| c.span.len() as u64).sum(),
        }
    }
}

/// Cutoffs used for seed recall: the precision cutoffs plus 150 and 300.
fn recall_cutoffs(ks: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = ks.iter().copied().chain([150, 300]).collect();
    set.into_iter().collect()
}

pub fn evaluate(
    distilled: &[String],
    undistilled: &[String],
    gold: Option<&GoldLabels>,
    seeds: Option<&BTreeSet<String>>,
    ks: &[usize],
    recall_key: RankingKey,
) -> Result<EvalReport, EvalError> {
    let usable: Vec<usize> = ks.iter().copied().filter(|&k| k <= distilled.len()).collect();
    let series = |ranked: &[String]| -> Result<_, EvalError> {
        match gold {
            Some(gold) if !usable.is_empty() => eval::precision_at_k(ranked, gold, &usable),
            _ => Ok(Vec::new()),
        }
    };
    let recall_ranking = match recall_key {
        RankingKey::Distilled => distilled,
        RankingKey::Undistilled => undistilled,
    };
    let seed_recall = match seeds {
        Some(seeds) => Some(eval::seed_recall(recall_ranking, seeds, &recall_cutoffs(ks))?),
        None => None,
    };
    Ok(EvalReport {
        distilled: series(distilled)?,
        undistilled: series(undistilled)?,
        seed_recall,
        rank_shifts: rank_shift(distilled, undistilled)?,
    })
}

/// An output file: name relative to the output directory, and contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn new(name: impl Into<String>, contents: String) -> Self {
        Artifact {
            name: name.into(),
            contents,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stage {
    Stats,
    Contexts,
    Score,
    /// Re-rank from a score dump (default: the distilled dump in the output
    /// directory).
    Rank { scores: Option<PathBuf> },
    /// Evaluate from a score dump.
    Eval { scores: Option<PathBuf> },
    Run,
}

fn read_file(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn load_text(source: &DataSource, bundled: &str) -> Result<(PathBuf, String), PipelineError> {
    match source {
        DataSource::Bundled => Ok((PathBuf::from("<bundled>"), bundled.to_string())),
        DataSource::File(path) => Ok((path.clone(), read_file(path)?)),
    }
}

pub fn load_lexicon(config: &PipelineConfig) -> Result<NpiLexicon, PipelineError> {
    let (block_path, block_text) = load_text(&config.blocklist, DEFAULT_BLOCKLIST)?;
    let blocklist = parse_blocklist(&block_text).map_err(|source| PipelineError::Lexicon {
        path: block_path,
        source,
    })?;
    let (path, text) = load_text(&config.lexicon, DEFAULT_NPI_LEXICON)?;
    NpiLexicon::new(&text, blocklist).map_err(|source| PipelineError::Lexicon { path, source })
}

fn load_gold(config: &PipelineConfig) -> Result<Option<GoldLabels>, PipelineError> {
    let Some(source) = &config.gold else { return Ok(None) };
    let (path, text) = load_text(source, REFERENCE_GOLD)?;
    GoldLabels::parse(&text)
        .map(Some)
        .map_err(|source| PipelineError::Gold { path, source })
}

fn load_seeds(config: &PipelineConfig) -> Result<Option<BTreeSet<String>>, PipelineError> {
    let Some(source) = &config.seeds else { return Ok(None) };
    let (path, text) = load_text(source, LADUSAW_SEEDS)?;
    let seeds = parse_seeds(&text);
    if seeds.is_empty() {
        return Err(PipelineError::Gold {
            path,
            source: EvalError::NoSeeds,
        });
    }
    Ok(Some(seeds))
}

fn analyze_from_config(config: &PipelineConfig, lexicon: &NpiLexicon) -> Result<CorpusAnalysis, PipelineError> {
    let corpus = config
        .corpus
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("no corpus given".into()))?;
    let data = read_corpus_bytes(corpus)?;
    Ok(analyze_corpus(&data, config.tokenizer, lexicon, config.shards)?)
}

fn stats_artifact(analysis: &CorpusAnalysis) -> Artifact {
    let mut json = serde_json::to_string_pretty(&StatsSummary::of(analysis)).expect("plain struct");
    json.push('\n');
    Artifact::new("stats.json", json)
}

fn ranked_list(ranked: &[RankedEntry], top_k: Option<usize>) -> String {
    let mut out = String::new();
    for e in ranked.iter().take(top_k.unwrap_or(usize::MAX)) {
        out.push_str(&format!("{}\t{}\n", e.rank, e.token));
    }
    out
}

fn ranked_artifact(ranked: &[RankedEntry], key: RankingKey, top_k: Option<usize>) -> Artifact {
    Artifact::new(format!("ranked_{}.txt", key.name()), ranked_list(ranked, top_k))
}

fn eval_artifacts(
    config: &PipelineConfig,
    distilled: &[String],
    undistilled: &[String],
) -> Result<Vec<Artifact>, PipelineError> {
    let gold = load_gold(config)?;
    let seeds = load_seeds(config)?;
    if gold.is_none() && seeds.is_none() {
        return Ok(Vec::new());
    }
    let report = evaluate(
        distilled,
        undistilled,
        gold.as_ref(),
        seeds.as_ref(),
        &config.ks,
        config.ranking_key,
    )?;
    let mut json = serde_json::to_string_pretty(&report).expect("plain struct");
    json.push('\n');
    let mut out = vec![Artifact::new("eval_report.json", json)];
    if gold.is_some() {
        out.push(Artifact::new("precision_distilled.csv", precision_csv(&report.distilled)));
        out.push(Artifact::new("precision_undistilled.csv", precision_csv(&report.undistilled)));
    }
    Ok(out)
}

fn dump_path(config: &PipelineConfig, scores: &Option<PathBuf>) -> PathBuf {
    scores
        .clone()
        .unwrap_or_else(|| config.output_dir.join("scores_distilled.tsv"))
}

fn load_dump(path: &Path) -> Result<ScoreTable, PipelineError> {
    read_score_dump(&read_file(path)?).map_err(|source| PipelineError::ScoreDump {
        path: path.to_path_buf(),
        source,
    })
}

/// Computes the outputs of `stage` without writing anything.
pub fn build_artifacts(stage: &Stage, config: &PipelineConfig) -> Result<Vec<Artifact>, PipelineError> {
    match stage {
        Stage::Stats => {
            let lexicon = load_lexicon(config)?;
            let analysis = analyze_from_config(config, &lexicon)?;
            Ok(vec![stats_artifact(&analysis)])
        }
        Stage::Contexts => {
            let lexicon = load_lexicon(config)?;
            let analysis = analyze_from_config(config, &lexicon)?;
            Ok(vec![Artifact::new(
                "contexts.tsv",
                write_context_dump(&analysis.contexts, &lexicon),
            )])
        }
        Stage::Score | Stage::Run => {
            let lexicon = load_lexicon(config)?;
            let analysis = analyze_from_config(config, &lexicon)?;
            let scored = score_analysis(&analysis, &ScoringParams::from_config(config))?;
            let mut out = vec![
                stats_artifact(&analysis),
                Artifact::new("scores_distilled.tsv", write_score_dump(&scored.distilled)),
                Artifact::new("scores_undistilled.tsv", write_score_dump(&scored.undistilled)),
            ];
            if *stage == Stage::Run {
                out.push(Artifact::new(
                    "contexts.tsv",
                    write_context_dump(&analysis.contexts, &lexicon),
                ));
                out.push(ranked_artifact(
                    scored.ranking(config.ranking_key),
                    config.ranking_key,
                    config.top_k,
                ));
                out.extend(eval_artifacts(
                    config,
                    &scored.tokens(RankingKey::Distilled),
                    &scored.tokens(RankingKey::Undistilled),
                )?);
            }
            Ok(out)
        }
        Stage::Rank { scores } => {
            let table = load_dump(&dump_path(config, scores))?;
            let ranked = scorer::rank(&table, config.ranking_key, usize::MAX)?;
            Ok(vec![ranked_artifact(&ranked, config.ranking_key, config.top_k)])
        }
        Stage::Eval { scores } => {
            let table = load_dump(&dump_path(config, scores))?;
            let tokens = |key| -> Result<Vec<String>, PipelineError> {
                Ok(scorer::rank(&table, key, usize::MAX)?
                    .into_iter()
                    .map(|e| e.token)
                    .collect())
            };
            let artifacts = eval_artifacts(
                config,
                &tokens(RankingKey::Distilled)?,
                &tokens(RankingKey::Undistilled)?,
            )?;
            if artifacts.is_empty() {
                return Err(ConfigError::Invalid("eval needs a gold file or a seed list".into()).into());
            }
            Ok(artifacts)
        }
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(dir).map_err(|source| PipelineError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::with_capacity(artifacts.len());
    for artifact in artifacts {
        let path = dir.join(&artifact.name);
        fs::write(&path, &artifact.contents).map_err(|source| PipelineError::Write {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

pub fn run_stage(stage: &Stage, config: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let artifacts = build_artifacts(stage, config)?;
    write_artifacts(&config.output_dir, &artifacts)
}

/// Runs every stage and writes all artifacts.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    run_stage(&Stage::Run, config)
}
