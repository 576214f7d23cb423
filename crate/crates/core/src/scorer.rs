//! Candidate scoring.
//!
//! The undistilled score of a candidate compares its frequency inside
//! retained NPI contexts (each context counts a type at most once, divided by
//! the number of tokens in retained contexts) against its frequency in the
//! whole corpus:
//!
//! ```text
//! s(c) = (ctx_count(c) / ctx_tokens) / (corpus_count(c) / corpus_tokens)
//! ```
//!
//! Distillation then lets every retained context hand out a budget of 1 to
//! its candidates in proportion to their undistilled scores, and averages the
//! shares a candidate receives over the contexts that contain it:
//!
//! ```text
//! n(p)   = sum of s(c) over candidates c in context p
//! s_d(c) = (sum over contexts p containing c of s(c) / n(p)) / N(c)
//! ```

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::ExtractedContext;
use crate::ingest::CorpusStats;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("no retained NPI contexts")]
    NoRetainedContexts,
    #[error("distilled scores have not been computed")]
    NotDistilled,
}

/// Which token count goes into the in-context frequency denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextDenominator {
    /// Tokens in retained contexts only.
    #[default]
    Retained,
    /// Tokens in every context, including the discarded ones.
    All,
}

impl FromStr for ContextDenominator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "retained" => Ok(ContextDenominator::Retained),
            "all" => Ok(ContextDenominator::All),
            other => Err(format!("unknown context denominator `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountTable {
    pub corpus_count: HashMap<String, u64>,
    pub corpus_tokens: u64,
    pub ctx_count: HashMap<String, u64>,
    pub ctx_tokens: u64,
    pub retained_contexts: u64,
}

impl CountTable {
    pub fn corpus(&self, token: &str) -> u64 {
        self.corpus_count.get(token).copied().unwrap_or(0)
    }

    pub fn ctx(&self, token: &str) -> u64 {
        self.ctx_count.get(token).copied().unwrap_or(0)
    }
}

/// Builds the count table from corpus statistics and NPI contexts. Contexts
/// that are not retained only contribute when `denominator` is
/// [`ContextDenominator::All`], and then only to `ctx_tokens`.
pub fn accumulate_counts<'a, I>(
    stats: &CorpusStats,
    contexts: I,
    denominator: ContextDenominator,
) -> CountTable
where
    I: IntoIterator<Item = &'a ExtractedContext>,
{
    let mut table = CountTable {
        corpus_count: stats.type_counts.clone(),
        corpus_tokens: stats.token_count,
        ..CountTable::default()
    };
    for c in contexts {
        if !c.retained() {
            if denominator == ContextDenominator::All {
                table.ctx_tokens += c.span.len() as u64;
            }
            continue;
        }
        table.retained_contexts += 1;
        table.ctx_tokens += c.span.len() as u64;
        for token in &c.candidates {
            *table.ctx_count.entry(token.clone()).or_insert(0) += 1;
        }
    }
    table
}

/// Candidates seen more than `min_corpus` times in the corpus and in more than
/// `min_ctx` retained contexts.
pub fn select_candidates(table: &CountTable, min_corpus: u64, min_ctx: u64) -> BTreeSet<String> {
    table
        .ctx_count
        .iter()
        .filter(|(token, &n)| n > min_ctx && table.corpus(token) > min_corpus)
        .map(|(token, _)| token.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub s: f64,
    pub s_d: Option<f64>,
    /// Number of retained contexts that took part in distillation for this
    /// candidate.
    pub n_ctx: u64,
    pub corpus_count: u64,
    pub ctx_count: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    pub scores: BTreeMap<String, CandidateScore>,
}

impl ScoreTable {
    pub fn get(&self, token: &str) -> Option<&CandidateScore> {
        self.scores.get(token)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn is_distilled(&self) -> bool {
        self.scores.values().all(|c| c.s_d.is_some())
    }

    /// Multiplies every undistilled score by `factor` and clears distilled
    /// scores.
    pub fn scaled(&self, factor: f64) -> ScoreTable {
        let scores = self
            .scores
            .iter()
            .map(|(t, c)| {
                let mut c = *c;
                c.s *= factor;
                c.s_d = None;
                (t.clone(), c)
            })
            .collect();
        ScoreTable { scores }
    }
}

pub fn undistilled_scores(
    table: &CountTable,
    candidates: &BTreeSet<String>,
) -> Result<ScoreTable, ScoreError> {
    if table.ctx_tokens == 0 || table.corpus_tokens == 0 {
        return Err(ScoreError::NoRetainedContexts);
    }
    let mut scores = BTreeMap::new();
    for token in candidates {
        let ctx_count = table.ctx(token);
        let corpus_count = table.corpus(token);
        // One rounding step on exact integer products, so candidates with
        // the same count ratio get bit-identical scores at any corpus size.
        let s = if ctx_count == 0 || corpus_count == 0 {
            0.0
        } else {
            let num = u128::from(ctx_count) * u128::from(table.corpus_tokens);
            let den = u128::from(corpus_count) * u128::from(table.ctx_tokens);
            num as f64 / den as f64
        };
        scores.insert(
            token.clone(),
            CandidateScore {
                s,
                s_d: None,
                n_ctx: 0,
                corpus_count,
                ctx_count,
            },
        );
    }
    Ok(ScoreTable { scores })
}

/// Candidate sets of the retained contexts restricted to scored candidates.
fn scored_candidate_sets<'s, 'c, I>(scores: &'s ScoreTable, contexts: I) -> Vec<Vec<(&'s str, f64)>>
where
    I: IntoIterator<Item = &'c ExtractedContext>,
{
    contexts
        .into_iter()
        .filter(|c| c.retained())
        .map(|c| {
            c.candidates
                .iter()
                .filter_map(|t| scores.scores.get_key_value(t.as_str()))
                .map(|(t, score)| (t.as_str(), score.s))
                .collect()
        })
        .collect()
}

/// Adds distilled scores. Contexts are visited in the order given, so callers
/// wanting reproducible sums pass them sorted.
pub fn distill<'a, I>(scores: &ScoreTable, contexts: I) -> ScoreTable
where
    I: IntoIterator<Item = &'a ExtractedContext>,
{
    let mut shares: HashMap<&str, (f64, u64)> = HashMap::new();
    for set in scored_candidate_sets(scores, contexts) {
        let norm: f64 = set.iter().map(|(_, s)| s).sum();
        if set.is_empty() || norm <= 0.0 {
            continue;
        }
        for (token, s) in set {
            let entry = shares.entry(token).or_insert((0.0, 0));
            entry.0 += s / norm;
            entry.1 += 1;
        }
    }
    with_shares(scores, &shares)
}

/// Rejected alternative to [`distill`]: each context gives its whole budget to
/// its best candidate (by the ranking order) and nothing to the others.
pub fn winner_takes_all<'a, I>(scores: &ScoreTable, contexts: I) -> ScoreTable
where
    I: IntoIterator<Item = &'a ExtractedContext>,
{
    let mut shares: HashMap<&str, (f64, u64)> = HashMap::new();
    for set in scored_candidate_sets(scores, contexts) {
        let norm: f64 = set.iter().map(|(_, s)| s).sum();
        if set.is_empty() || norm <= 0.0 {
            continue;
        }
        let winner = set
            .iter()
            .min_by(|a, b| compare_entries(scores, a.0, a.1, b.0, b.1))
            .map(|(t, _)| *t);
        for (token, _) in &set {
            let entry = shares.entry(token).or_insert((0.0, 0));
            if Some(*token) == winner {
                entry.0 += 1.0;
            }
            entry.1 += 1;
        }
    }
    with_shares(scores, &shares)
}

fn with_shares(scores: &ScoreTable, shares: &HashMap<&str, (f64, u64)>) -> ScoreTable {
    let scores = scores
        .scores
        .iter()
        .map(|(token, c)| {
            let (sum, n) = shares.get(token.as_str()).copied().unwrap_or((0.0, 0));
            let s_d = if n == 0 { 0.0 } else { sum / n as f64 };
            let mut c = *c;
            c.s_d = Some(s_d);
            c.n_ctx = n;
            (token.clone(), c)
        })
        .collect();
    ScoreTable { scores }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankingKey {
    #[default]
    Distilled,
    Undistilled,
}

impl RankingKey {
    pub fn name(self) -> &'static str {
        match self {
            RankingKey::Distilled => "distilled",
            RankingKey::Undistilled => "undistilled",
        }
    }
}

impl FromStr for RankingKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "distilled" => Ok(RankingKey::Distilled),
            "undistilled" => Ok(RankingKey::Undistilled),
            other => Err(format!("unknown ranking key `{other}`")),
        }
    }
}

// Descending key, then descending context count, then ascending token.
fn compare_entries(scores: &ScoreTable, a: &str, ka: f64, b: &str, kb: f64) -> Ordering {
    let ctx = |t: &str| scores.scores.get(t).map_or(0, |c| c.ctx_count);
    kb.total_cmp(&ka)
        .then_with(|| ctx(b).cmp(&ctx(a)))
        .then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    /// 1-based.
    pub rank: usize,
    pub token: String,
    pub score: CandidateScore,
}

pub fn rank(scores: &ScoreTable, key: RankingKey, k: usize) -> Result<Vec<RankedEntry>, ScoreError> {
    let value = |c: &CandidateScore| match key {
        RankingKey::Distilled => c.s_d.ok_or(ScoreError::NotDistilled),
        RankingKey::Undistilled => Ok(c.s),
    };
    let mut keyed = Vec::with_capacity(scores.len());
    for (token, c) in &scores.scores {
        keyed.push((token.as_str(), value(c)?, c));
    }
    keyed.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| b.2.ctx_count.cmp(&a.2.ctx_count))
            .then_with(|| a.0.cmp(b.0))
    });
    Ok(keyed
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (token, _, c))| RankedEntry {
            rank: i + 1,
            token: token.to_string(),
            score: *c,
        })
        .collect())
}

pub const SCORE_DUMP_HEADER: &str = "rank\ttoken\ts_d\ts\tcorpus_count\tctx_count";

/// Tab-separated score dump in rank order. Floats use the shortest decimal
/// form that reads back to the same value.
pub fn write_score_dump(ranked: &[RankedEntry]) -> String {
    let mut out = String::new();
    out.push_str(SCORE_DUMP_HEADER);
    out.push('\n');
    for e in ranked {
        let s_d = e.score.s_d.map_or_else(|| "NA".to_string(), |v| v.to_string());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.rank, e.token, s_d, e.score.s, e.score.corpus_count, e.score.n_ctx
        );
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("score dump line {line}: {message}")]
pub struct DumpParseError {
    pub line: usize,
    pub message: String,
}

/// Reads a score dump back into a table. The dump's count column becomes both
/// `ctx_count` and `n_ctx`.
pub fn read_score_dump(text: &str) -> Result<ScoreTable, DumpParseError> {
    let mut scores = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let number = i + 1;
        if line.is_empty() || (number == 1 && line == SCORE_DUMP_HEADER) {
            continue;
        }
        let err = |message: &str| DumpParseError {
            line: number,
            message: message.to_string(),
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(err("expected 6 tab-separated fields"));
        }
        let s_d = match fields[2] {
            "NA" => None,
            v => Some(v.parse::<f64>().map_err(|_| err("bad s_d"))?),
        };
        let s = fields[3].parse::<f64>().map_err(|_| err("bad s"))?;
        let corpus_count = fields[4].parse::<u64>().map_err(|_| err("bad corpus_count"))?;
        let ctx_count = fields[5].parse::<u64>().map_err(|_| err("bad ctx_count"))?;
        scores.insert(
            fields[1].to_string(),
            CandidateScore {
                s,
                s_d,
                n_ctx: ctx_count,
                corpus_count,
                ctx_count,
            },
        );
    }
    Ok(ScoreTable { scores })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::NpiContext;
    use crate::lexicon::NpiMatch;
    use proptest::prelude::*;

    fn ctx(id: usize, span: &[&str], retained: bool) -> ExtractedContext {
        let trigger = NpiMatch {
            sentence_id: id,
            start: span.len(),
            end: span.len() + 1,
            pattern: 0,
        };
        ExtractedContext {
            context: NpiContext {
                sentence_id: id,
                start: 0,
                end: span.len(),
                trigger,
                retained,
                excluded: vec![],
            },
            span: span.iter().map(|s| s.to_string()).collect(),
            candidates: span.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn stats(counts: &[(&str, u64)], tokens: u64) -> CorpusStats {
        CorpusStats {
            sentence_count: 1,
            token_count: tokens,
            type_counts: counts.iter().map(|(t, n)| (t.to_string(), *n)).collect(),
        }
    }

    fn table_with(scores: &[(&str, f64, u64)]) -> ScoreTable {
        ScoreTable {
            scores: scores
                .iter()
                .map(|&(t, s, ctx_count)| {
                    (
                        t.to_string(),
                        CandidateScore {
                            s,
                            s_d: None,
                            n_ctx: 0,
                            corpus_count: 1000,
                            ctx_count,
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn accumulate_examples() {
        let table = accumulate_counts(&stats(&[("a", 2)], 10), &[], ContextDenominator::Retained);
        assert!(table.ctx_count.is_empty());
        assert_eq!(table.ctx_tokens, 0);

        let c = ctx(0, &["a", "b", "a"], true);
        let table = accumulate_counts(&stats(&[("a", 5), ("b", 3)], 10), [&c], ContextDenominator::Retained);
        assert_eq!(table.ctx_tokens, 3);
        assert_eq!(table.ctx("a"), 1);
        assert_eq!(table.ctx("b"), 1);
    }

    #[test]
    fn discarded_contexts_only_touch_the_optional_denominator() {
        let contexts = [ctx(0, &["a", "b"], true), ctx(1, &["not", "a", "c"], false)];
        let st = stats(&[("a", 5)], 10);
        let retained = accumulate_counts(&st, &contexts, ContextDenominator::Retained);
        let all = accumulate_counts(&st, &contexts, ContextDenominator::All);
        assert_eq!(retained.ctx_tokens, 2);
        assert_eq!(all.ctx_tokens, 5);
        assert_eq!(all.ctx("a"), 1);
        assert_eq!(all.ctx("not"), 0);
        assert_eq!(all.retained_contexts, 1);
    }

    #[test]
    fn thresholds_are_strict() {
        let mut table = CountTable::default();
        for (t, corpus, ctx) in [("x", 150, 50), ("y", 151, 11), ("z", 151, 10)] {
            table.corpus_count.insert(t.into(), corpus);
            table.ctx_count.insert(t.into(), ctx);
        }
        table.corpus_count.insert("not".into(), 5000);
        let selected: Vec<_> = select_candidates(&table, 150, 10).into_iter().collect();
        assert_eq!(selected, ["y"]);
    }

    #[test]
    fn undistilled_example() {
        let table = CountTable {
            corpus_count: [("c".to_string(), 2), ("absent".to_string(), 4)].into(),
            corpus_tokens: 10,
            ctx_count: [("c".to_string(), 1)].into(),
            ctx_tokens: 4,
            retained_contexts: 1,
        };
        let wanted: BTreeSet<String> = ["c".to_string(), "absent".to_string()].into();
        let scores = undistilled_scores(&table, &wanted).unwrap();
        assert!((scores.get("c").unwrap().s - 1.25).abs() < 1e-15);
        assert_eq!(scores.get("absent").unwrap().s, 0.0);

        let empty = CountTable {
            corpus_tokens: 10,
            ..CountTable::default()
        };
        assert_eq!(
            undistilled_scores(&empty, &wanted).unwrap_err(),
            ScoreError::NoRetainedContexts
        );
    }

    #[test]
    fn duplicated_corpus_keeps_scores() {
        let contexts = [ctx(0, &["a", "b"], true), ctx(1, &["a", "c", "d"], true)];
        let st = stats(&[("a", 4), ("b", 2), ("c", 3), ("d", 9)], 30);
        let once = accumulate_counts(&st, &contexts, ContextDenominator::Retained);
        let mut doubled_stats = st.clone();
        doubled_stats.merge(st.clone());
        let twice_contexts: Vec<_> = contexts.iter().chain(contexts.iter()).collect();
        let twice = accumulate_counts(&doubled_stats, twice_contexts, ContextDenominator::Retained);
        let a = undistilled_scores(&once, &select_candidates(&once, 0, 0)).unwrap();
        let b = undistilled_scores(&twice, &select_candidates(&twice, 1, 1)).unwrap();
        for (t, score) in &a.scores {
            assert!((score.s - b.get(t).unwrap().s).abs() < 1e-12);
        }
    }

    #[test]
    fn distill_examples() {
        let scores = table_with(&[("a", 3.0, 1), ("b", 1.0, 1), ("solo", 0.4, 2)]);
        let contexts = [ctx(0, &["a", "b"], true), ctx(1, &["solo"], true), ctx(2, &["solo"], true)];
        let distilled = distill(&scores, &contexts);
        assert_eq!(distilled.get("a").unwrap().s_d, Some(0.75));
        assert_eq!(distilled.get("b").unwrap().s_d, Some(0.25));
        assert_eq!(distilled.get("solo").unwrap().s_d, Some(1.0));
        assert_eq!(distilled.get("solo").unwrap().n_ctx, 2);
    }

    #[test]
    fn contexts_without_scored_candidates_are_skipped() {
        let scores = table_with(&[("a", 2.0, 1)]);
        let contexts = [
            ctx(0, &["a"], true),
            ctx(1, &["unscored"], true),
            ctx(2, &["a", "x"], false),
        ];
        let distilled = distill(&scores, &contexts);
        let a = distilled.get("a").unwrap();
        assert_eq!((a.s_d, a.n_ctx), (Some(1.0), 1));
    }

    #[test]
    fn piggybacker_scores_below_control() {
        // v only appears next to the stronger d; the control w has the same
        // undistilled score but appears next to weak terms.
        let scores = table_with(&[
            ("d", 4.0, 3),
            ("v", 2.0, 3),
            ("w", 2.0, 3),
            ("f", 0.5, 6),
        ]);
        let contexts = [
            ctx(0, &["v", "d", "f"], true),
            ctx(1, &["v", "d"], true),
            ctx(2, &["v", "d", "f"], true),
            ctx(3, &["w", "f"], true),
            ctx(4, &["w"], true),
            ctx(5, &["w", "f"], true),
        ];
        let distilled = distill(&scores, &contexts);
        // Direct evaluation of the share sums.
        let v = (2.0 / 6.5 + 2.0 / 6.0 + 2.0 / 6.5) / 3.0;
        let w = (2.0 / 2.5 + 1.0 + 2.0 / 2.5) / 3.0;
        let got_v = distilled.get("v").unwrap().s_d.unwrap();
        let got_w = distilled.get("w").unwrap().s_d.unwrap();
        assert!((got_v - v).abs() < 1e-15);
        assert!((got_w - w).abs() < 1e-15);
        assert!(got_v < got_w);
    }

    #[test]
    fn winner_takes_all_rewards_the_top_candidate() {
        let scores = table_with(&[("a", 3.0, 2), ("b", 1.0, 1), ("c", 3.0, 1)]);
        let contexts = [ctx(0, &["a", "b"], true), ctx(1, &["a", "c"], true)];
        let wta = winner_takes_all(&scores, &contexts);
        assert_eq!(wta.get("a").unwrap().s_d, Some(1.0));
        assert_eq!(wta.get("b").unwrap().s_d, Some(0.0));
        assert_eq!(wta.get("c").unwrap().s_d, Some(0.0));
    }

    #[test]
    fn rank_tie_breaks() {
        let mut scores = table_with(&[("a", 0.9, 5), ("b", 0.9, 3), ("c", 0.1, 9)]);
        let ranked = rank(&scores, RankingKey::Undistilled, 3).unwrap();
        let order: Vec<_> = ranked.iter().map(|e| e.token.as_str()).collect();
        assert_eq!(order, ["a", "b", "c"]);
        assert_eq!(ranked[2].rank, 3);

        assert_eq!(rank(&scores, RankingKey::Undistilled, 10).unwrap().len(), 3);
        assert!(rank(&scores, RankingKey::Undistilled, 0).unwrap().is_empty());
        assert_eq!(rank(&scores, RankingKey::Distilled, 2).unwrap_err(), ScoreError::NotDistilled);

        scores.scores.insert("aa".into(), scores.scores["a"]);
        let order: Vec<_> = rank(&scores, RankingKey::Undistilled, 4)
            .unwrap()
            .into_iter()
            .map(|e| e.token)
            .collect();
        assert_eq!(order, ["a", "aa", "b", "c"]);
    }

    #[test]
    fn score_dump_reads_back() {
        let scores = table_with(&[("a", 0.1 + 0.2, 5), ("b", 1.0 / 3.0, 3)]);
        let contexts = [ctx(0, &["a", "b"], true)];
        let distilled = distill(&scores, &contexts);
        let ranked = rank(&distilled, RankingKey::Distilled, usize::MAX).unwrap();
        let dump = write_score_dump(&ranked);
        let back = read_score_dump(&dump).unwrap();
        let again = rank(&back, RankingKey::Distilled, usize::MAX).unwrap();
        assert_eq!(write_score_dump(&again), dump);
        assert!(matches!(read_score_dump("1\ta\tx\t1\t1\t1"), Err(DumpParseError { line: 1, .. })));
    }

    proptest! {
        #[test]
        fn budget_is_conserved_and_bounded(
            raw in proptest::collection::vec(
                proptest::collection::btree_set(0usize..12, 1..6), 1..40),
            weights in proptest::collection::vec(0.01f64..50.0, 12),
            alpha in 0.001f64..1000.0,
            exponent in -20i32..20,
        ) {
            let names: Vec<String> = (0..12).map(|i| format!("t{i}")).collect();
            let scores = ScoreTable {
                scores: names.iter().enumerate().map(|(i, t)| (t.clone(), CandidateScore {
                    s: weights[i], s_d: None, n_ctx: 0, corpus_count: 1, ctx_count: 1,
                })).collect(),
            };
            let contexts: Vec<ExtractedContext> = raw.iter().enumerate().map(|(id, set)| {
                let span: Vec<&str> = set.iter().map(|&i| names[i].as_str()).collect();
                ctx(id, &span, true)
            }).collect();
            let distilled = distill(&scores, &contexts);
            for c in &contexts {
                let norm: f64 = c.candidates.iter().map(|t| scores.scores[t].s).sum();
                let total: f64 = c.candidates.iter().map(|t| scores.scores[t].s / norm).sum();
                prop_assert!((total - 1.0).abs() <= 1e-9);
            }
            for score in distilled.scores.values() {
                let v = score.s_d.unwrap();
                prop_assert!((0.0..=1.0).contains(&v));
            }
            let rescaled = distill(&scores.scaled(alpha), &contexts);
            for (t, score) in &distilled.scores {
                prop_assert!((score.s_d.unwrap() - rescaled.scores[t].s_d.unwrap()).abs() <= 1e-12);
            }
            // Power-of-two factors scale exactly, so the order cannot change.
            let factor = 2f64.powi(exponent);
            let before: Vec<_> = rank(&scores, RankingKey::Undistilled, usize::MAX).unwrap()
                .into_iter().map(|e| e.token).collect();
            let after: Vec<_> = rank(&scores.scaled(factor), RankingKey::Undistilled, usize::MAX).unwrap()
                .into_iter().map(|e| e.token).collect();
            prop_assert_eq!(before, after);
        }
    }
}
