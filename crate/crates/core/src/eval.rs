//! Evaluation of ranked candidate lists against gold labels and seed lists.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const REFERENCE_GOLD: &str = include_str!("../data/reference_gold.tsv");
pub const LADUSAW_SEEDS: &str = include_str!("../data/ladusaw_seeds.txt");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("gold line {line}: unknown label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("gold line {line}: expected `token<TAB>LABEL`")]
    MalformedGold { line: usize },
    #[error("no cutoffs requested")]
    NoCutoffs,
    #[error("cutoff {k} is outside 1..={len}")]
    BadCutoff { k: usize, len: usize },
    #[error("seed list is empty")]
    NoSeeds,
    #[error("rankings differ: `{token}` is missing from one of them")]
    RankingMismatch { token: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    DeNd,
    Superlative,
    Comparative,
    Conditional,
    Hard,
    NotDe,
}

impl Label {
    pub const ALL: [Label; 6] = [
        Label::DeNd,
        Label::Superlative,
        Label::Comparative,
        Label::Conditional,
        Label::Hard,
        Label::NotDe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::DeNd => "DE_ND",
            Label::Superlative => "SUPERLATIVE",
            Label::Comparative => "COMPARATIVE",
            Label::Conditional => "CONDITIONAL",
            Label::Hard => "HARD",
            Label::NotDe => "NOT_DE",
        }
    }

    /// Counted as a hit by strict precision.
    pub fn is_success(self) -> bool {
        matches!(
            self,
            Label::DeNd | Label::Superlative | Label::Comparative | Label::Conditional
        )
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL.into_iter().find(|l| l.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldLabels {
    labels: HashMap<String, Label>,
}

impl GoldLabels {
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut labels = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (token, label) = raw
                .split_once('\t')
                .ok_or(EvalError::MalformedGold { line })?;
            let token = token.trim();
            let label = label.trim();
            if token.is_empty() || token.contains(char::is_whitespace) {
                return Err(EvalError::MalformedGold { line });
            }
            let label = label.parse().map_err(|_| EvalError::UnknownLabel {
                line,
                label: label.to_string(),
            })?;
            labels.insert(token.to_lowercase(), label);
        }
        Ok(GoldLabels { labels })
    }

    pub fn bundled() -> Self {
        GoldLabels::parse(REFERENCE_GOLD).expect("bundled gold parses")
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Label)>) -> Self {
        GoldLabels {
            labels: pairs
                .into_iter()
                .map(|(t, l)| (t.to_lowercase(), l))
                .collect(),
        }
    }

    pub fn get(&self, token: &str) -> Option<Label> {
        self.labels.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// One token per line; `#` starts a comment line.
pub fn parse_seeds(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionAtK {
    pub k: usize,
    pub counts: BTreeMap<Label, usize>,
    pub unknown: usize,
    pub strict: f64,
    pub lenient: f64,
}

/// Label tallies over each prefix `ranked[..k]`.
pub fn precision_at_k<S: AsRef<str>>(
    ranked: &[S],
    gold: &GoldLabels,
    ks: &[usize],
) -> Result<Vec<PrecisionAtK>, EvalError> {
    if ks.is_empty() {
        return Err(EvalError::NoCutoffs);
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > ranked.len()) {
        return Err(EvalError::BadCutoff {
            k,
            len: ranked.len(),
        });
    }
    let mut report = Vec::with_capacity(ks.len());
    for &k in ks {
        let mut counts: BTreeMap<Label, usize> = Label::ALL.iter().map(|&l| (l, 0)).collect();
        let mut unknown = 0;
        for token in &ranked[..k] {
            match gold.get(token.as_ref()) {
                Some(label) => *counts.entry(label).or_insert(0) += 1,
                None => unknown += 1,
            }
        }
        let success: usize = counts
            .iter()
            .filter(|(l, _)| l.is_success())
            .map(|(_, n)| n)
            .sum();
        let hard = counts[&Label::Hard];
        report.push(PrecisionAtK {
            k,
            counts,
            unknown,
            strict: success as f64 / k as f64,
            lenient: (success + hard) as f64 / k as f64,
        });
    }
    Ok(report)
}

/// Multiples of 10 up to `max`.
pub fn default_ks(max: usize) -> Vec<usize> {
    (1..=max / 10).map(|i| i * 10).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecallAt {
    pub cutoff: usize,
    pub present: Vec<String>,
    pub absent: Vec<String>,
    /// `None` when no seed was considered.
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecall {
    /// Seeds that are candidates, i.e. appear somewhere in the full ranking.
    pub considered: Vec<String>,
    pub not_considered: Vec<String>,
    pub cutoffs: Vec<SeedRecallAt>,
}

/// `ranked` must be the full ranking over all selected candidates; seeds
/// missing from it did not pass candidate selection and are left out of the
/// denominator.
pub fn seed_recall<S: AsRef<str>>(
    ranked: &[S],
    seeds: &BTreeSet<String>,
    cutoffs: &[usize],
) -> Result<SeedRecall, EvalError> {
    if seeds.is_empty() {
        return Err(EvalError::NoSeeds);
    }
    let position: HashMap<&str, usize> = ranked
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_ref(), i))
        .collect();
    let (considered, not_considered): (Vec<String>, Vec<String>) = seeds
        .iter()
        .cloned()
        .partition(|s| position.contains_key(s.as_str()));
    let cutoffs = cutoffs
        .iter()
        .map(|&cutoff| {
            let (present, absent): (Vec<String>, Vec<String>) = considered
                .iter()
                .cloned()
                .partition(|s| position[s.as_str()] < cutoff);
            let recall = if considered.is_empty() {
                None
            } else {
                Some(present.len() as f64 / considered.len() as f64)
            };
            SeedRecallAt {
                cutoff,
                present,
                absent,
                recall,
            }
        })
        .collect();
    Ok(SeedRecall {
        considered,
        not_considered,
        cutoffs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankShift {
    pub token: String,
    pub undistilled_rank: usize,
    pub distilled_rank: usize,
    /// Positive when distillation moved the token down.
    pub delta: i64,
}

/// Per-token rank movement, in distilled-rank order. Ranks are 1-based.
pub fn rank_shift<S: AsRef<str>>(distilled: &[S], undistilled: &[S]) -> Result<Vec<RankShift>, EvalError> {
    let before: HashMap<&str, usize> = undistilled
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_ref(), i + 1))
        .collect();
    let after: HashMap<&str, usize> = distilled
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_ref(), i + 1))
        .collect();
    if let Some(missing) = before.keys().find(|t| !after.contains_key(*t)) {
        return Err(EvalError::RankingMismatch {
            token: missing.to_string(),
        });
    }
    distilled
        .iter()
        .enumerate()
        .map(|(i, token)| {
            let token = token.as_ref();
            let old = *before.get(token).ok_or_else(|| EvalError::RankingMismatch {
                token: token.to_string(),
            })?;
            Ok(RankShift {
                token: token.to_string(),
                undistilled_rank: old,
                distilled_rank: i + 1,
                delta: (i + 1) as i64 - old as i64,
            })
        })
        .collect()
}

/// Biggest demotions first; ties by token.
pub fn sort_by_demotion(shifts: &mut [RankShift]) {
    shifts.sort_by(|a, b| b.delta.cmp(&a.delta).then_with(|| a.token.cmp(&b.token)));
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub distilled: Vec<PrecisionAtK>,
    pub undistilled: Vec<PrecisionAtK>,
    pub seed_recall: Option<SeedRecall>,
    pub rank_shifts: Vec<RankShift>,
}

/// `k,strict,lenient` rows.
pub fn precision_csv(series: &[PrecisionAtK]) -> String {
    let mut out = String::from("k,strict,lenient\n");
    for p in series {
        let _ = writeln!(out, "{},{},{}", p.k, p.strict, p.lenient);
    }
    out
}
