//! Brute-force reference implementation used as a test oracle.
//!
//! Works on whitespace-split lines and recomputes everything by direct
//! summation, without sharing code with the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct OracleLexicon {
    patterns: Vec<Vec<String>>,
    blocklist: BTreeSet<String>,
}

impl OracleLexicon {
    pub fn new(lexicon: &str, blocklist: &str) -> Self {
        let mut patterns = Vec::new();
        for line in lexicon.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut expanded: Vec<Vec<String>> = vec![Vec::new()];
            for position in line.split_whitespace() {
                let mut next = Vec::new();
                for prefix in &expanded {
                    for alt in position.split('/').filter(|a| !a.is_empty()) {
                        let mut p = prefix.clone();
                        p.push(alt.to_string());
                        next.push(p);
                    }
                }
                expanded = next;
            }
            patterns.extend(expanded);
        }
        let blocklist = blocklist
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect();
        OracleLexicon { patterns, blocklist }
    }

    pub fn bundled() -> Self {
        OracleLexicon::new(
            include_str!("../../data/npi_lexicon.txt"),
            include_str!("../../data/blocklist.txt"),
        )
    }

    /// Scan left to right; at each position take the longest pattern that
    /// matches there, then jump past it.
    pub fn matches(&self, tokens: &[&str]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let mut best = 0;
            for p in &self.patterns {
                if p.len() > best
                    && i + p.len() <= tokens.len()
                    && p.iter().zip(&tokens[i..]).all(|(a, b)| a == b)
                {
                    best = p.len();
                }
            }
            if best > 0 {
                out.push((i, i + best));
                i += best;
            } else {
                i += 1;
            }
        }
        out
    }
}

fn is_punct(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

#[derive(Debug, Clone)]
pub struct OracleContext {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub retained: bool,
    pub span_len: usize,
    pub candidates: Vec<String>,
}

pub struct Oracle {
    pub sentences: usize,
    pub tokens: usize,
    pub matches: usize,
    pub contexts: Vec<OracleContext>,
    pub s: BTreeMap<String, f64>,
    pub s_d: BTreeMap<String, f64>,
    pub ctx_count: BTreeMap<String, usize>,
}

impl Oracle {
    pub fn retained(&self) -> usize {
        self.contexts.iter().filter(|c| c.retained).count()
    }

    /// Tokens ordered by distilled score (descending), then context count
    /// (descending), then the token itself.
    pub fn distilled_ranking(&self) -> Vec<String> {
        self.ranking(&self.s_d)
    }

    pub fn undistilled_ranking(&self) -> Vec<String> {
        self.ranking(&self.s)
    }

    fn ranking(&self, key: &BTreeMap<String, f64>) -> Vec<String> {
        let mut tokens: Vec<String> = key.keys().cloned().collect();
        tokens.sort_by(|a, b| {
            key[b]
                .partial_cmp(&key[a])
                .unwrap()
                .then(self.ctx_count[b].cmp(&self.ctx_count[a]))
                .then(a.cmp(b))
        });
        tokens
    }
}

pub fn run_oracle(text: &str, lexicon: &OracleLexicon, min_corpus: usize, min_ctx: usize) -> Oracle {
    let sentences: Vec<Vec<&str>> = text
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(|t| !t.is_empty())
        .collect();

    let mut matches = 0;
    let mut contexts = Vec::new();
    for (id, tokens) in sentences.iter().enumerate() {
        let found = lexicon.matches(tokens);
        matches += found.len();
        for &(npi_start, _) in &found {
            let mut start = npi_start;
            while start > 0 && tokens[start - 1] != "," && tokens[start - 1] != ";" {
                start -= 1;
            }
            if start == npi_start {
                continue;
            }
            let span = &tokens[start..npi_start];
            let retained = !span.iter().any(|t| lexicon.blocklist.contains(*t));
            let mut candidates: Vec<String> = Vec::new();
            for (pos, &t) in tokens.iter().enumerate().take(npi_start).skip(start) {
                let covered = found.iter().any(|&(a, b)| a <= pos && pos < b);
                if !covered && !is_punct(t) && !candidates.iter().any(|c| c == t) {
                    candidates.push(t.to_string());
                }
            }
            contexts.push(OracleContext {
                sentence: id,
                start,
                end: npi_start,
                retained,
                span_len: span.len(),
                candidates,
            });
        }
    }

    let all_tokens: Vec<&str> = sentences.iter().flatten().copied().collect();
    let corpus_tokens = all_tokens.len();
    let ctx_tokens: usize = contexts.iter().filter(|c| c.retained).map(|c| c.span_len).sum();

    // Quadratic recount: every type against every token and every context.
    let types: BTreeSet<String> = contexts
        .iter()
        .filter(|c| c.retained)
        .flat_map(|c| c.candidates.iter().cloned())
        .collect();
    let mut s = BTreeMap::new();
    let mut ctx_count = BTreeMap::new();
    for t in &types {
        let corpus = all_tokens.iter().filter(|x| **x == t).count();
        let in_ctx = contexts
            .iter()
            .filter(|c| c.retained && c.candidates.contains(t))
            .count();
        if corpus > min_corpus && in_ctx > min_ctx {
            let score = (in_ctx as f64 / ctx_tokens as f64) / (corpus as f64 / corpus_tokens as f64);
            s.insert(t.clone(), score);
            ctx_count.insert(t.clone(), in_ctx);
        }
    }

    let mut s_d = BTreeMap::new();
    for (t, &st) in &s {
        let mut sum = 0.0;
        let mut n = 0usize;
        for c in contexts.iter().filter(|c| c.retained && c.candidates.contains(t)) {
            let norm: f64 = c.candidates.iter().filter_map(|x| s.get(x)).sum();
            if norm > 0.0 {
                sum += st / norm;
                n += 1;
            }
        }
        s_d.insert(t.clone(), if n == 0 { 0.0 } else { sum / n as f64 });
    }

    Oracle {
        sentences: sentences.len(),
        tokens: corpus_tokens,
        matches,
        contexts,
        s,
        s_d,
        ctx_count,
    }
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// A random corpus over at most 50 word types, with NPIs, clause breaks and
/// blocklisted operators mixed in.
pub fn mini_corpus(seed: u64) -> String {
    const SPECIAL: &[&str] = &[
        "any", "ever", "yet", "at", "all", "in", "years", "weeks", "long", "be", "not", "few", "no",
        ",", ";",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = rng.gen_range(3..=34);
    let sentences = rng.gen_range(1..=200);
    let mut out = String::new();
    for _ in 0..sentences {
        let len = rng.gen_range(1..=14);
        let tokens: Vec<String> = (0..len)
            .map(|_| {
                if rng.gen_bool(0.25) {
                    SPECIAL[rng.gen_range(0..SPECIAL.len())].to_string()
                } else {
                    format!("w{}", rng.gen_range(0..words))
                }
            })
            .collect();
        out.push_str(&tokens.join(" "));
        out.push_str(" .\n");
    }
    out
}
