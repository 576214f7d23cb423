//! NPI patterns and the blocklist of well-known downward-entailing operators.
//!
//! Lexicon files hold one entry per line. Tokens are space-separated, and a
//! token may list alternatives separated by `/`, so `in weeks/ages/years`
//! expands to three two-token patterns. Lines starting with `#` are comments.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::ingest::Sentence;

pub const DEFAULT_NPI_LEXICON: &str = include_str!("../data/npi_lexicon.txt");
pub const DEFAULT_BLOCKLIST: &str = include_str!("../data/blocklist.txt");

/// Longest NPI pattern, in tokens.
pub const MAX_PATTERN_TOKENS: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: entry expands to nothing")]
    EmptyExpansion { line: usize },
    #[error("line {line}: pattern has {len} tokens, at most {MAX_PATTERN_TOKENS} allowed")]
    TooLong { line: usize, len: usize },
    #[error("line {line}: blocklist entries must be single tokens")]
    MultiToken { line: usize },
    #[error("lexicon contains no patterns")]
    NoPatterns,
}

/// One lexicon line: a sequence of token positions, each with one or more
/// alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub line: usize,
    pub positions: Vec<Vec<String>>,
}

impl LexiconEntry {
    /// The entry in file syntax.
    pub fn source(&self) -> String {
        self.positions
            .iter()
            .map(|alts| alts.join("/"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Every token sequence obtained by choosing one alternative per position.
    pub fn expand(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = vec![Vec::new()];
        for alts in &self.positions {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    alts.iter().map(move |alt| {
                        let mut next = prefix.clone();
                        next.push(alt.clone());
                        next
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NpiPattern {
    pub tokens: Vec<String>,
    /// Text of the lexicon entry the pattern was expanded from.
    pub source: String,
}

impl NpiPattern {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NpiMatch {
    pub sentence_id: usize,
    pub start: usize,
    pub end: usize,
    /// Index into [`NpiLexicon::patterns`].
    pub pattern: usize,
}

#[derive(Debug, Default, Clone)]
struct TrieNode {
    children: HashMap<String, usize>,
    pattern: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct NpiLexicon {
    entries: Vec<LexiconEntry>,
    patterns: Vec<NpiPattern>,
    blocklist: BTreeSet<String>,
    trie: Vec<TrieNode>,
}

impl PartialEq for NpiLexicon {
    fn eq(&self, other: &Self) -> bool {
        self.patterns == other.patterns && self.blocklist == other.blocklist
    }
}

fn parse_entries(text: &str) -> Result<Vec<LexiconEntry>, LexiconError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut positions = Vec::new();
        for token in trimmed.split_whitespace() {
            let alts: Vec<String> = token
                .split('/')
                .filter(|alt| !alt.is_empty())
                .map(str::to_lowercase)
                .collect();
            if alts.is_empty() {
                return Err(LexiconError::EmptyExpansion { line });
            }
            let mut seen = HashSet::new();
            positions.push(alts.into_iter().filter(|a| seen.insert(a.clone())).collect());
        }
        if positions.len() > MAX_PATTERN_TOKENS {
            return Err(LexiconError::TooLong {
                line,
                len: positions.len(),
            });
        }
        entries.push(LexiconEntry { line, positions });
    }
    Ok(entries)
}

pub fn parse_blocklist(text: &str) -> Result<BTreeSet<String>, LexiconError> {
    let mut blocklist = BTreeSet::new();
    for entry in parse_entries(text)? {
        if entry.positions.len() != 1 {
            return Err(LexiconError::MultiToken { line: entry.line });
        }
        blocklist.extend(entry.positions.into_iter().flatten());
    }
    Ok(blocklist)
}

pub fn default_blocklist() -> BTreeSet<String> {
    parse_blocklist(DEFAULT_BLOCKLIST).expect("bundled blocklist parses")
}

/// Parses NPI patterns, pairing them with the bundled blocklist.
pub fn parse_npi_lexicon(text: &str) -> Result<NpiLexicon, LexiconError> {
    NpiLexicon::new(text, default_blocklist())
}

impl NpiLexicon {
    pub fn new(patterns_text: &str, blocklist: BTreeSet<String>) -> Result<Self, LexiconError> {
        let entries = parse_entries(patterns_text)?;
        let mut patterns = Vec::new();
        let mut seen = HashSet::new();
        for entry in &entries {
            let source = entry.source();
            for tokens in entry.expand() {
                if seen.insert(tokens.clone()) {
                    patterns.push(NpiPattern {
                        tokens,
                        source: source.clone(),
                    });
                }
            }
        }
        if patterns.is_empty() {
            return Err(LexiconError::NoPatterns);
        }

        let mut trie = vec![TrieNode::default()];
        for (index, pattern) in patterns.iter().enumerate() {
            let mut node = 0;
            for token in &pattern.tokens {
                node = match trie[node].children.get(token) {
                    Some(&next) => next,
                    None => {
                        trie.push(TrieNode::default());
                        let next = trie.len() - 1;
                        trie[node].children.insert(token.clone(), next);
                        next
                    }
                };
            }
            trie[node].pattern = Some(index);
        }

        Ok(NpiLexicon {
            entries,
            patterns,
            blocklist,
            trie,
        })
    }

    pub fn bundled() -> Self {
        parse_npi_lexicon(DEFAULT_NPI_LEXICON).expect("bundled lexicon parses")
    }

    pub fn patterns(&self) -> &[NpiPattern] {
        &self.patterns
    }

    pub fn pattern(&self, index: usize) -> &NpiPattern {
        &self.patterns[index]
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn blocklist(&self) -> &BTreeSet<String> {
        &self.blocklist
    }

    pub fn is_blocked(&self, token: &str) -> bool {
        self.blocklist.contains(token)
    }

    /// Writes the pattern entries back in file syntax, one per line.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            let _ = writeln!(out, "{}", entry.source());
        }
        out
    }

    /// Longest pattern starting at `start`, as (end, pattern index).
    fn longest_at(&self, tokens: &[String], start: usize) -> Option<(usize, usize)> {
        let mut node = 0;
        let mut best = None;
        for (offset, token) in tokens[start..].iter().enumerate() {
            match self.trie[node].children.get(token) {
                Some(&next) => node = next,
                None => break,
            }
            if let Some(pattern) = self.trie[node].pattern {
                best = Some((start + offset + 1, pattern));
            }
        }
        best
    }

    /// Leftmost-longest, non-overlapping matches, scanning left to right.
    pub fn match_npis(&self, sentence: &Sentence) -> Vec<NpiMatch> {
        let tokens = &sentence.tokens;
        let mut matches = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_at(tokens, i) {
                Some((end, pattern)) => {
                    matches.push(NpiMatch {
                        sentence_id: sentence.id,
                        start: i,
                        end,
                        pattern,
                    });
                    i = end;
                }
                None => i += 1,
            }
        }
        matches
    }
}

pub fn match_npis(sentence: &Sentence, lexicon: &NpiLexicon) -> Vec<NpiMatch> {
    lexicon.match_npis(sentence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sentence(text: &str) -> Sentence {
        Sentence::new(0, text.split(' ').map(String::from).collect())
    }

    fn token_sets(lexicon: &NpiLexicon) -> BTreeSet<Vec<String>> {
        lexicon.patterns().iter().map(|p| p.tokens.clone()).collect()
    }

    fn seqs(items: &[&str]) -> BTreeSet<Vec<String>> {
        items
            .iter()
            .map(|s| s.split(' ').map(String::from).collect())
            .collect()
    }

    #[test]
    fn slash_alternations_expand() {
        let lex = parse_npi_lexicon("in weeks/ages/years").unwrap();
        assert_eq!(token_sets(&lex), seqs(&["in weeks", "in ages", "in years"]));
        assert!(lex.patterns().iter().all(|p| p.source == "in weeks/ages/years"));

        let lex = parse_npi_lexicon("would care/mind").unwrap();
        assert_eq!(token_sets(&lex), seqs(&["would care", "would mind"]));

        let lex = parse_npi_lexicon("any").unwrap();
        assert_eq!(token_sets(&lex), seqs(&["any"]));
    }

    #[test]
    fn bundled_lexicon_shape() {
        let lex = NpiLexicon::bundled();
        assert_eq!(lex.entries().len(), 20);
        // 16 plain entries plus 3 + 3 + 2 + 2 from the alternations.
        assert_eq!(lex.patterns().len(), 16 + 3 + 3 + 2 + 2);
        assert!(lex.patterns().iter().all(|p| (1..=4).contains(&p.tokens.len())));
        assert!(lex
            .patterns()
            .iter()
            .all(|p| p.tokens.iter().all(|t| !t.contains('/'))));
        let expected: BTreeSet<String> =
            ["not", "n't", "no", "none", "neither", "nor", "few", "each", "every", "without"]
                .into_iter()
                .map(String::from)
                .collect();
        assert_eq!(lex.blocklist(), &expected);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            parse_npi_lexicon("any\n# note\n / //\n").unwrap_err(),
            LexiconError::EmptyExpansion { line: 3 }
        );
        assert_eq!(
            parse_npi_lexicon("a b c d e").unwrap_err(),
            LexiconError::TooLong { line: 1, len: 5 }
        );
        assert_eq!(parse_npi_lexicon("# only comments\n").unwrap_err(), LexiconError::NoPatterns);
        assert_eq!(
            parse_blocklist("not\nat all\n").unwrap_err(),
            LexiconError::MultiToken { line: 2 }
        );
    }

    #[test]
    fn matching_examples() {
        let lex = parse_npi_lexicon("anymore\nany\nat all").unwrap();
        let m = lex.match_npis(&sentence("we do n't have plants anymore"));
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].start, m[0].end), (5, 6));
        assert_eq!(lex.pattern(m[0].pattern).text(), "anymore");

        let lex = NpiLexicon::bundled();
        let m = lex.match_npis(&sentence("any idiot can do that"));
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].start, m[0].end), (0, 1));

        assert!(lex.match_npis(&sentence("she sang")).is_empty());
    }

    #[test]
    fn longest_match_wins() {
        let lex = parse_npi_lexicon("all\nat all\nlift a finger\nlift").unwrap();
        let m = lex.match_npis(&sentence("not at all willing to lift a finger or lift"));
        let spans: Vec<_> = m.iter().map(|m| (m.start, m.end)).collect();
        assert_eq!(spans, vec![(1, 3), (5, 8), (9, 10)]);
    }

    #[test]
    fn multi_token_patterns_need_contiguity() {
        let lex = NpiLexicon::bundled();
        assert!(lex.match_npis(&sentence("did n't last very long")).is_empty());
        let m = lex.match_npis(&sentence("it did n't last long"));
        assert_eq!((m[0].start, m[0].end), (3, 5));
    }

    proptest! {
        #[test]
        fn matches_are_ordered_and_exact(
            words in proptest::collection::vec(
                prop::sample::select(vec!["any", "at", "all", "red", "cent", "give", "a",
                    "damn", "in", "weeks", "yet", "we", "to", "speak", "of"]),
                0..30)
        ) {
            let lex = NpiLexicon::bundled();
            let s = Sentence::new(0, words.iter().map(|w| w.to_string()).collect());
            let matches = lex.match_npis(&s);
            for pair in matches.windows(2) {
                prop_assert!(pair[0].end <= pair[1].start);
            }
            for m in &matches {
                prop_assert!(m.start < m.end && m.end <= s.len());
                prop_assert_eq!(&s.tokens[m.start..m.end], &lex.pattern(m.pattern).tokens[..]);
            }
        }

        #[test]
        fn serialize_is_a_fixed_point(
            lines in proptest::collection::vec(
                proptest::collection::vec(
                    proptest::collection::vec("[a-z']{1,5}", 1..4),
                    1..5),
                1..8)
        ) {
            let text: String = lines
                .iter()
                .map(|positions| {
                    positions.iter().map(|alts| alts.join("/")).collect::<Vec<_>>().join(" ")
                })
                .collect::<Vec<_>>()
                .join("\n");
            let first = parse_npi_lexicon(&text).unwrap();
            let second = parse_npi_lexicon(&first.serialize()).unwrap();
            prop_assert_eq!(&first, &second);
            prop_assert_eq!(first.serialize(), second.serialize());
        }
    }
}
