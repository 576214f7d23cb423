//! Corpus ingestion: line splitting, tokenization and global token counts.
//!
//! A corpus is UTF-8 text with one sentence per line. Lines are turned into
//! case-folded token sequences; empty lines produce no sentence. Input can be
//! cut into byte-range shards snapped to line breaks so that ingestion runs in
//! parallel while sentence numbering stays identical to a sequential read.

use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: invalid UTF-8")]
    InvalidUtf8 { line: usize },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// How raw lines are split into tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenizerMode {
    /// Text is already tokenized (Treebank conventions); split on whitespace.
    #[default]
    Pretokenized,
    /// Raw text; also split contractions and sentence-final punctuation.
    Basic,
}

impl FromStr for TokenizerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pretokenized" => Ok(TokenizerMode::Pretokenized),
            "basic" => Ok(TokenizerMode::Basic),
            other => Err(format!("unknown tokenizer mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: usize,
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new(id: usize, tokens: Vec<String>) -> Self {
        Sentence { id, tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Token counts over a corpus. Counts from disjoint parts of a corpus can be
/// combined with [`CorpusStats::merge`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub sentence_count: u64,
    pub token_count: u64,
    pub type_counts: HashMap<String, u64>,
}

impl CorpusStats {
    pub fn add_sentence(&mut self, tokens: &[String]) {
        self.sentence_count += 1;
        self.token_count += tokens.len() as u64;
        for token in tokens {
            match self.type_counts.get_mut(token.as_str()) {
                Some(n) => *n += 1,
                None => {
                    self.type_counts.insert(token.clone(), 1);
                }
            }
        }
    }

    pub fn merge(&mut self, other: CorpusStats) {
        self.sentence_count += other.sentence_count;
        self.token_count += other.token_count;
        for (token, n) in other.type_counts {
            *self.type_counts.entry(token).or_insert(0) += n;
        }
    }

    pub fn count(&self, token: &str) -> u64 {
        self.type_counts.get(token).copied().unwrap_or(0)
    }
}

pub fn corpus_stats<'a, I>(sentences: I) -> CorpusStats
where
    I: IntoIterator<Item = &'a Sentence>,
{
    let mut stats = CorpusStats::default();
    for sentence in sentences {
        stats.add_sentence(&sentence.tokens);
    }
    stats
}

pub fn tokenize_line(raw: &str, mode: TokenizerMode) -> Vec<String> {
    let mut out = Vec::new();
    match mode {
        TokenizerMode::Pretokenized => {
            for chunk in raw.split_whitespace() {
                split_clause_marks(&chunk.to_lowercase(), &mut out);
            }
        }
        TokenizerMode::Basic => {
            let normalized = raw.replace(['\u{2019}', '\u{2018}'], "'");
            let chunks: Vec<&str> = normalized.split_whitespace().collect();
            let last = chunks.len().saturating_sub(1);
            for (i, chunk) in chunks.iter().enumerate() {
                basic_chunk(&chunk.to_lowercase(), i == last, &mut out);
            }
        }
    }
    out
}

/// Commas and semicolons become their own tokens, except for a comma between
/// two digits ("1,000").
fn split_clause_marks(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let mut start = 0;
    for (i, &(pos, c)) in chars.iter().enumerate() {
        if c != ',' && c != ';' {
            continue;
        }
        if c == ',' && i > 0 && i + 1 < chars.len() {
            let before = chars[i - 1].1;
            let after = chars[i + 1].1;
            if before.is_ascii_digit() && after.is_ascii_digit() {
                continue;
            }
        }
        if start < pos {
            out.push(chunk[start..pos].to_string());
        }
        out.push(c.to_string());
        start = pos + c.len_utf8();
    }
    if start < chunk.len() {
        out.push(chunk[start..].to_string());
    }
}

const LEADING_PUNCT: &[char] = &['"', '(', '[', '{', '<', '`', '\u{201c}'];
const TRAILING_PUNCT: &[char] = &['"', ')', ']', '}', '>', '!', '?', ':', '\u{201d}'];
const CLITICS: &[&str] = &["'s", "'re", "'ve", "'ll", "'d", "'m"];

fn basic_chunk(chunk: &str, sentence_final: bool, out: &mut Vec<String>) {
    let mut body = chunk;
    while let Some(c) = body.chars().next() {
        if !LEADING_PUNCT.contains(&c) || body.len() == c.len_utf8() {
            break;
        }
        out.push(c.to_string());
        body = &body[c.len_utf8()..];
    }

    let mut trailing = Vec::new();
    while let Some(c) = body.chars().next_back() {
        let peel = TRAILING_PUNCT.contains(&c)
            || c == ','
            || c == ';'
            || (c == '.' && sentence_final && !body.ends_with(".."));
        if !peel || body.len() == c.len_utf8() {
            break;
        }
        trailing.push(c.to_string());
        body = &body[..body.len() - c.len_utf8()];
    }

    let mut words = Vec::new();
    split_clause_marks(body, &mut words);
    for word in words {
        split_contraction(&word, out);
    }
    out.extend(trailing.into_iter().rev());
}

/// Treebank-style contraction splitting: "don't" -> "do n't", "can't" ->
/// "ca n't", "cannot" -> "can not", "it's" -> "it 's".
fn split_contraction(word: &str, out: &mut Vec<String>) {
    if word == "cannot" {
        out.push("can".into());
        out.push("not".into());
        return;
    }
    if word.len() > 3 && word.ends_with("n't") {
        let (stem, clitic) = word.split_at(word.len() - 3);
        out.push(stem.to_string());
        out.push(clitic.to_string());
        return;
    }
    for clitic in CLITICS {
        if word.len() > clitic.len() && word.ends_with(clitic) {
            let (stem, clitic) = word.split_at(word.len() - clitic.len());
            out.push(stem.to_string());
            out.push(clitic.to_string());
            return;
        }
    }
    out.push(word.to_string());
}

/// Treebank bracket tokens, which survive case-folding as letters.
const BRACKET_TOKENS: &[&str] = &["-lrb-", "-rrb-", "-lsb-", "-rsb-", "-lcb-", "-rcb-"];

/// A token with no letters or digits, or a Treebank bracket token.
pub fn is_punctuation(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric) || BRACKET_TOKENS.contains(&token)
}

pub fn is_clause_boundary(token: &str) -> bool {
    token == "," || token == ";"
}

/// Reads a corpus file into memory, decompressing when the name ends in `.gz`.
pub fn read_corpus_bytes(path: &Path) -> Result<Vec<u8>, IngestError> {
    let io_err = |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut data = Vec::new();
    let gzipped = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("gz"));
    if gzipped {
        MultiGzDecoder::new(file)
            .read_to_end(&mut data)
            .map_err(io_err)?;
    } else {
        let mut file = file;
        file.read_to_end(&mut data).map_err(io_err)?;
    }
    Ok(data)
}

/// Cuts `data` into at most `shards` contiguous byte ranges, each ending just
/// after a newline (or at end of input). Ranges cover the input exactly.
pub fn shard_ranges(data: &[u8], shards: usize) -> Vec<Range<usize>> {
    let shards = shards.max(1);
    let mut ranges = Vec::with_capacity(shards);
    let mut start = 0;
    for i in 1..=shards {
        if start >= data.len() {
            break;
        }
        let mut end = if i == shards {
            data.len()
        } else {
            (data.len() * i / shards).max(start)
        };
        while end < data.len() && end > 0 && data[end - 1] != b'\n' {
            end += 1;
        }
        if end > start {
            ranges.push(start..end);
            start = end;
        }
    }
    ranges
}

/// A line of input together with its 1-based line number within the shard.
pub struct RawLine<'a> {
    pub number: usize,
    pub text: &'a str,
}

/// Iterates over the lines of a byte buffer, validating UTF-8 per line.
/// Trailing `\r` is stripped.
pub fn lines(data: &[u8]) -> impl Iterator<Item = Result<RawLine<'_>, IngestError>> {
    let mut rest = data;
    let mut number = 0;
    std::iter::from_fn(move || {
        if rest.is_empty() {
            return None;
        }
        number += 1;
        let (line, tail) = match rest.iter().position(|&b| b == b'\n') {
            Some(i) => (&rest[..i], &rest[i + 1..]),
            None => (rest, &rest[rest.len()..]),
        };
        rest = tail;
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        Some(
            std::str::from_utf8(line)
                .map(|text| RawLine { number, text })
                .map_err(|_| IngestError::InvalidUtf8 { line: number }),
        )
    })
}

/// Tokenizes every non-empty line of `data` into sentences numbered from 0.
pub fn read_sentences(data: &[u8], mode: TokenizerMode) -> Result<Vec<Sentence>, IngestError> {
    let mut sentences = Vec::new();
    for line in lines(data) {
        let tokens = tokenize_line(line?.text, mode);
        if !tokens.is_empty() {
            sentences.push(Sentence::new(sentences.len(), tokens));
        }
    }
    Ok(sentences)
}
