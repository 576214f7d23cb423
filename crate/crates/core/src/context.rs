//! NPI contexts: the stretch of a sentence to the left of an NPI, cut at the
//! nearest preceding comma or semicolon. Contexts that contain a blocklisted
//! operator are kept but flagged as not retained.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::ingest::{is_clause_boundary, is_punctuation, Sentence};
use crate::lexicon::{NpiLexicon, NpiMatch};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpiContext {
    pub sentence_id: usize,
    pub start: usize,
    /// Exclusive; equal to `trigger.start`.
    pub end: usize,
    pub trigger: NpiMatch,
    pub retained: bool,
    /// Positions in `start..end` covered by some NPI match.
    pub excluded: Vec<usize>,
}

impl NpiContext {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn key(&self) -> (usize, usize, usize) {
        (self.sentence_id, self.start, self.end)
    }
}

pub fn extract_contexts(
    sentence: &Sentence,
    matches: &[NpiMatch],
    blocklist: &BTreeSet<String>,
) -> Vec<NpiContext> {
    let tokens = &sentence.tokens;
    let mut contexts: Vec<NpiContext> = Vec::with_capacity(matches.len());
    for trigger in matches {
        let end = trigger.start;
        let start = tokens[..end]
            .iter()
            .rposition(|t| is_clause_boundary(t))
            .map_or(0, |i| i + 1);
        if start == end {
            continue;
        }
        if contexts.iter().any(|c| c.start == start && c.end == end) {
            continue;
        }
        let excluded = matches
            .iter()
            .flat_map(|m| m.start..m.end)
            .filter(|&i| i >= start && i < end)
            .collect();
        let retained = !tokens[start..end].iter().any(|t| blocklist.contains(t));
        contexts.push(NpiContext {
            sentence_id: sentence.id,
            start,
            end,
            trigger: *trigger,
            retained,
            excluded,
        });
    }
    contexts
}

/// Distinct non-punctuation word types in the context, skipping positions
/// covered by NPI matches.
pub fn candidate_tokens(context: &NpiContext, sentence: &Sentence) -> BTreeSet<String> {
    (context.start..context.end)
        .filter(|i| !context.excluded.contains(i))
        .map(|i| &sentence.tokens[i])
        .filter(|t| !is_punctuation(t))
        .cloned()
        .collect()
}

/// A context detached from its sentence, carrying what scoring needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedContext {
    pub context: NpiContext,
    pub span: Vec<String>,
    pub candidates: BTreeSet<String>,
}

impl ExtractedContext {
    pub fn retained(&self) -> bool {
        self.context.retained
    }
}

/// Matches NPIs in `sentence` and extracts its contexts with their tokens.
pub fn analyze_sentence(sentence: &Sentence, lexicon: &NpiLexicon) -> (usize, Vec<ExtractedContext>) {
    let matches = lexicon.match_npis(sentence);
    let contexts = extract_contexts(sentence, &matches, lexicon.blocklist())
        .into_iter()
        .map(|context| ExtractedContext {
            span: sentence.tokens[context.start..context.end].to_vec(),
            candidates: candidate_tokens(&context, sentence),
            context,
        })
        .collect();
    (matches.len(), contexts)
}

pub const CONTEXT_DUMP_HEADER: &str = "sentence_id\tstart\tend\tretained\ttrigger\tspan";

/// Tab-separated dump, one context per line, in the order given.
pub fn write_context_dump(contexts: &[ExtractedContext], lexicon: &NpiLexicon) -> String {
    let mut out = String::new();
    out.push_str(CONTEXT_DUMP_HEADER);
    out.push('\n');
    for c in contexts {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            c.context.sentence_id,
            c.context.start,
            c.context.end,
            u8::from(c.context.retained),
            lexicon.pattern(c.context.trigger.pattern).text(),
            c.span.join(" "),
        );
    }
    out
}
