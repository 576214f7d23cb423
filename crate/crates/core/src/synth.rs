//! Deterministic synthetic corpora with planted downward-entailing operators
//! and piggybackers, used as fixtures.
//!
//! Planted operators appear to the left of NPIs far more often than ordinary
//! vocabulary does. A piggybacker appears almost only right next to a planted
//! operator inside NPI contexts, so its undistilled score is high but it never
//! has a context to itself.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUBJECTS: &[&str] = &[
    "the company", "the analyst", "the board", "investors", "officials", "he", "she", "they",
    "the bank", "the firm", "the agency", "traders",
];
const VERBS: &[&str] = &[
    "had", "saw", "made", "sold", "bought", "reported", "expected", "found", "wanted", "offered",
    "received", "needed",
];
const DETERMINERS: &[&str] = &["the", "a", "its", "their", "some"];
const NOUNS: &[&str] = &[
    "plans", "shares", "profit", "changes", "problems", "evidence", "money", "support",
    "interest", "orders", "reason", "contracts", "losses", "offers",
];
const PREPOSITIONS: &[&str] = &["for", "with", "from", "on"];

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub seed: u64,
    pub sentences: usize,
    pub operators: Vec<String>,
    pub piggybackers: Vec<String>,
    /// Include sentences whose NPIs are not licensed by anything.
    pub noise: bool,
}

impl SynthSpec {
    /// The bundled end-to-end corpus: 1,000 sentences, ten operators and one
    /// piggybacker.
    pub fn toy() -> Self {
        SynthSpec {
            seed: 20090601,
            sentences: 1000,
            operators: [
                "denied", "doubted", "refused", "declined", "rejected", "opposed", "failed",
                "prevented", "unlikely", "reluctant",
            ]
            .map(String::from)
            .to_vec(),
            piggybackers: vec!["vigorously".into()],
            noise: true,
        }
    }

    /// A smaller corpus with four operators and one piggybacker.
    pub fn piggyback() -> Self {
        SynthSpec {
            seed: 48126,
            sentences: 600,
            operators: ["denies", "opposes", "rejects", "doubts"].map(String::from).to_vec(),
            piggybackers: vec!["vigorously".into()],
            noise: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub lines: Vec<String>,
    pub operators: Vec<String>,
    pub piggybackers: Vec<String>,
    /// Counts known from how each sentence was built.
    pub planted: PlantedCounts,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlantedCounts {
    pub npi_matches: u64,
    /// Non-empty contexts, retained or not.
    pub npi_contexts: u64,
    pub retained_contexts: u64,
}

impl PlantedCounts {
    fn add(&mut self, matches: u64, contexts: u64, retained: u64) {
        self.npi_matches += matches;
        self.npi_contexts += contexts;
        self.retained_contexts += retained;
    }
}

impl SynthCorpus {
    pub fn text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    /// Every non-punctuation word type of the generated vocabulary.
    pub fn vocabulary(&self) -> Vec<String> {
        let mut words: Vec<String> = SUBJECTS
            .iter()
            .flat_map(|s| s.split(' '))
            .chain(VERBS.iter().copied())
            .chain(DETERMINERS.iter().copied())
            .chain(NOUNS.iter().copied())
            .chain(PREPOSITIONS.iter().copied())
            .chain(["that", "said", "and", "can", "it", "did", "has"])
            .map(String::from)
            .chain(self.operators.iter().cloned())
            .chain(self.piggybackers.iter().cloned())
            .collect();
        words.sort();
        words.dedup();
        words
    }

    /// Tab-separated gold labels: operators are `DE_ND`, everything else in
    /// the vocabulary is `NOT_DE`.
    pub fn gold_tsv(&self) -> String {
        let mut out = String::new();
        for word in self.vocabulary() {
            let label = if self.operators.contains(&word) {
                "DE_ND"
            } else {
                "NOT_DE"
            };
            out.push_str(&format!("{word}\t{label}\n"));
        }
        out
    }

    pub fn seeds_txt(&self) -> String {
        let mut out = String::new();
        for op in &self.operators {
            out.push_str(op);
            out.push('\n');
        }
        out
    }
}

struct Builder<'a> {
    rng: ChaCha8Rng,
    spec: &'a SynthSpec,
    weights: Vec<f64>,
    planted: PlantedCounts,
}

impl Builder<'_> {
    fn pick(&mut self, words: &[&'static str]) -> &'static str {
        words.choose(&mut self.rng).copied().unwrap()
    }

    /// Operators are drawn with weights falling off as 1/sqrt(rank).
    fn operator(&mut self) -> String {
        let total: f64 = self.weights.iter().sum();
        let mut x = self.rng.gen_range(0.0..total);
        for (i, w) in self.weights.iter().enumerate() {
            if x < *w {
                return self.spec.operators[i].clone();
            }
            x -= w;
        }
        self.spec.operators.last().unwrap().clone()
    }

    fn piggybacker(&mut self) -> Option<String> {
        self.spec.piggybackers.choose(&mut self.rng).cloned()
    }

    fn noun_phrase(&mut self) -> String {
        format!("{} {}", self.pick(DETERMINERS), self.pick(NOUNS))
    }

    fn clause(&mut self) -> String {
        let subject = self.pick(SUBJECTS);
        let verb = self.pick(VERBS);
        format!("{subject} {verb} {}", self.noun_phrase())
    }

    /// An operator followed by an NPI in its scope.
    fn licensed(&mut self, op: &str) -> String {
        let subject = self.pick(SUBJECTS);
        let inner = self.pick(SUBJECTS);
        let verb = self.pick(VERBS);
        let noun = self.pick(NOUNS);
        match self.rng.gen_range(0..4) {
            0 => format!("{subject} {op} that {inner} {verb} any {noun}"),
            1 => format!("{subject} {op} that {inner} ever {verb} {}", self.noun_phrase()),
            2 => format!("{subject} {op} {} at all", self.noun_phrase()),
            _ => format!("{subject} {op} that {inner} {verb} {} yet", self.noun_phrase()),
        }
    }

    fn sentence(&mut self) -> String {
        let roll = self.rng.gen_range(0..100);
        let body = match roll {
            0..=39 => {
                let mut s = self.clause();
                if self.rng.gen_bool(0.4) {
                    let prep = self.pick(PREPOSITIONS);
                    s = format!("{s} {prep} {}", self.noun_phrase());
                }
                if self.rng.gen_bool(0.25) {
                    s = format!("{s} and {}", self.clause());
                }
                if self.rng.gen_bool(0.02) {
                    if let Some(p) = self.piggybacker() {
                        s = format!("{} {p} {}", self.pick(SUBJECTS), s);
                    }
                }
                s
            }
            40..=47 => format!("{} said that {}", self.pick(SUBJECTS), self.clause()),
            48..=72 => {
                self.planted.add(1, 1, 1);
                let op = self.operator();
                self.licensed(&op)
            }
            73..=77 => {
                self.planted.add(1, 1, 1);
                let op = self.operator();
                let licensed = self.licensed(&op);
                match self.piggybacker() {
                    Some(p) => licensed.replacen(&format!(" {op} "), &format!(" {p} {op} "), 1),
                    None => licensed,
                }
            }
            78..=85 => {
                self.planted.add(1, 1, 0);
                let subject = self.pick(SUBJECTS);
                let verb = self.pick(VERBS);
                let noun = self.pick(NOUNS);
                match self.rng.gen_range(0..3) {
                    0 => format!("{subject} did n't {verb} any {noun}"),
                    1 => format!("no {noun} {verb} {} yet", self.noun_phrase()),
                    _ => format!("{subject} has not {verb} {} at all", self.noun_phrase()),
                }
            }
            86..=91 if self.spec.noise => {
                if self.rng.gen_bool(0.5) {
                    self.planted.add(1, 1, 1);
                    format!("{} and any {}", self.clause(), self.pick(NOUNS))
                } else {
                    // The NPI opens the sentence, so its context is empty.
                    self.planted.add(1, 0, 0);
                    format!("any {} can {} it", self.pick(NOUNS), self.pick(VERBS))
                }
            }
            86..=91 => format!("{} said that {}", self.pick(SUBJECTS), self.clause()),
            92..=94 => {
                self.planted.add(1, 1, 1);
                let op = self.operator();
                let np = self.noun_phrase();
                format!("{} {op} {np} , {} any {}", self.pick(SUBJECTS), self.clause(), self.pick(NOUNS))
            }
            _ => {
                let op = self.operator();
                format!("{} {op} {}", self.pick(SUBJECTS), self.noun_phrase())
            }
        };
        format!("{body} .")
    }
}

pub fn generate(spec: &SynthSpec) -> SynthCorpus {
    let weights = (0..spec.operators.len())
        .map(|i| 1.0 / ((i + 1) as f64).sqrt())
        .collect();
    let mut builder = Builder {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        spec,
        weights,
        planted: PlantedCounts::default(),
    };
    let lines = (0..spec.sentences).map(|_| builder.sentence()).collect();
    SynthCorpus {
        lines,
        operators: spec.operators.clone(),
        piggybackers: spec.piggybackers.clone(),
        planted: builder.planted,
    }
}
