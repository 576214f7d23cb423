//! Regenerates the bundled synthetic corpora under `data/`.
//!
//! cargo run -p delex --example gen_fixtures

use std::fs;
use std::path::Path;

use delex::synth::{generate, SynthSpec};

fn main() -> std::io::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for (prefix, spec) in [("toy", SynthSpec::toy()), ("piggyback", SynthSpec::piggyback())] {
        let corpus = generate(&spec);
        fs::write(data.join(format!("{prefix}_corpus.txt")), corpus.text())?;
        fs::write(data.join(format!("{prefix}_gold.tsv")), corpus.gold_tsv())?;
        fs::write(data.join(format!("{prefix}_seeds.txt")), corpus.seeds_txt())?;
    }
    Ok(())
}
