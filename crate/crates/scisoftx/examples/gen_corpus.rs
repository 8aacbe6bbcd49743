//! Writes the synthetic evaluation corpus.
//!
//! Usage: gen_corpus <dir> [count] [seed]

use std::path::PathBuf;

use scisoftx::synth::corpus::{write_corpus, DEFAULT_DOCUMENTS, DEFAULT_SEED};

fn main() {
    let mut args = std::env::args().skip(1);
    let Some(dir) = args.next().map(PathBuf::from) else {
        eprintln!("usage: gen_corpus <dir> [count] [seed]");
        std::process::exit(1);
    };
    let count = args.next().map_or(DEFAULT_DOCUMENTS, |s| s.parse().expect("count is a number"));
    let seed = args.next().map_or(DEFAULT_SEED, |s| s.parse().expect("seed is a number"));
    match write_corpus(&dir, count, seed) {
        Ok(names) => println!("wrote {} documents to {}", names.len(), dir.display()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
