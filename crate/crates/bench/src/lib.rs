//! Shared inputs for the criterion benches: corpus models loaded once.

use std::path::PathBuf;

use fspv_core::syntax::{parse_str, Spec};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn corpus_spec(name: &str) -> Spec {
    parse_str(&corpus_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}
