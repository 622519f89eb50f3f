#![allow(dead_code)]

use std::path::Path;

use gnomon_core::iri::saws;
use gnomon_core::{IngestConfig, Vocabulary};
use gnomon_service::{load_corpus, CorpusState, NewAssertion};

pub const BASE: &str = "http://example.org/saws/";
pub const ALEXANDER: &str = include_str!("../../../../fixtures/alexander.xml");
pub const GNOMVAT: &str = include_str!("../../../../fixtures/gnomvat.xml");
pub const ACTIVE: &str =
    "http://www.ancientwisdoms.ac.uk/cts/urn:cts:greekLit:tlg3017.Syno298.sawsGrc01:divedition.divsection1.o14.a107";
pub const PASSIVE: &str = "http://data.perseus.org/citations/urn:cts:greekLit:tlg0031.tlg002.perseus-grc1:9.35";
pub const VIAF: &str = "http://viaf.org/viaf/44335536/";

pub fn config() -> IngestConfig {
    IngestConfig::new(BASE).unwrap()
}

pub fn corpus_dir(files: &[(&str, &str)]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in files {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

pub fn fixture_dir() -> tempfile::TempDir {
    corpus_dir(&[("alexander.xml", ALEXANDER), ("gnomvat.xml", GNOMVAT)])
}

pub fn load(dir: &Path) -> CorpusState {
    load_corpus(dir, &config(), Vocabulary::default_saws()).unwrap()
}

pub fn seg(doc: &str, id: &str) -> String {
    format!("{BASE}{doc}#{id}")
}

/// The i-th of a family of valid assertions between fixture segments.
pub fn nth_assertion(i: usize) -> NewAssertion {
    let targets = [
        seg("GnomVat", "GnomVat001s2"),
        seg("GnomVat", "GnomVat001s1"),
        PASSIVE.to_string(),
    ];
    NewAssertion {
        subject: seg("AppGnomVat", "AppGnomVat001s2"),
        predicate: [saws::IS_VARIANT_OF, saws::IS_VERBATIM_OF, saws::IS_TRANSLATION_OF][i % 3].to_string(),
        object: targets[(i / 3) % 3].clone(),
        responsibility: Some(format!("http://viaf.org/viaf/{}/", 1000 + i)),
        certainty: Vec::new(),
    }
}
