//! Core of the gnomon engine: a relation vocabulary with subsumption, TEI
//! ingestion into segments and relation assertions, a provenance-aware quad
//! store, and the corpus-level queries built on top of them.

pub mod assertion;
pub mod diagnostic;
pub mod graph;
pub mod intertext;
pub mod iri;
pub mod tei;
pub mod vocabulary;

pub use assertion::{CertaintyNote, CertaintyTarget, Degree, RelationAssertion};
pub use diagnostic::{Diagnostic, Severity};
pub use graph::{
    export_ntriples, import_ntriples, reachable, AssertionMeta, Direction, GraphSnapshot, Path, Quad, Step, Term,
};
pub use tei::{
    parse_document, parse_document_at, segment_uri, structural_triples, validate_profile, Document, EntityKind,
    EntityRef, IngestConfig, IngestError, IngestResult, SegType, Segment, Strictness,
};
pub use vocabulary::{load_vocabulary, validate_vocabulary, Vocabulary, VocabularyError};
