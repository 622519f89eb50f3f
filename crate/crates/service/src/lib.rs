//! Corpus persistence (TEI files plus an append-only assertion journal),
//! snapshot publication, and the HTTP/JSON API over them.

mod api;
mod error;
mod journal;
mod render;
mod shared;
mod state;

pub use api::{router, serve};
pub use error::ServiceError;
pub use journal::{read_journal, JournalRecord, API_SOURCE, JOURNAL_FILE};
pub use render::{Citation, DocumentSummary, DocumentView, SegmentView};
pub use shared::Corpus;
pub use state::{load_corpus, CorpusState, LoadedDocument, NewAssertion, Stats};
