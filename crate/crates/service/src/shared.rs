use std::sync::{Arc, Mutex, RwLock};

use crate::error::ServiceError;
use crate::journal::JournalRecord;
use crate::state::{CorpusState, NewAssertion};

/// Published state behind an atomic swap, with a single serialized writer.
///
/// Readers clone the current `Arc` and keep a consistent view for as long as
/// they hold it; appends rebuild off to the side and publish when done.
#[derive(Debug)]
pub struct Corpus {
    current: RwLock<Arc<CorpusState>>,
    writer: Mutex<()>,
}

impl Corpus {
    pub fn new(state: CorpusState) -> Corpus {
        Corpus {
            current: RwLock::new(Arc::new(state)),
            writer: Mutex::new(()),
        }
    }

    pub fn current(&self) -> Arc<CorpusState> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn append(&self, assertion: &NewAssertion) -> Result<JournalRecord, ServiceError> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let (next, record) = self.current().append_assertion(assertion)?;
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(record)
    }
}
