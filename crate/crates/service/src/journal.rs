//! Append-only JSON-lines record of assertions made through the API.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use gnomon_core::{CertaintyNote, RelationAssertion};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

pub const JOURNAL_FILE: &str = "assertions.jsonl";
pub const API_SOURCE: &str = "api";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub record_id: u64,
    pub received_at: String,
    pub subject: String,
    pub predicate: String,
    pub object: String,
    pub responsibility: Option<String>,
    #[serde(default)]
    pub certainty: Vec<CertaintyNote>,
    pub source: String,
}

impl JournalRecord {
    pub fn assertion(&self) -> RelationAssertion {
        RelationAssertion {
            subject: self.subject.clone(),
            predicate: self.predicate.clone(),
            object: self.object.clone(),
            responsibility: self.responsibility.clone(),
            certainty: self.certainty.clone(),
            source_doc: self.source.clone(),
            source_locator: format!("{JOURNAL_FILE}#{}", self.record_id),
        }
    }
}

/// Reads every record; a missing file is an empty journal.
pub fn read_journal(path: &Path) -> Result<Vec<JournalRecord>, ServiceError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(ServiceError::io(path, e)),
    };
    let corrupt = |line: usize, message: String| ServiceError::Journal {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut records: Vec<JournalRecord> = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| ServiceError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: JournalRecord = serde_json::from_str(&line).map_err(|e| corrupt(i + 1, e.to_string()))?;
        if let Some(last) = records.last() {
            if record.record_id <= last.record_id {
                return Err(corrupt(
                    i + 1,
                    format!("record_id {} does not follow {}", record.record_id, last.record_id),
                ));
            }
        }
        records.push(record);
    }
    Ok(records)
}

/// Appends one line and forces it to disk.
pub fn append_record(path: &Path, record: &JournalRecord) -> Result<(), ServiceError> {
    let mut line = serde_json::to_string(record).expect("journal records serialize");
    line.push('\n');
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| ServiceError::io(path, e))?;
    file.write_all(line.as_bytes()).map_err(|e| ServiceError::io(path, e))?;
    file.sync_all().map_err(|e| ServiceError::io(path, e))
}
