use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gnomon_core::intertext::CorpusIndex;
use gnomon_core::tei::{check_local_iris, segment_types};
use gnomon_core::{
    export_ntriples, iri, parse_document_at, structural_triples, Diagnostic, Document, GraphSnapshot, IngestConfig,
    IngestError, Quad, RelationAssertion, Strictness, Vocabulary,
};
use serde::Serialize;

use crate::error::ServiceError;
use crate::journal::{append_record, read_journal, JournalRecord, API_SOURCE, JOURNAL_FILE};

#[derive(Debug, Clone)]
pub struct LoadedDocument {
    pub document: Document,
    /// Original file contents, served back verbatim.
    pub xml: String,
    pub assertions: Vec<RelationAssertion>,
}

/// One published, immutable view of the corpus.
#[derive(Debug, Clone)]
pub struct CorpusState {
    dir: PathBuf,
    config: IngestConfig,
    vocabulary: Arc<Vocabulary>,
    documents: Arc<BTreeMap<String, LoadedDocument>>,
    journal: Arc<Vec<JournalRecord>>,
    snapshot: Arc<GraphSnapshot>,
    index: Arc<CorpusIndex>,
    segment_types: Arc<BTreeMap<String, String>>,
    diagnostics: Arc<Vec<Diagnostic>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub documents: usize,
    pub segments: usize,
    pub identified_segments: usize,
    pub document_assertions: usize,
    pub journal_records: usize,
    pub quads: usize,
}

/// Fields of a new assertion as posted by a client.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Deserialize)]
pub struct NewAssertion {
    pub subject: String,
    pub predicate: String,
    pub object: String,
    #[serde(default)]
    pub responsibility: Option<String>,
    #[serde(default)]
    pub certainty: Vec<gnomon_core::CertaintyNote>,
}

/// Parses every `.xml` file in `dir` (leniently) and replays the journal.
///
/// Files that are not well-formed or whose doc_id repeats an earlier one are
/// skipped with an error diagnostic. A corrupt journal is fatal.
pub fn load_corpus(dir: &Path, config: &IngestConfig, voc: Vocabulary) -> Result<CorpusState, ServiceError> {
    let entries = fs::read_dir(dir).map_err(|e| ServiceError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| ServiceError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x.eq_ignore_ascii_case("xml")) {
            files.push(path);
        }
    }
    files.sort();

    let mut lenient = config.clone();
    lenient.strictness = Strictness::Lenient;
    let mut diagnostics = Vec::new();
    let mut documents: BTreeMap<String, LoadedDocument> = BTreeMap::new();
    for path in files {
        let shown = path.display().to_string();
        let xml = match fs::read(&path).map(String::from_utf8) {
            Ok(Ok(text)) => text,
            Ok(Err(_)) => {
                diagnostics.push(Diagnostic::error("not-utf8", format!("{shown} is not UTF-8; skipped")));
                continue;
            }
            Err(e) => {
                diagnostics.push(Diagnostic::error("unreadable-file", format!("{shown}: {e}; skipped")));
                continue;
            }
        };
        let result = match parse_document_at(&xml, &shown, &lenient) {
            Ok(r) => r,
            Err(IngestError::Xml { line, column, message }) => {
                diagnostics.push(
                    Diagnostic::error("malformed-xml", format!("{shown}:{line}:{column}: {message}; skipped"))
                        .with_locator(format!("{line}:{column}")),
                );
                continue;
            }
            Err(e) => {
                diagnostics.push(Diagnostic::error("ingest-failed", format!("{shown}: {e}; skipped")));
                continue;
            }
        };
        let doc_id = result.document.doc_id.clone();
        if let Some(first) = documents.get(&doc_id) {
            diagnostics.push(
                Diagnostic::error(
                    "duplicate-doc-id",
                    format!(
                        "{shown} has doc_id `{doc_id}` already used by {}; skipped",
                        first.document.source_path
                    ),
                )
                .with_doc(&doc_id),
            );
            continue;
        }
        diagnostics.extend(result.diagnostics);
        let (_, structural) = structural_triples(&result.document, &lenient);
        diagnostics.extend(structural);
        documents.insert(
            doc_id,
            LoadedDocument {
                document: result.document,
                xml,
                assertions: result.assertions,
            },
        );
    }
    diagnostics.extend(check_local_iris(
        documents.values().map(|d| &d.document),
        documents.values().flat_map(|d| &d.assertions),
        &lenient,
    ));

    let journal = read_journal(&dir.join(JOURNAL_FILE))?;
    let index = CorpusIndex::new(documents.values().map(|d| &d.document));
    let types: BTreeMap<String, String> = documents
        .values()
        .flat_map(|d| segment_types(&d.document, &lenient))
        .collect();
    let snapshot = build_snapshot(&documents, &journal, &lenient);
    for d in &diagnostics {
        match d.severity {
            gnomon_core::Severity::Error => log::error!("{d}"),
            gnomon_core::Severity::Warning => log::warn!("{d}"),
            gnomon_core::Severity::Info => log::debug!("{d}"),
        }
    }
    log::info!(
        "loaded {} documents, {} journal records, {} quads from {}",
        documents.len(),
        journal.len(),
        snapshot.len(),
        dir.display()
    );
    Ok(CorpusState {
        dir: dir.to_path_buf(),
        config: lenient,
        vocabulary: Arc::new(voc),
        documents: Arc::new(documents),
        journal: Arc::new(journal),
        snapshot: Arc::new(snapshot),
        index: Arc::new(index),
        segment_types: Arc::new(types),
        diagnostics: Arc::new(diagnostics),
    })
}

fn build_snapshot(
    documents: &BTreeMap<String, LoadedDocument>,
    journal: &[JournalRecord],
    config: &IngestConfig,
) -> GraphSnapshot {
    let mut quads: Vec<Quad> = Vec::new();
    for d in documents.values() {
        quads.extend(structural_triples(&d.document, config).0);
        quads.extend(d.assertions.iter().map(RelationAssertion::to_quad));
    }
    quads.extend(journal.iter().map(|r| r.assertion().to_quad()));
    GraphSnapshot::build(quads)
}

impl CorpusState {
    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config(&self) -> &IngestConfig {
        &self.config
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn documents(&self) -> &BTreeMap<String, LoadedDocument> {
        &self.documents
    }

    pub fn document(&self, doc_id: &str) -> Result<&LoadedDocument, ServiceError> {
        self.documents
            .get(doc_id)
            .ok_or_else(|| ServiceError::NotFound(doc_id.to_string()))
    }

    pub fn journal(&self) -> &[JournalRecord] {
        &self.journal
    }

    pub fn journal_length(&self) -> usize {
        self.journal.len()
    }

    pub fn snapshot(&self) -> &Arc<GraphSnapshot> {
        &self.snapshot
    }

    pub fn index(&self) -> &CorpusIndex {
        &self.index
    }

    /// Load-time diagnostics (skipped files, profile issues).
    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn export(&self, include_provenance: bool) -> String {
        export_ntriples(&self.snapshot, include_provenance)
    }

    pub fn stats(&self) -> Stats {
        let mut segments = 0;
        let mut identified_segments = 0;
        for d in self.documents.values() {
            for (s, _) in d.document.segments() {
                segments += 1;
                identified_segments += usize::from(s.iri.is_some());
            }
        }
        Stats {
            documents: self.documents.len(),
            segments,
            identified_segments,
            document_assertions: self.documents.values().map(|d| d.assertions.len()).sum(),
            journal_records: self.journal.len(),
            quads: self.snapshot.len(),
        }
    }

    /// Every diagnostic the assertion would raise; any error means rejection.
    pub fn check(&self, a: &NewAssertion) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        match &a.responsibility {
            None => out.push(Diagnostic::error(
                "missing-resp",
                "responsibility is required for every assertion",
            )),
            Some(r) if !iri::is_absolute(r) => out.push(
                Diagnostic::error("invalid-iri", format!("responsibility `{r}` is not an absolute IRI"))
                    .with_iris([r.as_str()]),
            ),
            Some(_) => {}
        }
        for (role, value) in [
            ("subject", &a.subject),
            ("predicate", &a.predicate),
            ("object", &a.object),
        ] {
            if !iri::is_absolute(value) {
                out.push(
                    Diagnostic::error("invalid-iri", format!("{role} `{value}` is not an absolute IRI"))
                        .with_iris([value.as_str()]),
                );
            }
        }
        if out.iter().any(|d| d.rule == "invalid-iri") {
            return out;
        }
        let types = |x: &str| self.segment_types.get(x).cloned().into_iter().collect();
        match self
            .vocabulary
            .check_assertion(&a.predicate, &types(&a.subject), &types(&a.object))
        {
            Ok(diags) => out.extend(diags),
            Err(_) => out.push(
                Diagnostic::error(
                    "unknown-predicate",
                    format!("<{}> is not a property of the vocabulary", a.predicate),
                )
                .with_iris([a.predicate.as_str()]),
            ),
        }
        let probe = self.to_assertion(a, 0);
        out.extend(check_local_iris(
            self.documents.values().map(|d| &d.document),
            [&probe],
            &self.config,
        ));
        out
    }

    fn to_assertion(&self, a: &NewAssertion, record_id: u64) -> RelationAssertion {
        self.record(a, record_id, String::new()).assertion()
    }

    fn record(&self, a: &NewAssertion, record_id: u64, received_at: String) -> JournalRecord {
        JournalRecord {
            record_id,
            received_at,
            subject: a.subject.clone(),
            predicate: a.predicate.clone(),
            object: a.object.clone(),
            responsibility: a.responsibility.clone(),
            certainty: a.certainty.clone(),
            source: API_SOURCE.to_string(),
        }
    }

    /// Validates, journals (durably), and returns the successor state.
    ///
    /// `self` is untouched; on any error the journal is unchanged.
    pub fn append_assertion(&self, a: &NewAssertion) -> Result<(CorpusState, JournalRecord), ServiceError> {
        let diagnostics = self.check(a);
        if diagnostics.iter().any(Diagnostic::is_error) {
            return Err(ServiceError::Rejected { diagnostics });
        }
        let record_id = self.journal.last().map_or(1, |r| r.record_id + 1);
        let received_at = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
        let record = self.record(a, record_id, received_at);
        append_record(&self.dir.join(JOURNAL_FILE), &record)?;

        let mut journal = (*self.journal).clone();
        journal.push(record.clone());
        let snapshot = build_snapshot(&self.documents, &journal, &self.config);
        let next = CorpusState {
            journal: Arc::new(journal),
            snapshot: Arc::new(snapshot),
            ..self.clone()
        };
        Ok((next, record))
    }
}
