use std::collections::{BTreeMap, BTreeSet};

use super::{Document, IngestConfig, IngestResult, SegType};
use crate::assertion::RelationAssertion;
use crate::diagnostic::Diagnostic;
use crate::iri::saws;
use crate::vocabulary::Vocabulary;

/// Document-level profile rules: statement/narrative segments need a
/// contentItem ancestor, and segment xml:ids are unique.
pub fn document_diagnostics(doc: &Document) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut first_seen: BTreeMap<&str, &str> = BTreeMap::new();

    fn walk<'a>(
        doc: &'a Document,
        seg: &'a super::Segment,
        in_item: bool,
        first_seen: &mut BTreeMap<&'a str, &'a str>,
        out: &mut Vec<Diagnostic>,
    ) {
        if matches!(seg.seg_type, SegType::Statement | SegType::Narrative) && !in_item {
            out.push(
                Diagnostic::error(
                    "nesting-violation",
                    format!("{} segment is not inside a contentItem segment", seg.seg_type),
                )
                .with_doc(&doc.doc_id)
                .with_locator(&seg.locator),
            );
        }
        if let Some(id) = &seg.xml_id {
            if let Some(first) = first_seen.get(id.as_str()) {
                out.push(
                    Diagnostic::error(
                        "duplicate-id",
                        format!("xml:id `{id}` used at {first} and again at {}", seg.locator),
                    )
                    .with_doc(&doc.doc_id)
                    .with_locator(&seg.locator),
                );
            } else {
                first_seen.insert(id, &seg.locator);
            }
        }
        let in_item = in_item || seg.seg_type == SegType::ContentItem;
        for c in &seg.children {
            walk(doc, c, in_item, first_seen, out);
        }
    }

    for seg in &doc.root_segments {
        walk(doc, seg, false, &mut first_seen, &mut out);
    }
    out
}

/// Concept IRI of every identified segment, keyed by segment IRI.
pub fn segment_types(doc: &Document, config: &IngestConfig) -> BTreeMap<String, String> {
    doc.segments()
        .into_iter()
        .filter_map(|(seg, _)| {
            let iri = seg.iri.clone()?;
            let concept = config.concept_for(&seg.seg_type).unwrap_or(saws::LINGUISTIC_OBJECT);
            Some((iri, concept.to_string()))
        })
        .collect()
}

/// Profile validation of one ingested document against a vocabulary.
///
/// Per assertion: the responsibility attribute is present, the predicate is
/// declared, and domain/range hold for endpoints that are typed local segments
/// (external endpoints are untyped and only warn). Per document: nesting and
/// xml:id uniqueness.
pub fn validate_profile(result: &IngestResult, voc: &Vocabulary, config: &IngestConfig) -> Vec<Diagnostic> {
    let doc = &result.document;
    let mut out = document_diagnostics(doc);
    let types = segment_types(doc, config);
    let type_set = |iri: &str| -> BTreeSet<String> { types.get(iri).cloned().into_iter().collect() };

    for a in &result.assertions {
        let tag = |d: Diagnostic| d.with_doc(&doc.doc_id).with_locator(&a.source_locator);
        if a.responsibility.is_none() {
            out.push(tag(Diagnostic::error(
                "missing-resp",
                "assertion has no responsibility; @resp is required",
            )));
        }
        match voc.check_assertion(&a.predicate, &type_set(&a.subject), &type_set(&a.object)) {
            Ok(diags) => out.extend(diags.into_iter().map(tag)),
            Err(_) => out.push(tag(Diagnostic::error(
                "unknown-predicate",
                format!("<{}> is not a property of the vocabulary", a.predicate),
            )
            .with_iris([a.predicate.as_str()]))),
        }
    }
    out
}

/// Corpus-level locality: assertion endpoints under the base URI must name an
/// existing segment of some document in the corpus.
pub fn check_local_iris<'a, D, A>(documents: D, assertions: A, config: &IngestConfig) -> Vec<Diagnostic>
where
    D: IntoIterator<Item = &'a Document>,
    A: IntoIterator<Item = &'a RelationAssertion>,
{
    let known: BTreeSet<String> = documents
        .into_iter()
        .flat_map(|d| d.segments().into_iter().filter_map(|(s, _)| s.iri.clone()))
        .collect();
    let mut out = Vec::new();
    for a in assertions {
        for (role, iri) in [("subject", &a.subject), ("object", &a.object)] {
            if iri.starts_with(&config.base_uri) && !known.contains(iri) {
                out.push(
                    Diagnostic::error(
                        "dangling-local-iri",
                        format!("{role} <{iri}> is under the corpus base URI but names no segment"),
                    )
                    .with_iris([iri.as_str()])
                    .with_doc(&a.source_doc)
                    .with_locator(&a.source_locator),
                );
            }
        }
    }
    out
}
