//! TEI ingestion for the sayings profile: `<seg>` trees with minted IRIs,
//! `<relation>` assertions with `<certainty>` notes, line/page anchors, and
//! person/place references.

mod parse;
mod profile;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assertion::RelationAssertion;
use crate::diagnostic::Diagnostic;
use crate::graph::{Quad, Term};
use crate::iri::{self, saws};

pub use parse::{parse_document, parse_document_at};
pub use profile::{check_local_iris, document_diagnostics, segment_types, validate_profile};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SegType {
    ContentItem,
    Statement,
    Narrative,
    Other(String),
}

impl SegType {
    pub fn as_str(&self) -> &str {
        match self {
            SegType::ContentItem => "contentItem",
            SegType::Statement => "statement",
            SegType::Narrative => "narrative",
            SegType::Other(s) => s,
        }
    }
}

impl From<String> for SegType {
    fn from(s: String) -> Self {
        match s.as_str() {
            "contentItem" => SegType::ContentItem,
            "statement" => SegType::Statement,
            "narrative" => SegType::Narrative,
            _ => SegType::Other(s),
        }
    }
}

impl From<SegType> for String {
    fn from(t: SegType) -> String {
        t.as_str().to_string()
    }
}

impl fmt::Display for SegType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SegType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SegType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(SegType::from)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineAnchor {
    pub line: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EntityKind {
    Person,
    PlaceGeo,
    PlaceEthnic,
    PersonalName,
    EthnicGroup,
}

impl EntityKind {
    pub const ALL: [EntityKind; 5] = [
        EntityKind::Person,
        EntityKind::PlaceGeo,
        EntityKind::PlaceEthnic,
        EntityKind::PersonalName,
        EntityKind::EthnicGroup,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Person => "person",
            EntityKind::PlaceGeo => "placeGeo",
            EntityKind::PlaceEthnic => "placeEthnic",
            EntityKind::PersonalName => "personalName",
            EntityKind::EthnicGroup => "ethnicGroup",
        }
    }

    pub fn parse(s: &str) -> Option<EntityKind> {
        EntityKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRef {
    pub kind: EntityKind,
    pub surface: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub authority_iri: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub xml_id: Option<String>,
    /// Minted from `xml_id` when it is usable in an IRI.
    pub iri: Option<String>,
    pub seg_type: SegType,
    pub text_content: String,
    pub children: Vec<Segment>,
    pub line_anchors: Vec<LineAnchor>,
    pub entities: Vec<EntityRef>,
    pub locator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    pub language: String,
    pub root_segments: Vec<Segment>,
    pub header_bibliography: Vec<String>,
    pub source_path: String,
    /// References in the text body that fall outside every segment.
    pub entities: Vec<EntityRef>,
}

impl Document {
    /// Pre-order (document order) walk yielding each segment with its parent.
    pub fn segments(&self) -> Vec<(&Segment, Option<&Segment>)> {
        fn walk<'a>(seg: &'a Segment, parent: Option<&'a Segment>, out: &mut Vec<(&'a Segment, Option<&'a Segment>)>) {
            out.push((seg, parent));
            for c in &seg.children {
                walk(c, Some(seg), out);
            }
        }
        let mut out = Vec::new();
        for s in &self.root_segments {
            walk(s, None, &mut out);
        }
        out
    }

    /// Total entity references, in segments and unsegmented.
    pub fn entity_count(&self) -> usize {
        self.entities.len() + self.segments().iter().map(|(s, _)| s.entities.len()).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestConfig {
    pub base_uri: String,
    pub strictness: Strictness,
    pub seg_type_to_concept: BTreeMap<String, String>,
}

impl IngestConfig {
    /// Lenient config with the default segment-type mapping.
    pub fn new(base_uri: impl Into<String>) -> Result<IngestConfig, IngestError> {
        let base_uri = base_uri.into();
        if !base_uri.ends_with('/') || !iri::is_absolute(&base_uri) {
            return Err(IngestError::Config(format!(
                "base URI `{base_uri}` must be an absolute IRI ending with `/`"
            )));
        }
        let seg_type_to_concept = [
            ("contentItem", saws::CONTENT_ITEM),
            ("statement", saws::STATEMENT),
            ("narrative", saws::NARRATIVE),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        Ok(IngestConfig {
            base_uri,
            strictness: Strictness::Lenient,
            seg_type_to_concept,
        })
    }

    pub fn strict(mut self) -> Self {
        self.strictness = Strictness::Strict;
        self
    }

    pub fn doc_iri(&self, doc_id: &str) -> String {
        format!("{}{doc_id}", self.base_uri)
    }

    /// `base_uri + doc_id + "#" + xml_id`.
    pub fn segment_uri(&self, doc_id: &str, xml_id: &str) -> Result<String, IngestError> {
        segment_uri(self, doc_id, xml_id)
    }

    /// Concept for a segment type; unknown types map to LinguisticObject.
    pub fn concept_for(&self, seg_type: &SegType) -> Option<&str> {
        self.seg_type_to_concept.get(seg_type.as_str()).map(String::as_str)
    }
}

pub fn segment_uri(config: &IngestConfig, doc_id: &str, xml_id: &str) -> Result<String, IngestError> {
    if doc_id.is_empty() || xml_id.is_empty() {
        return Err(IngestError::InvalidId(format!(
            "empty identifier (doc `{doc_id}`, xml:id `{xml_id}`)"
        )));
    }
    for (what, v) in [("doc id", doc_id), ("xml:id", xml_id)] {
        if v.chars().any(|c| c == '#' || c.is_whitespace()) {
            return Err(IngestError::InvalidId(format!(
                "{what} `{v}` contains `#` or whitespace"
            )));
        }
    }
    let out = format!("{}{doc_id}#{xml_id}", config.base_uri);
    if !iri::is_absolute(&out) {
        return Err(IngestError::InvalidId(format!("`{out}` is not a valid IRI")));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestResult {
    pub document: Document,
    pub assertions: Vec<RelationAssertion>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IngestError {
    #[error("XML error at line {line}, column {column}: {message}")]
    Xml {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("profile violation: {}", .diagnostics.iter().filter(|d| d.is_error()).map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Profile { diagnostics: Vec<Diagnostic> },
    #[error("invalid identifier: {0}")]
    InvalidId(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Collapses whitespace runs to single spaces and trims both ends.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Type, containment and document-metadata quads implied by the markup.
///
/// Order is document metadata first, then segments in document order, each
/// contributing its type quad followed by the containment quad from its parent.
pub fn structural_triples(document: &Document, config: &IngestConfig) -> (Vec<Quad>, Vec<Diagnostic>) {
    let mut quads = Vec::new();
    let mut diags = Vec::new();
    let doc_iri = config.doc_iri(&document.doc_id);
    if !document.title.is_empty() {
        quads.push(Quad::new(&doc_iri, iri::DCTERMS_TITLE, Term::literal(&document.title)));
    }
    if !document.language.is_empty() {
        quads.push(Quad::new(
            &doc_iri,
            iri::DCTERMS_LANGUAGE,
            Term::literal(&document.language),
        ));
    }
    for (seg, parent) in document.segments() {
        let Some(seg_iri) = &seg.iri else {
            diags.push(
                Diagnostic::info(
                    "unidentified-segment",
                    format!("{} segment has no usable xml:id; no triples emitted", seg.seg_type),
                )
                .with_doc(&document.doc_id)
                .with_locator(&seg.locator),
            );
            continue;
        };
        let concept = match config.concept_for(&seg.seg_type) {
            Some(c) => c,
            None => {
                diags.push(
                    Diagnostic::warning(
                        "unknown-seg-type",
                        format!(
                            "segment type `{}` has no concept mapping; typed as LinguisticObject",
                            seg.seg_type
                        ),
                    )
                    .with_doc(&document.doc_id)
                    .with_locator(&seg.locator),
                );
                saws::LINGUISTIC_OBJECT
            }
        };
        quads.push(Quad::new(seg_iri, iri::RDF_TYPE, Term::iri(concept)));
        if let Some(parent_iri) = parent.and_then(|p| p.iri.as_ref()) {
            quads.push(Quad::new(parent_iri, saws::CONTAINS, Term::iri(seg_iri.as_str())));
        }
    }
    (quads, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uri_minting() {
        let c = IngestConfig::new("http://example.org/saws/").unwrap();
        assert_eq!(
            segment_uri(&c, "GnomVat", "AppGnomVat001s2").unwrap(),
            "http://example.org/saws/GnomVat#AppGnomVat001s2"
        );
        assert!(segment_uri(&c, "GnomVat", "a#b").is_err());
        assert!(segment_uri(&c, "GnomVat", "a b").is_err());
        assert!(segment_uri(&c, "", "a").is_err());
    }

    #[test]
    fn config_requires_trailing_slash() {
        assert!(IngestConfig::new("http://example.org/saws").is_err());
        assert!(IngestConfig::new("relative/").is_err());
    }

    #[test]
    fn whitespace_normalization_is_idempotent() {
        let once = normalize_whitespace("  Both equally,\n   for one\tgave ");
        assert_eq!(once, "Both equally, for one gave");
        assert_eq!(normalize_whitespace(&once), once);
    }

    #[test]
    fn seg_type_round_trip() {
        for s in ["contentItem", "statement", "narrative", "apparatus"] {
            assert_eq!(SegType::from(s.to_string()).as_str(), s);
        }
        assert_eq!(SegType::from("statement".to_string()), SegType::Statement);
    }
}
