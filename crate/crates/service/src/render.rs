//! JSON shapes handed to panel viewers.

use std::collections::BTreeSet;

use gnomon_core::intertext::has_relations;
use gnomon_core::tei::LineAnchor;
use gnomon_core::{EntityRef, GraphSnapshot, SegType, Segment, Vocabulary};
use serde::Serialize;

use crate::error::ServiceError;
use crate::state::CorpusState;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentSummary {
    pub doc_id: String,
    pub title: String,
    pub language: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SegmentView {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iri: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xml_id: Option<String>,
    pub seg_type: SegType,
    pub text: String,
    pub line_anchors: Vec<LineAnchor>,
    pub has_relations: bool,
    pub entities: Vec<EntityRef>,
    pub children: Vec<SegmentView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentView {
    pub doc_id: String,
    pub iri: String,
    pub title: String,
    pub language: String,
    pub bibliography: Vec<String>,
    pub segments: Vec<SegmentView>,
    /// References outside every segment.
    pub entities: Vec<EntityRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Citation {
    pub doc_id: String,
    pub citation: String,
}

fn view(seg: &Segment, g: &GraphSnapshot, voc: &Vocabulary) -> SegmentView {
    SegmentView {
        iri: seg.iri.clone(),
        xml_id: seg.xml_id.clone(),
        seg_type: seg.seg_type.clone(),
        text: seg.text_content.clone(),
        line_anchors: seg.line_anchors.clone(),
        has_relations: seg.iri.as_deref().is_some_and(|iri| has_relations(g, voc, iri)),
        entities: seg.entities.clone(),
        children: seg.children.iter().map(|c| view(c, g, voc)).collect(),
    }
}

impl CorpusState {
    pub fn summaries(&self) -> Vec<DocumentSummary> {
        self.documents()
            .values()
            .map(|d| DocumentSummary {
                doc_id: d.document.doc_id.clone(),
                title: d.document.title.clone(),
                language: d.document.language.clone(),
            })
            .collect()
    }

    pub fn render_document(&self, doc_id: &str) -> Result<DocumentView, ServiceError> {
        let d = &self.document(doc_id)?.document;
        let g = self.snapshot();
        Ok(DocumentView {
            doc_id: d.doc_id.clone(),
            iri: self.config().doc_iri(&d.doc_id),
            title: d.title.clone(),
            language: d.language.clone(),
            bibliography: d.header_bibliography.clone(),
            segments: d.root_segments.iter().map(|s| view(s, g, self.vocabulary())).collect(),
            entities: d.entities.clone(),
        })
    }

    /// One provisional citation per distinct known document, in request order.
    pub fn citations(&self, doc_ids: &[String], retrieved: chrono::NaiveDate) -> Vec<Citation> {
        let mut seen = BTreeSet::new();
        doc_ids
            .iter()
            .filter(|id| seen.insert(id.as_str()))
            .filter_map(|id| self.documents().get(id))
            .map(|d| {
                let doc = &d.document;
                let title = if doc.title.is_empty() { &doc.doc_id } else { &doc.title };
                Citation {
                    doc_id: doc.doc_id.clone(),
                    citation: format!(
                        "{title}. {}. <{}>. Retrieved {}.",
                        doc.doc_id,
                        self.config().doc_iri(&doc.doc_id),
                        retrieved.format("%Y-%m-%d")
                    ),
                }
            })
            .collect()
    }
}
