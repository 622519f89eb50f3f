//! Corpus-level queries over a snapshot: related-segment cards, panel
//! alignment, transmission paths, network neighbourhoods and entity indices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assertion::CertaintyNote;
use crate::graph::{reachable, Direction, GraphSnapshot, Path, Term};
use crate::iri::saws;
use crate::tei::{Document, EntityKind, IngestConfig, Segment};
use crate::vocabulary::{LookupError, Vocabulary};

pub const MAX_PATH_DEPTH: usize = 8;
pub const MAX_NETWORK_DEPTH: usize = 3;
pub const LABEL_CHARS: usize = 80;

/// Where a local segment lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub doc_id: String,
    /// Pre-order position within its document.
    pub position: usize,
    pub text: String,
}

pub trait CorpusLookup {
    fn locate(&self, iri: &str) -> Option<&Located>;
}

/// Segment IRI → location, over every identified segment of a corpus.
#[derive(Debug, Clone, Default)]
pub struct CorpusIndex {
    segments: BTreeMap<String, Located>,
}

impl CorpusIndex {
    pub fn new<'a, I: IntoIterator<Item = &'a Document>>(docs: I) -> CorpusIndex {
        let mut segments = BTreeMap::new();
        for doc in docs {
            for (position, (seg, _)) in doc.segments().into_iter().enumerate() {
                if let Some(iri) = &seg.iri {
                    segments.entry(iri.clone()).or_insert_with(|| Located {
                        doc_id: doc.doc_id.clone(),
                        position,
                        text: seg.text_content.clone(),
                    });
                }
            }
        }
        CorpusIndex { segments }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

impl CorpusLookup for CorpusIndex {
    fn locate(&self, iri: &str) -> Option<&Located> {
        self.segments.get(iri)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CardDirection {
    Outgoing,
    Incoming,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCard {
    pub other_segment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_doc: Option<String>,
    pub predicate: String,
    pub direction: CardDirection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub responsibility: Option<String>,
    pub certainty: Vec<CertaintyNote>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub focus: String,
    pub groups: BTreeMap<String, Vec<RelationCard>>,
    pub external: Vec<RelationCard>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NodeKind {
    LocalSegment,
    ExternalResource,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NetworkNode {
    pub iri: String,
    pub kind: NodeKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub from: String,
    pub to: String,
    pub predicate: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkNeighborhood {
    pub focus: String,
    pub depth: usize,
    pub nodes: Vec<NetworkNode>,
    pub edges: Vec<NetworkEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occurrence {
    pub doc_id: String,
    /// Nearest identified segment, or the document IRI.
    pub target: String,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub kind: EntityKind,
    pub normalized: String,
    pub occurrences: Vec<Occurrence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub authority_iri: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntertextError {
    #[error("depth {depth} is outside 1..={max}")]
    Depth { depth: usize, max: usize },
    #[error(transparent)]
    Lookup(#[from] LookupError),
}

fn related_family(voc: &Vocabulary) -> BTreeSet<String> {
    voc.subproperty_closure(saws::IS_RELATED_TO).unwrap_or_default()
}

/// One card per stored quad linking `focus` to another IRI by a relation in
/// the isRelatedTo family. Self-loops and literal objects are skipped.
pub fn related_segments(
    g: &GraphSnapshot,
    voc: &Vocabulary,
    corpus: &impl CorpusLookup,
    focus: &str,
) -> Vec<RelationCard> {
    let mut cards = Vec::new();
    let focus_term = Term::iri(focus);
    for p in related_family(voc) {
        let outgoing = g
            .matching(Some(focus), Some(&p), None)
            .into_iter()
            .filter_map(|q| Some((q, q.o.as_iri()?.to_string(), CardDirection::Outgoing)));
        let incoming = g
            .matching(None, Some(&p), Some(&focus_term))
            .into_iter()
            .map(|q| (q, q.s.clone(), CardDirection::Incoming));
        for (q, other, direction) in outgoing.chain(incoming) {
            if other == focus {
                continue;
            }
            let meta = q.meta.as_ref();
            cards.push(RelationCard {
                other_doc: corpus.locate(&other).map(|l| l.doc_id.clone()),
                other_segment: other,
                predicate: q.p.clone(),
                direction,
                responsibility: meta.and_then(|m| m.responsibility.clone()),
                certainty: meta.map(|m| m.certainty.clone()).unwrap_or_default(),
            });
        }
    }
    cards.sort_by(|a, b| {
        (&a.other_doc, &a.predicate, &a.other_segment, a.direction).cmp(&(
            &b.other_doc,
            &b.predicate,
            &b.other_segment,
            b.direction,
        ))
    });
    cards
}

/// Whether `iri` has at least one related-segment card.
pub fn has_relations(g: &GraphSnapshot, voc: &Vocabulary, iri: &str) -> bool {
    let term = Term::iri(iri);
    related_family(voc).iter().any(|p| {
        g.matching(Some(iri), Some(p), None)
            .iter()
            .any(|q| q.o.as_iri().is_some_and(|o| o != iri))
            || g.matching(None, Some(p), Some(&term)).iter().any(|q| q.s != iri)
    })
}

/// Partition of [`related_segments`] into open-document groups (each in
/// document order) and everything else.
pub fn alignment(
    g: &GraphSnapshot,
    voc: &Vocabulary,
    corpus: &impl CorpusLookup,
    focus: &str,
    open_docs: &BTreeSet<String>,
) -> AlignmentResult {
    let mut groups: BTreeMap<String, Vec<RelationCard>> = BTreeMap::new();
    let mut external = Vec::new();
    for card in related_segments(g, voc, corpus, focus) {
        match &card.other_doc {
            Some(doc) if open_docs.contains(doc) => groups.entry(doc.clone()).or_default().push(card),
            _ => external.push(card),
        }
    }
    for cards in groups.values_mut() {
        cards.sort_by_key(|c| corpus.locate(&c.other_segment).map(|l| l.position));
    }
    AlignmentResult {
        focus: focus.to_string(),
        groups,
        external,
    }
}

/// Simple paths from `from` along isRelatedTo-family edges in either
/// direction, optionally only those ending at `to`.
pub fn transmission_paths(
    g: &GraphSnapshot,
    voc: &Vocabulary,
    from: &str,
    to: Option<&str>,
    max_depth: usize,
) -> Result<BTreeSet<Path>, IntertextError> {
    if !(1..=MAX_PATH_DEPTH).contains(&max_depth) {
        return Err(IntertextError::Depth {
            depth: max_depth,
            max: MAX_PATH_DEPTH,
        });
    }
    let mut paths = reachable(g, voc, from, saws::IS_RELATED_TO, max_depth, Direction::Both)?;
    if let Some(to) = to {
        paths.retain(|p| p.end() == to);
    }
    Ok(paths)
}

/// Nodes within `depth` undirected hops of `focus` over isRelatedTo-family
/// edges, and the edges that reach them. `depth` is clamped to 1..=3.
pub fn network_neighborhood(
    g: &GraphSnapshot,
    voc: &Vocabulary,
    corpus: &impl CorpusLookup,
    focus: &str,
    depth: usize,
) -> NetworkNeighborhood {
    let depth = depth.clamp(1, MAX_NETWORK_DEPTH);
    let family = related_family(voc);
    let edges_of = |node: &str| -> Vec<NetworkEdge> {
        let term = Term::iri(node);
        let mut out = Vec::new();
        for p in &family {
            for q in g.matching(Some(node), Some(p), None) {
                if let Some(o) = q.o.as_iri() {
                    out.push(NetworkEdge {
                        from: q.s.clone(),
                        to: o.to_string(),
                        predicate: p.clone(),
                    });
                }
            }
            for q in g.matching(None, Some(p), Some(&term)) {
                out.push(NetworkEdge {
                    from: q.s.clone(),
                    to: node.to_string(),
                    predicate: p.clone(),
                });
            }
        }
        out
    };

    let mut distance: BTreeMap<String, usize> = BTreeMap::from([(focus.to_string(), 0)]);
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::from([focus.to_string()]);
    while let Some(node) = queue.pop_front() {
        let d = distance[&node];
        if d >= depth {
            continue;
        }
        for e in edges_of(&node) {
            let other = if e.from == node { e.to.clone() } else { e.from.clone() };
            if !distance.contains_key(&other) {
                distance.insert(other.clone(), d + 1);
                queue.push_back(other);
            }
            edges.insert(e);
        }
    }

    let nodes = distance
        .keys()
        .map(|iri| match corpus.locate(iri) {
            Some(l) => NetworkNode {
                iri: iri.clone(),
                kind: NodeKind::LocalSegment,
                label: l.text.chars().take(LABEL_CHARS).collect(),
            },
            None => NetworkNode {
                iri: iri.clone(),
                kind: NodeKind::ExternalResource,
                label: iri.clone(),
            },
        })
        .collect();
    NetworkNeighborhood {
        focus: focus.to_string(),
        depth,
        nodes,
        edges: edges.into_iter().collect(),
    }
}

/// Entity index over a corpus, grouped by kind and normalized form (surface
/// form when no normalization is given). Distinct authority IRIs under one
/// form yield separate entries; occurrences without an IRI join the first.
pub fn build_indices<'a, I>(docs: I, config: &IngestConfig) -> Vec<IndexEntry>
where
    I: IntoIterator<Item = &'a Document>,
{
    type Key = (EntityKind, String);
    let mut grouped: BTreeMap<Key, BTreeMap<Option<String>, Vec<Occurrence>>> = BTreeMap::new();

    fn walk<'s>(seg: &'s Segment, nearest: Option<&'s str>, out: &mut Vec<(&'s Segment, Option<&'s str>)>) {
        let nearest = seg.iri.as_deref().or(nearest);
        out.push((seg, nearest));
        for c in &seg.children {
            walk(c, nearest, out);
        }
    }

    for doc in docs {
        let doc_iri = config.doc_iri(&doc.doc_id);
        let mut placed = Vec::new();
        for seg in &doc.root_segments {
            walk(seg, None, &mut placed);
        }
        let refs = doc
            .entities
            .iter()
            .map(|e| (e, doc_iri.as_str()))
            .chain(placed.iter().flat_map(|(seg, nearest)| {
                let target = nearest.unwrap_or(doc_iri.as_str());
                seg.entities.iter().map(move |e| (e, target))
            }));
        for (e, target) in refs {
            let normalized = e.normalized.clone().unwrap_or_else(|| e.surface.clone());
            grouped
                .entry((e.kind, normalized))
                .or_default()
                .entry(e.authority_iri.clone())
                .or_default()
                .push(Occurrence {
                    doc_id: doc.doc_id.clone(),
                    target: target.to_string(),
                    surface: e.surface.clone(),
                });
        }
    }

    let mut entries = Vec::new();
    for ((kind, normalized), mut by_authority) in grouped {
        let unattributed = by_authority.remove(&None).unwrap_or_default();
        if by_authority.is_empty() {
            entries.push(IndexEntry {
                kind,
                normalized,
                occurrences: unattributed,
                authority_iri: None,
            });
            continue;
        }
        let mut unattributed = Some(unattributed);
        for (authority, mut occurrences) in by_authority {
            if let Some(extra) = unattributed.take() {
                occurrences.extend(extra);
            }
            entries.push(IndexEntry {
                kind,
                normalized: normalized.clone(),
                occurrences,
                authority_iri: authority,
            });
        }
    }
    entries.sort_by(|a, b| (&a.normalized, a.kind, &a.authority_iri).cmp(&(&b.normalized, b.kind, &b.authority_iri)));
    entries
}
