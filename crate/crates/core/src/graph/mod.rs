//! Immutable, triply-indexed quad store with per-assertion provenance.

mod ntriples;
mod reach;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assertion::CertaintyNote;
use crate::iri;
use crate::vocabulary::{LookupError, Vocabulary};

pub use ntriples::{export_ntriples, import_ntriples, NTriplesError};
pub use reach::{reachable, Direction, Path, Step};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Iri(String),
    Literal {
        lexical: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lang: Option<String>,
    },
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Term {
        Term::Iri(value.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            lang: None,
        }
    }

    pub fn lang_literal(lexical: impl Into<String>, lang: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            lang: Some(lang.into()),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(value) => Some(value),
            Term::Literal { .. } => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&ntriples::term_to_string(self))
    }
}

/// Provenance carried by quads that came from a relation assertion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AssertionMeta {
    pub assertion_id: String,
    pub responsibility: Option<String>,
    pub certainty: Vec<CertaintyNote>,
    pub source_doc: String,
}

impl AssertionMeta {
    /// Deterministic assertion IRI from the identifying fields.
    pub fn mint_id(s: &str, p: &str, o: &Term, responsibility: Option<&str>, source: &str) -> String {
        let mut h = Sha256::new();
        for part in [s, p, &ntriples::term_to_string(o), responsibility.unwrap_or(""), source] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        let digest = h.finalize();
        let hex: String = digest[..16].iter().map(|b| format!("{b:02x}")).collect();
        format!("{}{hex}", iri::ASSERTION_PREFIX)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quad {
    pub s: String,
    pub p: String,
    pub o: Term,
    pub meta: Option<AssertionMeta>,
}

impl Quad {
    pub fn new(s: impl Into<String>, p: impl Into<String>, o: Term) -> Quad {
        Quad {
            s: s.into(),
            p: p.into(),
            o,
            meta: None,
        }
    }

    fn key(&self) -> (&str, &str, &Term, Option<&str>) {
        (
            &self.s,
            &self.p,
            &self.o,
            self.meta.as_ref().map(|m| m.assertion_id.as_str()),
        )
    }

    /// Same quad without provenance.
    pub fn stripped(&self) -> Quad {
        Quad::new(self.s.clone(), self.p.clone(), self.o.clone())
    }
}

type IndexKey = (u32, u32, u32, u32);

/// An immutable quad set with SPO, POS and OSP orderings.
///
/// Terms are interned in sorted order, so index order is also lexical term
/// order and every query result is deterministic.
#[derive(Debug, Clone, Default)]
pub struct GraphSnapshot {
    terms: Vec<Term>,
    quads: Vec<Quad>,
    spo: BTreeSet<IndexKey>,
    pos: BTreeSet<IndexKey>,
    osp: BTreeSet<IndexKey>,
}

impl GraphSnapshot {
    /// Builds a snapshot; quads equal in (s, p, o, assertion id) collapse to the first seen.
    pub fn build<I: IntoIterator<Item = Quad>>(quads: I) -> GraphSnapshot {
        let mut quads: Vec<Quad> = quads.into_iter().collect();
        quads.sort_by(|a, b| a.key().cmp(&b.key()));
        quads.dedup_by(|b, a| {
            if a.key() != b.key() {
                return false;
            }
            // same assertion stated twice: keep every certainty note once
            if let (Some(kept), Some(dropped)) = (a.meta.as_mut(), b.meta.as_ref()) {
                if kept.certainty != dropped.certainty {
                    kept.certainty.extend(dropped.certainty.iter().cloned());
                    kept.certainty.sort();
                    kept.certainty.dedup();
                }
            }
            true
        });

        let mut terms: Vec<Term> = quads
            .iter()
            .flat_map(|q| [Term::Iri(q.s.clone()), Term::Iri(q.p.clone()), q.o.clone()])
            .collect();
        terms.sort();
        terms.dedup();

        let mut g = GraphSnapshot {
            terms,
            ..Default::default()
        };
        for (i, q) in quads.iter().enumerate() {
            let s = g.iri_id(&q.s).expect("interned");
            let p = g.iri_id(&q.p).expect("interned");
            let o = g.term_id(&q.o).expect("interned");
            let i = i as u32;
            g.spo.insert((s, p, o, i));
            g.pos.insert((p, o, s, i));
            g.osp.insert((o, s, p, i));
        }
        g.quads = quads;
        g
    }

    fn term_id(&self, t: &Term) -> Option<u32> {
        self.terms.binary_search(t).ok().map(|i| i as u32)
    }

    fn iri_id(&self, s: &str) -> Option<u32> {
        // avoid allocating a Term for the probe
        self.terms
            .binary_search_by(|t| match t {
                Term::Iri(value) => value.as_str().cmp(s),
                Term::Literal { .. } => std::cmp::Ordering::Greater,
            })
            .ok()
            .map(|i| i as u32)
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    /// All quads in (s, p, o, assertion id) order.
    pub fn quads(&self) -> &[Quad] {
        &self.quads
    }

    /// Sizes of the SPO, POS and OSP indices.
    pub fn index_sizes(&self) -> (usize, usize, usize) {
        (self.spo.len(), self.pos.len(), self.osp.len())
    }

    /// Membership in all three indices, keyed by (s, p, o, assertion id).
    pub fn contains(&self, q: &Quad) -> bool {
        let (Some(s), Some(p), Some(o)) = (self.iri_id(&q.s), self.iri_id(&q.p), self.term_id(&q.o)) else {
            return false;
        };
        let Ok(i) = self.quads.binary_search_by(|x| x.key().cmp(&q.key())) else {
            return false;
        };
        let i = i as u32;
        self.spo.contains(&(s, p, o, i)) && self.pos.contains(&(p, o, s, i)) && self.osp.contains(&(o, s, p, i))
    }

    /// Quads agreeing with every bound position, in index order.
    pub fn matching(&self, s: Option<&str>, p: Option<&str>, o: Option<&Term>) -> Vec<&Quad> {
        let s = match s.map(|s| self.iri_id(s)) {
            Some(None) => return Vec::new(),
            other => other.flatten(),
        };
        let p = match p.map(|p| self.iri_id(p)) {
            Some(None) => return Vec::new(),
            other => other.flatten(),
        };
        let o = match o.map(|o| self.term_id(o)) {
            Some(None) => return Vec::new(),
            other => other.flatten(),
        };
        let hits: Box<dyn Iterator<Item = u32> + '_> = match (s, p, o) {
            (Some(s), Some(p), Some(o)) => Box::new(scan(&self.spo, &[s, p, o]).map(|k| k.3)),
            (Some(s), Some(p), None) => Box::new(scan(&self.spo, &[s, p]).map(|k| k.3)),
            (Some(s), None, Some(o)) => Box::new(scan(&self.osp, &[o, s]).map(|k| k.3)),
            (Some(s), None, None) => Box::new(scan(&self.spo, &[s]).map(|k| k.3)),
            (None, Some(p), Some(o)) => Box::new(scan(&self.pos, &[p, o]).map(|k| k.3)),
            (None, Some(p), None) => Box::new(scan(&self.pos, &[p]).map(|k| k.3)),
            (None, None, Some(o)) => Box::new(scan(&self.osp, &[o]).map(|k| k.3)),
            (None, None, None) => Box::new(self.spo.iter().map(|k| k.3)),
        };
        hits.map(|i| &self.quads[i as usize]).collect()
    }

    /// Union of [`matching`](Self::matching) over every sub-property of `p`.
    ///
    /// With `include_symmetric`, symmetric properties also match with subject and
    /// object swapped (only quads with IRI objects can be read backwards); the
    /// stored quad is returned either way. Results are
    /// deduplicated and ordered by quad key.
    pub fn match_subsumed(
        &self,
        voc: &Vocabulary,
        s: Option<&str>,
        p: &str,
        o: Option<&Term>,
        include_symmetric: bool,
    ) -> Result<Vec<&Quad>, LookupError> {
        let closure = voc.subproperty_closure(p)?;
        let mut out: Vec<&Quad> = Vec::new();
        for q in &closure {
            out.extend(self.matching(s, Some(q), o));
            let symmetric = voc.property(q).is_some_and(|d| d.symmetric);
            if include_symmetric && symmetric {
                let swapped_s = match o {
                    Some(Term::Iri(value)) => Some(Some(value.as_str())),
                    Some(Term::Literal { .. }) => None,
                    None => Some(None),
                };
                if let Some(swapped_s) = swapped_s {
                    let swapped_o = s.map(Term::iri);
                    out.extend(
                        self.matching(swapped_s, Some(q), swapped_o.as_ref())
                            .into_iter()
                            .filter(|m| m.o.as_iri().is_some()),
                    );
                }
            }
        }
        out.sort_by(|a, b| a.key().cmp(&b.key()));
        out.dedup_by(|a, b| a.key() == b.key());
        Ok(out)
    }
}

fn scan<'a>(index: &'a BTreeSet<IndexKey>, prefix: &[u32]) -> impl Iterator<Item = &'a IndexKey> + 'a {
    let mut lo = [0u32; 4];
    let mut hi = [u32::MAX; 4];
    lo[..prefix.len()].copy_from_slice(prefix);
    hi[..prefix.len()].copy_from_slice(prefix);
    index.range((lo[0], lo[1], lo[2], lo[3])..=(hi[0], hi[1], hi[2], hi[3]))
}
