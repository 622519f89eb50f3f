//! Random graph and property-DAG generators plus naive reference
//! implementations of the store's query operations.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gnomon_core::assertion::{CertaintyNote, CertaintyTarget, Degree};
use gnomon_core::vocabulary::PropertyDef;
use gnomon_core::{AssertionMeta, GraphSnapshot, Path, Quad, Step, Term, Vocabulary};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn prop(i: usize) -> String {
    format!("http://example.org/p/{i}")
}

pub fn node(i: usize) -> String {
    format!("http://example.org/n/{i}")
}

/// A property DAG of `n` properties: parents always have smaller indices.
pub fn random_vocab(rng: &mut StdRng, n: usize) -> Vocabulary {
    let mut voc = Vocabulary::default();
    for i in 0..n {
        let mut parents = BTreeSet::new();
        if i > 0 {
            for _ in 0..rng.gen_range(0..=2) {
                parents.insert(prop(rng.gen_range(0..i)));
            }
        }
        voc.properties.insert(
            prop(i),
            PropertyDef {
                iri: prop(i),
                label: format!("p{i}"),
                parents,
                domain: BTreeSet::new(),
                range: BTreeSet::new(),
                symmetric: rng.gen_bool(0.2),
            },
        );
    }
    voc
}

fn random_meta(rng: &mut StdRng, s: &str, p: &str, o: &Term) -> Option<AssertionMeta> {
    if !rng.gen_bool(0.3) {
        return None;
    }
    let resp = rng
        .gen_bool(0.7)
        .then(|| format!("http://viaf.org/viaf/{}/", rng.gen_range(1..4)));
    let certainty = if rng.gen_bool(0.5) {
        vec![CertaintyNote {
            target: *[CertaintyTarget::AssertionExistence, CertaintyTarget::PredicateValue]
                .choose(rng)
                .unwrap(),
            degree: *[Degree::Low, Degree::Medium, Degree::High].choose(rng).unwrap(),
        }]
    } else {
        Vec::new()
    };
    Some(AssertionMeta {
        assertion_id: AssertionMeta::mint_id(s, p, o, resp.as_deref(), "gen"),
        responsibility: resp,
        certainty,
        source_doc: String::new(),
    })
}

fn random_literal(rng: &mut StdRng) -> Term {
    let pool = [
        "plain",
        "with \"quotes\"",
        "line\nbreak",
        "tab\there",
        "ἀλέξανδρος",
        "back\\slash",
        "𝔸",
        "",
    ];
    let lexical = pool.choose(rng).unwrap().to_string();
    if rng.gen_bool(0.5) {
        Term::lang_literal(lexical, *["grc", "en", "ar"].choose(rng).unwrap())
    } else {
        Term::literal(lexical)
    }
}

/// Up to `max_edges` quads over `nodes` nodes and the given properties, with a
/// sprinkling of literal objects and provenance.
pub fn random_graph(rng: &mut StdRng, nodes: usize, max_edges: usize, props: usize) -> Vec<Quad> {
    let edges = rng.gen_range(0..=max_edges);
    (0..edges)
        .map(|_| {
            let s = node(rng.gen_range(0..nodes));
            let p = prop(rng.gen_range(0..props));
            let o = if rng.gen_bool(0.1) {
                random_literal(rng)
            } else {
                Term::iri(node(rng.gen_range(0..nodes)))
            };
            let meta = random_meta(rng, &s, &p, &o);
            Quad { s, p, o, meta }
        })
        .collect()
}

/// Sub-property closure by fixpoint over the parent relation.
pub fn naive_closure(voc: &Vocabulary, p: &str) -> BTreeSet<String> {
    let mut set = BTreeSet::from([p.to_string()]);
    loop {
        let before = set.len();
        for (iri, def) in &voc.properties {
            if def.parents.iter().any(|parent| set.contains(parent)) {
                set.insert(iri.clone());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

pub type QuadKey = (String, String, Term, Option<String>);

pub fn key(q: &Quad) -> QuadKey {
    (
        q.s.clone(),
        q.p.clone(),
        q.o.clone(),
        q.meta.as_ref().map(|m| m.assertion_id.clone()),
    )
}

/// Distinct quads of the input, as the store would keep them.
pub fn distinct(quads: &[Quad]) -> BTreeMap<QuadKey, Quad> {
    let mut out = BTreeMap::new();
    for q in quads {
        out.entry(key(q)).or_insert_with(|| q.clone());
    }
    out
}

pub fn scan(quads: &[Quad], s: Option<&str>, p: Option<&str>, o: Option<&Term>) -> BTreeSet<QuadKey> {
    distinct(quads)
        .into_keys()
        .filter(|(qs, qp, qo, _)| s.is_none_or(|s| s == qs) && p.is_none_or(|p| p == qp) && o.is_none_or(|o| o == qo))
        .collect()
}

/// Expand the property, then scan, adding swapped matches for symmetric members.
pub fn naive_match_subsumed(
    quads: &[Quad],
    voc: &Vocabulary,
    s: Option<&str>,
    p: &str,
    o: Option<&Term>,
) -> BTreeSet<QuadKey> {
    let mut out = BTreeSet::new();
    for q in naive_closure(voc, p) {
        out.extend(scan(quads, s, Some(&q), o));
        if voc.properties[&q].symmetric {
            for k in scan(quads, None, Some(&q), None) {
                let forward_s = k.2.as_iri();
                let swapped_ok = s.is_none_or(|s| Some(s) == forward_s)
                    && o.is_none_or(|o| *o == Term::iri(k.0.clone()))
                    && forward_s.is_some();
                if swapped_ok {
                    out.insert(k);
                }
            }
        }
    }
    out
}

pub fn keys_of(found: &[&Quad]) -> BTreeSet<QuadKey> {
    found.iter().map(|q| key(q)).collect()
}

/// Simple-path enumeration by fixpoint: keep extending every known path by
/// every admissible edge until nothing new appears.
pub fn naive_reachable(
    quads: &[Quad],
    voc: &Vocabulary,
    start: &str,
    root: &str,
    max_depth: usize,
    forward: bool,
    backward: bool,
) -> BTreeSet<Path> {
    let closure = naive_closure(voc, root);
    let edges: BTreeSet<(String, String, String)> = quads
        .iter()
        .filter(|q| closure.contains(&q.p))
        .filter_map(|q| Some((q.s.clone(), q.p.clone(), q.o.as_iri()?.to_string())))
        .collect();
    let mut paths: BTreeSet<Path> = BTreeSet::new();
    let empty = Path {
        start: start.to_string(),
        steps: Vec::new(),
    };
    loop {
        let mut added = Vec::new();
        for path in paths.iter().chain(std::iter::once(&empty)) {
            if path.steps.len() >= max_depth {
                continue;
            }
            let end = path.end().to_string();
            for (s, p, o) in &edges {
                let mut candidates = Vec::new();
                if forward && *s == end {
                    candidates.push((o.clone(), true));
                }
                if backward && *o == end {
                    candidates.push((s.clone(), false));
                }
                for (next, fwd) in candidates {
                    let seen = path.start == next || path.steps.iter().any(|st| st.node == next);
                    if seen {
                        continue;
                    }
                    let mut ext = path.clone();
                    ext.steps.push(Step {
                        predicate: p.clone(),
                        node: next,
                        forward: fwd,
                    });
                    if !paths.contains(&ext) {
                        added.push(ext);
                    }
                }
            }
        }
        if added.is_empty() {
            return paths;
        }
        paths.extend(added);
    }
}

pub fn snapshot(quads: &[Quad]) -> GraphSnapshot {
    GraphSnapshot::build(quads.iter().cloned())
}

pub const RELATED: [&str; 5] = [
    "http://purl.org/saws/ontology#isVariantOf",
    "http://purl.org/saws/ontology#isVerbatimOf",
    "http://purl.org/saws/ontology#isTranslationOf",
    "http://purl.org/saws/ontology#isShorterVersionOf",
    "http://purl.org/saws/ontology#isRelatedTo",
];

pub struct SyntheticCorpus {
    /// (file name, TEI text)
    pub files: Vec<(String, String)>,
    pub entity_refs: usize,
    pub relation_count: usize,
}

/// `docs` TEI documents `D0..`, each with `segs` content items holding one
/// statement, `entities` entity references spread over them, and `relations`
/// relation elements linking random statements (and the odd external IRI).
/// The first entity reference carries a Pleiades authority IRI.
pub fn synthetic_corpus(
    rng: &mut StdRng,
    base: &str,
    docs: usize,
    segs: usize,
    entities: usize,
    relations: usize,
) -> SyntheticCorpus {
    let places = ["Athens", "Alexandria", "Rhodes", "Sinope"];
    let people = ["Socrates", "Diogenes", "Plato"];
    let mut bodies: Vec<Vec<String>> = vec![vec![String::new(); segs]; docs];
    for e in 0..entities {
        let d = e % docs;
        let s = rng.gen_range(0..segs);
        let tag = if e == 0 {
            r#"<placeName key="Athens" ref="https://pleiades.stoa.org/places/579885">Athenai</placeName>"#.to_string()
        } else if rng.gen_bool(0.5) {
            let p = places.choose(rng).unwrap();
            let surface = if rng.gen_bool(0.5) {
                p.to_uppercase()
            } else {
                p.to_string()
            };
            format!(r#"<placeName key="{p}">{surface}</placeName>"#)
        } else {
            format!("<persName>{}</persName>", people.choose(rng).unwrap())
        };
        bodies[d][s].push_str(&tag);
        bodies[d][s].push(' ');
    }
    let seg_iri = |d: usize, s: usize| format!("{base}D{d}#D{d}s{s}");
    let mut relation_xml: Vec<String> = vec![String::new(); docs];
    for _ in 0..relations {
        let (d, s) = (rng.gen_range(0..docs), rng.gen_range(0..segs));
        let object = if rng.gen_bool(0.15) {
            format!("http://data.perseus.org/citations/urn:cts:x:{}", rng.gen_range(0..5))
        } else {
            seg_iri(rng.gen_range(0..docs), rng.gen_range(0..segs))
        };
        let p = RELATED.choose(rng).unwrap();
        relation_xml[d].push_str(&format!(
            r#"<relation resp="http://viaf.org/viaf/44335536/" ref="{p}" active="{}" passive="{object}"/>"#,
            seg_iri(d, s)
        ));
    }
    let files = (0..docs)
        .map(|d| {
            let items: String = (0..segs)
                .map(|s| {
                    format!(
                        r#"<seg type="contentItem" xml:id="D{d}c{s}"><seg type="statement" xml:id="D{d}s{s}"><lb/>Saying {s} of document {d}. {}</seg></seg>"#,
                        bodies[d][s]
                    )
                })
                .collect();
            let xml = format!(
                r#"<TEI xmlns="http://www.tei-c.org/ns/1.0" xml:id="D{d}"><teiHeader><fileDesc><titleStmt><title>Document {d}</title></titleStmt><sourceDesc><bibl>Edition {d}</bibl></sourceDesc></fileDesc><profileDesc><langUsage><language ident="grc"/></langUsage></profileDesc></teiHeader><text><body>{items}<listRelation>{}</listRelation></body></text></TEI>"#,
                relation_xml[d]
            );
            (format!("D{d}.xml"), xml)
        })
        .collect();
    SyntheticCorpus {
        files,
        entity_refs: entities,
        relation_count: relations,
    }
}
