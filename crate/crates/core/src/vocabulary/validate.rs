use std::collections::{BTreeMap, BTreeSet};

use super::Vocabulary;
use crate::diagnostic::Diagnostic;
use crate::iri;

/// Structural consistency checks over a vocabulary.
///
/// Returns an empty list iff every concept/property invariant holds. Rules:
/// `non-absolute-iri`, `key-mismatch`, `iri-space-overlap`, `dangling-reference`,
/// `kind-confusion`, `cycle`, `symmetric-domain-range-mismatch`.
pub fn validate_vocabulary(voc: &Vocabulary) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for (key, c) in &voc.concepts {
        check_identity(&mut out, "concept", key, &c.iri);
        if voc.properties.contains_key(key) {
            out.push(
                Diagnostic::error("iri-space-overlap", format!("<{key}> is both a concept and a property"))
                    .with_iris([key.as_str()]),
            );
        }
        for parent in &c.parents {
            check_ref(&mut out, voc, key, parent, "parent", Kind::Concept);
        }
    }
    for (key, p) in &voc.properties {
        check_identity(&mut out, "property", key, &p.iri);
        for parent in &p.parents {
            check_ref(&mut out, voc, key, parent, "parent", Kind::Property);
        }
        for d in &p.domain {
            check_ref(&mut out, voc, key, d, "domain", Kind::Concept);
        }
        for r in &p.range {
            check_ref(&mut out, voc, key, r, "range", Kind::Concept);
        }
        if p.symmetric && p.domain != p.range {
            out.push(
                Diagnostic::error(
                    "symmetric-domain-range-mismatch",
                    format!("symmetric property <{key}> must have equal domain and range"),
                )
                .with_iris([key.as_str()]),
            );
        }
    }

    let concept_parents: BTreeMap<&str, &BTreeSet<String>> =
        voc.concepts.iter().map(|(k, c)| (k.as_str(), &c.parents)).collect();
    let property_parents: BTreeMap<&str, &BTreeSet<String>> =
        voc.properties.iter().map(|(k, p)| (k.as_str(), &p.parents)).collect();
    for (kind, graph) in [("concept", concept_parents), ("property", property_parents)] {
        for cycle in cycles(&graph) {
            out.push(
                Diagnostic::error("cycle", format!("{kind} hierarchy cycle through {}", cycle.join(", ")))
                    .with_iris(cycle),
            );
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Kind {
    Concept,
    Property,
}

fn check_identity(out: &mut Vec<Diagnostic>, what: &str, key: &str, iri_s: &str) {
    if key != iri_s {
        out.push(
            Diagnostic::error("key-mismatch", format!("{what} stored under <{key}> has iri <{iri_s}>"))
                .with_iris([key, iri_s]),
        );
    }
    if !iri::is_absolute(iri_s) {
        out.push(
            Diagnostic::error("non-absolute-iri", format!("{what} <{iri_s}> is not an absolute IRI"))
                .with_iris([iri_s]),
        );
    }
}

fn check_ref(out: &mut Vec<Diagnostic>, voc: &Vocabulary, owner: &str, target: &str, role: &str, expected: Kind) {
    let is_concept = voc.concepts.contains_key(target);
    let is_property = voc.properties.contains_key(target);
    let (ok, wrong, want) = match expected {
        Kind::Concept => (is_concept, is_property, "concept"),
        Kind::Property => (is_property, is_concept, "property"),
    };
    if ok {
        return;
    }
    let d = if wrong {
        Diagnostic::error(
            "kind-confusion",
            format!("{role} of <{owner}> is <{target}>, which is not a {want}"),
        )
    } else {
        Diagnostic::error(
            "dangling-reference",
            format!("{role} of <{owner}> refers to undeclared {want} <{target}>"),
        )
    };
    out.push(d.with_iris([owner, target]));
}

/// Strongly connected groups of nodes that reach themselves via one or more
/// parent edges, each sorted; edges to unknown nodes are ignored.
fn cycles(graph: &BTreeMap<&str, &BTreeSet<String>>) -> Vec<Vec<String>> {
    let reach: BTreeMap<&str, BTreeSet<&str>> = graph
        .keys()
        .map(|&start| {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&str> = graph[start].iter().map(String::as_str).collect();
            while let Some(n) = stack.pop() {
                let Some(parents) = graph.get(n) else { continue };
                if seen.insert(n) {
                    stack.extend(parents.iter().map(String::as_str));
                }
            }
            (start, seen)
        })
        .collect();

    let mut assigned = BTreeSet::new();
    let mut out = Vec::new();
    for (&node, reachable) in &reach {
        if !reachable.contains(node) || assigned.contains(node) {
            continue;
        }
        let group: Vec<String> = reachable
            .iter()
            .filter(|&&other| reach[other].contains(node))
            .map(|s| s.to_string())
            .collect();
        assigned.extend(group.iter().cloned());
        out.push(group);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocabulary::{Concept, Origin, PropertyDef};

    fn concept(iri: &str, parents: &[&str]) -> Concept {
        Concept {
            iri: iri.into(),
            label: iri.into(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
            origin: Origin::Saws,
        }
    }

    fn property(iri: &str, parents: &[&str]) -> PropertyDef {
        PropertyDef {
            iri: iri.into(),
            label: iri.into(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
            domain: BTreeSet::new(),
            range: BTreeSet::new(),
            symmetric: false,
        }
    }

    #[test]
    fn default_is_clean() {
        assert!(validate_vocabulary(&Vocabulary::default_saws()).is_empty());
    }

    #[test]
    fn symmetric_mismatch() {
        let mut voc = Vocabulary::default();
        voc.concepts
            .insert("http://x/ContentItem".into(), concept("http://x/ContentItem", &[]));
        voc.concepts
            .insert("http://x/Person".into(), concept("http://x/Person", &[]));
        let mut p = property("http://x/p", &[]);
        p.symmetric = true;
        p.domain.insert("http://x/ContentItem".into());
        p.range.insert("http://x/Person".into());
        voc.properties.insert(p.iri.clone(), p);
        let d = validate_vocabulary(&voc);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, "symmetric-domain-range-mismatch");
    }

    #[test]
    fn property_parent_pointing_at_concept() {
        let mut voc = Vocabulary::default_saws();
        let p = voc.properties.get_mut(crate::iri::saws::IS_VARIANT_OF).unwrap();
        p.parents.insert(crate::iri::saws::STATEMENT.into());
        let d = validate_vocabulary(&voc);
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].rule, "kind-confusion");
    }

    #[test]
    fn injected_cycle_is_reported_once() {
        let mut voc = Vocabulary::default_saws();
        voc.concepts
            .get_mut(crate::iri::saws::LINGUISTIC_OBJECT)
            .unwrap()
            .parents
            .insert(crate::iri::saws::STATEMENT.into());
        let d = validate_vocabulary(&voc);
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].rule, "cycle");
        assert_eq!(d[0].iris.len(), 2);
    }

    #[test]
    fn self_loop_and_overlap() {
        let mut voc = Vocabulary::default();
        voc.properties
            .insert("http://x/p".into(), property("http://x/p", &["http://x/p"]));
        voc.concepts.insert("http://x/p".into(), concept("http://x/p", &[]));
        let rules: BTreeSet<String> = validate_vocabulary(&voc).into_iter().map(|d| d.rule).collect();
        assert!(rules.contains("cycle"));
        assert!(rules.contains("iri-space-overlap"));
    }

    #[test]
    fn dangling_and_relative() {
        let mut voc = Vocabulary::default();
        voc.concepts.insert("rel".into(), concept("rel", &["http://x/missing"]));
        let rules: Vec<String> = validate_vocabulary(&voc).into_iter().map(|d| d.rule).collect();
        assert_eq!(rules, vec!["non-absolute-iri", "dangling-reference"]);
    }
}
