//! Concept and property hierarchies used to type segments and to check and
//! expand relation assertions.
//!
//! A [`Vocabulary`] is loaded from a small line-oriented text format (see
//! [`load_vocabulary`]) and is immutable afterwards. Subsumption queries walk
//! parent links; both hierarchies are DAGs with multiple parents allowed.

mod file;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Diagnostic, Severity};

pub use file::{load_vocabulary, VocabularyError};
pub use validate::validate_vocabulary;

/// The shipped default vocabulary, in the vocabulary file format.
pub const DEFAULT_VOCABULARY: &str = include_str!("../../data/default.vocab");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Cidoc,
    Frbr,
    Saws,
}

impl Origin {
    pub fn parse(s: &str) -> Option<Origin> {
        match s {
            "cidoc" => Some(Origin::Cidoc),
            "frbr" => Some(Origin::Frbr),
            "saws" => Some(Origin::Saws),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub iri: String,
    pub label: String,
    pub parents: BTreeSet<String>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyDef {
    pub iri: String,
    pub label: String,
    pub parents: BTreeSet<String>,
    pub domain: BTreeSet<String>,
    pub range: BTreeSet<String>,
    pub symmetric: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub concepts: BTreeMap<String, Concept>,
    pub properties: BTreeMap<String, PropertyDef>,
    pub version: String,
}

/// Errors from vocabulary queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LookupError {
    #[error("unknown property <{0}>")]
    UnknownProperty(String),
    #[error("unknown concept <{0}>")]
    UnknownConcept(String),
}

impl Vocabulary {
    /// Loads the shipped default vocabulary.
    pub fn default_saws() -> Vocabulary {
        load_vocabulary(DEFAULT_VOCABULARY).expect("default vocabulary is valid")
    }

    pub fn concept(&self, iri: &str) -> Option<&Concept> {
        self.concepts.get(iri)
    }

    pub fn property(&self, iri: &str) -> Option<&PropertyDef> {
        self.properties.get(iri)
    }

    fn require_property(&self, iri: &str) -> Result<&PropertyDef, LookupError> {
        self.properties
            .get(iri)
            .ok_or_else(|| LookupError::UnknownProperty(iri.to_string()))
    }

    fn require_concept(&self, iri: &str) -> Result<&Concept, LookupError> {
        self.concepts
            .get(iri)
            .ok_or_else(|| LookupError::UnknownConcept(iri.to_string()))
    }

    /// `p` together with every property whose parent chain reaches `p`.
    pub fn subproperty_closure(&self, p: &str) -> Result<BTreeSet<String>, LookupError> {
        self.require_property(p)?;
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for prop in self.properties.values() {
            for parent in &prop.parents {
                children.entry(parent.as_str()).or_default().push(prop.iri.as_str());
            }
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([p]);
        while let Some(cur) = queue.pop_front() {
            if !seen.insert(cur.to_string()) {
                continue;
            }
            if let Some(kids) = children.get(cur) {
                queue.extend(kids.iter().copied());
            }
        }
        Ok(seen)
    }

    /// Ancestors of a property including itself.
    pub fn superproperties(&self, p: &str) -> Result<BTreeSet<String>, LookupError> {
        self.require_property(p)?;
        Ok(ancestors(p, |iri| self.properties.get(iri).map(|d| &d.parents)))
    }

    /// True iff `b` is reachable from `a` via zero or more parent steps.
    pub fn is_subconcept(&self, a: &str, b: &str) -> Result<bool, LookupError> {
        self.require_concept(a)?;
        self.require_concept(b)?;
        Ok(ancestors(a, |iri| self.concepts.get(iri).map(|c| &c.parents)).contains(b))
    }

    /// Checks the domain and range of `predicate` against the known types of
    /// both endpoints.
    ///
    /// An endpoint with no known types yields an `untyped-endpoint` warning and is
    /// never a violation. Domains and ranges declared on super-properties apply
    /// too. An endpoint satisfies a constraint when any of its types is subsumed
    /// by any member of the constraint set.
    pub fn check_assertion(
        &self,
        predicate: &str,
        subject_types: &BTreeSet<String>,
        object_types: &BTreeSet<String>,
    ) -> Result<Vec<Diagnostic>, LookupError> {
        let supers = self.superproperties(predicate)?;
        let mut out = Vec::new();
        for (role, types, rule) in [
            ("subject", subject_types, "domain-violation"),
            ("object", object_types, "range-violation"),
        ] {
            let known: BTreeSet<&str> = types
                .iter()
                .filter(|t| {
                    let ok = self.concepts.contains_key(t.as_str());
                    if !ok {
                        out.push(
                            Diagnostic::warning(
                                "unknown-concept",
                                format!("{role} type <{t}> is not a declared concept"),
                            )
                            .with_iris([t.as_str()]),
                        );
                    }
                    ok
                })
                .map(String::as_str)
                .collect();
            if known.is_empty() {
                out.push(
                    Diagnostic::warning(
                        "untyped-endpoint",
                        format!("{role} of <{predicate}> has no known type; constraint not checked"),
                    )
                    .with_iris([predicate]),
                );
                continue;
            }
            for sup in &supers {
                let def = &self.properties[sup];
                let allowed = if role == "subject" { &def.domain } else { &def.range };
                if allowed.is_empty() {
                    continue;
                }
                let satisfied = known
                    .iter()
                    .any(|t| allowed.iter().any(|c| self.is_subconcept(t, c).unwrap_or(false)));
                if !satisfied {
                    let mut iris = vec![predicate.to_string()];
                    iris.extend(known.iter().map(|s| s.to_string()));
                    out.push(
                        Diagnostic::new(
                            Severity::Error,
                            rule,
                            format!(
                                "{role} types {{{}}} do not satisfy {} of <{sup}> ({{{}}})",
                                known.iter().copied().collect::<Vec<_>>().join(", "),
                                if role == "subject" { "domain" } else { "range" },
                                allowed.iter().cloned().collect::<Vec<_>>().join(", ")
                            ),
                        )
                        .with_iris(iris),
                    );
                }
            }
        }
        Ok(out)
    }
}

/// Reflexive upward closure over a parent map.
fn ancestors<'a, F>(start: &str, parents_of: F) -> BTreeSet<String>
where
    F: Fn(&str) -> Option<&'a BTreeSet<String>>,
{
    let mut seen = BTreeSet::new();
    let mut stack = vec![start.to_string()];
    while let Some(cur) = stack.pop() {
        if let Some(parents) = parents_of(&cur) {
            for p in parents {
                if !seen.contains(p) {
                    stack.push(p.clone());
                }
            }
        }
        seen.insert(cur);
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iri::saws;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn closure_of_leaf_and_inner() {
        let voc = Vocabulary::default_saws();
        assert_eq!(
            voc.subproperty_closure(saws::IS_VERBATIM_OF).unwrap(),
            set(&[saws::IS_VERBATIM_OF])
        );
        assert_eq!(
            voc.subproperty_closure(saws::IS_VARIANT_OF).unwrap(),
            set(&[saws::IS_VARIANT_OF, saws::IS_VERBATIM_OF, saws::IS_SHORTER_VERSION_OF])
        );
        assert!(matches!(
            voc.subproperty_closure("http://x/nope"),
            Err(LookupError::UnknownProperty(_))
        ));
    }

    #[test]
    fn subconcepts() {
        let voc = Vocabulary::default_saws();
        assert!(voc
            .is_subconcept(saws::COLLECTION_INSTANCE, saws::LINGUISTIC_OBJECT)
            .unwrap());
        assert!(voc.is_subconcept(saws::COLLECTION_INSTANCE, saws::EXPRESSION).unwrap());
        assert!(!voc.is_subconcept(saws::SCRIPTORIUM, saws::PERSON).unwrap());
        for c in voc.concepts.keys() {
            assert!(voc.is_subconcept(c, c).unwrap());
        }
        assert!(voc.is_subconcept("http://x/nope", saws::PERSON).is_err());
    }

    #[test]
    fn assertion_checks() {
        let voc = Vocabulary::default_saws();
        let d = voc
            .check_assertion(
                saws::IS_WRITTEN_BY,
                &set(&[saws::COLLECTION_INSTANCE]),
                &set(&[saws::SCRIBE]),
            )
            .unwrap();
        assert!(d.is_empty(), "{d:?}");

        let d = voc
            .check_assertion(
                saws::IS_WRITTEN_AT,
                &set(&[saws::CONTENT_ITEM]),
                &set(&[saws::SCRIPTORIUM]),
            )
            .unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, "domain-violation");

        let d = voc
            .check_assertion(saws::IS_VARIANT_OF, &set(&[]), &set(&[saws::STATEMENT]))
            .unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, "untyped-endpoint");
        assert_eq!(d[0].severity, Severity::Warning);
    }

    #[test]
    fn scribe_satisfies_person_range() {
        let voc = Vocabulary::default_saws();
        let d = voc
            .check_assertion(
                saws::IS_ATTRIBUTED_TO,
                &set(&[saws::CONTENT_ITEM]),
                &set(&[saws::SCRIBE]),
            )
            .unwrap();
        assert!(d.is_empty());
        let d = voc
            .check_assertion(
                saws::IS_ATTRIBUTED_TO,
                &set(&[saws::CONTENT_ITEM]),
                &set(&[saws::SCRIPTORIUM]),
            )
            .unwrap();
        assert_eq!(d[0].rule, "range-violation");
    }

    #[test]
    fn symmetric_flag_in_default() {
        let voc = Vocabulary::default_saws();
        assert!(voc.property(saws::IS_SEQUENTIALLY_SIMILAR_TO).unwrap().symmetric);
        assert!(!voc.property(saws::IS_VARIANT_OF).unwrap().symmetric);
    }
}
