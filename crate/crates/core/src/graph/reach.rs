use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{GraphSnapshot, Term};
use crate::vocabulary::{LookupError, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

/// One hop. `forward` is false when the edge was walked object → subject.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub predicate: String,
    pub node: String,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Path {
    pub start: String,
    pub steps: Vec<Step>,
}

impl Path {
    pub fn end(&self) -> &str {
        self.steps.last().map_or(&self.start, |s| &s.node)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    fn visits(&self, node: &str) -> bool {
        self.start == node || self.steps.iter().any(|s| s.node == node)
    }
}

/// All simple paths of length 1..=`max_depth` from `start` along edges whose
/// predicate is a sub-property of `root_predicate`.
///
/// Paths never revisit a node, so the enumeration terminates on cyclic graphs.
/// Literal objects are not nodes. A `max_depth` of zero yields nothing.
pub fn reachable(
    g: &GraphSnapshot,
    voc: &Vocabulary,
    start: &str,
    root_predicate: &str,
    max_depth: usize,
    direction: Direction,
) -> Result<BTreeSet<Path>, LookupError> {
    let predicates = voc.subproperty_closure(root_predicate)?;
    let mut out = BTreeSet::new();
    let mut frontier = vec![Path {
        start: start.to_string(),
        steps: Vec::new(),
    }];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for path in &frontier {
            for step in neighbours(g, &predicates, path.end(), direction) {
                if path.visits(&step.node) {
                    continue;
                }
                let mut extended = path.clone();
                extended.steps.push(step);
                if out.insert(extended.clone()) {
                    next.push(extended);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(out)
}

fn neighbours(g: &GraphSnapshot, predicates: &BTreeSet<String>, node: &str, direction: Direction) -> BTreeSet<Step> {
    let mut steps = BTreeSet::new();
    let forward = matches!(direction, Direction::Forward | Direction::Both);
    let backward = matches!(direction, Direction::Backward | Direction::Both);
    let as_object = Term::iri(node);
    for p in predicates {
        if forward {
            for q in g.matching(Some(node), Some(p), None) {
                if let Some(o) = q.o.as_iri() {
                    steps.insert(Step {
                        predicate: p.clone(),
                        node: o.to_string(),
                        forward: true,
                    });
                }
            }
        }
        if backward {
            for q in g.matching(None, Some(p), Some(&as_object)) {
                steps.insert(Step {
                    predicate: p.clone(),
                    node: q.s.clone(),
                    forward: false,
                });
            }
        }
    }
    steps
}
