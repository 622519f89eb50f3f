//! Editorial relation assertions and their certainty annotations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{AssertionMeta, Quad, Term};

/// Which part of an assertion a certainty note qualifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CertaintyTarget {
    AssertionExistence,
    PredicateValue,
    SubjectValue,
    ObjectValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Degree {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CertaintyNote {
    pub target: CertaintyTarget,
    pub degree: Degree,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognized value `{0}`")]
pub struct ParseValueError(pub String);

impl CertaintyTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            CertaintyTarget::AssertionExistence => "AssertionExistence",
            CertaintyTarget::PredicateValue => "PredicateValue",
            CertaintyTarget::SubjectValue => "SubjectValue",
            CertaintyTarget::ObjectValue => "ObjectValue",
        }
    }
}

impl FromStr for CertaintyTarget {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AssertionExistence" => Ok(CertaintyTarget::AssertionExistence),
            "PredicateValue" => Ok(CertaintyTarget::PredicateValue),
            "SubjectValue" => Ok(CertaintyTarget::SubjectValue),
            "ObjectValue" => Ok(CertaintyTarget::ObjectValue),
            _ => Err(ParseValueError(s.to_string())),
        }
    }
}

impl Degree {
    pub fn as_str(self) -> &'static str {
        match self {
            Degree::Low => "low",
            Degree::Medium => "medium",
            Degree::High => "high",
        }
    }
}

/// Only the literal attribute values `low`, `medium` and `high` parse.
impl FromStr for Degree {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(Degree::Low),
            "medium" => Ok(Degree::Medium),
            "high" => Ok(Degree::High),
            _ => Err(ParseValueError(s.to_string())),
        }
    }
}

impl fmt::Display for CertaintyNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.target.as_str(), self.degree.as_str())
    }
}

impl FromStr for CertaintyNote {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (t, d) = s.split_once(':').ok_or_else(|| ParseValueError(s.to_string()))?;
        Ok(CertaintyNote {
            target: t.parse()?,
            degree: d.parse()?,
        })
    }
}

/// One editorial triple with responsibility and certainty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationAssertion {
    pub subject: String,
    pub predicate: String,
    pub object: String,
    pub responsibility: Option<String>,
    pub certainty: Vec<CertaintyNote>,
    pub source_doc: String,
    pub source_locator: String,
}

impl RelationAssertion {
    pub fn to_quad(&self) -> Quad {
        let object = Term::Iri(self.object.clone());
        let assertion_id = AssertionMeta::mint_id(
            &self.subject,
            &self.predicate,
            &object,
            self.responsibility.as_deref(),
            &self.source_doc,
        );
        Quad {
            s: self.subject.clone(),
            p: self.predicate.clone(),
            o: object,
            meta: Some(AssertionMeta {
                assertion_id,
                responsibility: self.responsibility.clone(),
                certainty: self.certainty.clone(),
                source_doc: self.source_doc.clone(),
            }),
        }
    }
}
