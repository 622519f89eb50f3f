//! Parser for the line-oriented vocabulary file format.
//!
//! ```text
//! prefix saws: <http://purl.org/saws/ontology#>
//! concept <iri> ["label"] [cidoc|frbr|saws]
//! subconcept <child-iri> <parent-iri>
//! property <iri> ["label"] [symmetric]
//! subproperty <child-iri> <parent-iri>
//! domain <property-iri> <concept-iri>
//! range <property-iri> <concept-iri>
//! version "text"
//! ```
//!
//! `#` at the start of a token begins a comment. IRIs are written as `<...>`,
//! bare absolute IRIs, or `prefix:local` after a `prefix` line.

use std::collections::{BTreeMap, BTreeSet};

use super::{validate, Concept, Origin, PropertyDef, Vocabulary};
use crate::diagnostic::Diagnostic;
use crate::iri;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabularyError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: <{iri}> already declared at line {first_line}")]
    DuplicateIri {
        iri: String,
        first_line: usize,
        line: usize,
    },
    #[error("line {line}: reference to undeclared {expected} <{iri}>")]
    Dangling {
        iri: String,
        expected: &'static str,
        line: usize,
    },
    #[error("line {line}: <{iri}> is declared as a {found}, expected a {expected}")]
    KindConfusion {
        iri: String,
        expected: &'static str,
        found: &'static str,
        line: usize,
    },
    #[error("cycle detected through {}", .iris.join(", "))]
    Cycle { iris: Vec<String> },
    #[error("vocabulary is invalid: {}", .diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid { diagnostics: Vec<Diagnostic> },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Iri(String),
    Quoted(String),
    Word(String),
}

struct Located {
    token: Token,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> VocabularyError {
    VocabularyError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Located>, VocabularyError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let column = i + 1;
        match c {
            '#' => break,
            '<' => {
                let start = i + 1;
                let end = chars[start..]
                    .iter()
                    .position(|&c| c == '>')
                    .map(|p| start + p)
                    .ok_or_else(|| syntax(line_no, column, "unterminated <iri>"))?;
                out.push(Located {
                    token: Token::Iri(chars[start..end].iter().collect()),
                    column,
                });
                i = end + 1;
            }
            '"' => {
                let mut text = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None => return Err(syntax(line_no, column, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some(&e @ ('"' | '\\')) => text.push(e),
                                _ => return Err(syntax(line_no, j + 1, "invalid escape in string")),
                            }
                            j += 2;
                        }
                        Some(&ch) => {
                            text.push(ch);
                            j += 1;
                        }
                    }
                }
                out.push(Located {
                    token: Token::Quoted(text),
                    column,
                });
                i = j + 1;
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() {
                    i += 1;
                }
                out.push(Located {
                    token: Token::Word(chars[start..i].iter().collect()),
                    column,
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    prefixes: BTreeMap<String, String>,
}

impl Parser {
    fn term(&self, line: usize, tok: &Located) -> Result<String, VocabularyError> {
        let resolved = match &tok.token {
            Token::Iri(s) => s.clone(),
            Token::Word(w) => {
                let expanded = w
                    .split_once(':')
                    .and_then(|(prefix, local)| self.prefixes.get(prefix).map(|ns| format!("{ns}{local}")));
                match expanded {
                    Some(e) => e,
                    None if iri::is_absolute(w) && w.contains("//") => w.clone(),
                    None => {
                        return Err(syntax(
                            line,
                            tok.column,
                            format!("`{w}` is neither an absolute IRI nor a declared prefix name"),
                        ))
                    }
                }
            }
            Token::Quoted(_) => return Err(syntax(line, tok.column, "expected an IRI, found a string")),
        };
        if !iri::is_absolute(&resolved) {
            return Err(syntax(line, tok.column, format!("<{resolved}> is not an absolute IRI")));
        }
        Ok(resolved)
    }
}

enum Link {
    SubConcept,
    SubProperty,
    Domain,
    Range,
}

/// Parses vocabulary file text into a validated [`Vocabulary`].
///
/// Forward references are allowed; every reference must resolve once the whole
/// file is read. Cycles, duplicates, kind confusion, and any other validation
/// error make loading fail.
pub fn load_vocabulary(source: &str) -> Result<Vocabulary, VocabularyError> {
    let mut parser = Parser {
        prefixes: BTreeMap::new(),
    };
    let mut voc = Vocabulary::default();
    let mut declared_at: BTreeMap<String, usize> = BTreeMap::new();
    let mut links: Vec<(usize, Link, String, String)> = Vec::new();

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(line, raw)?;
        let Some(first) = toks.first() else { continue };
        let Token::Word(directive) = &first.token else {
            return Err(syntax(line, first.column, "expected a directive"));
        };
        let args = &toks[1..];
        let arity = |min: usize, max: usize| -> Result<(), VocabularyError> {
            if args.len() < min || args.len() > max {
                Err(syntax(
                    line,
                    first.column,
                    format!("`{directive}` takes {min}..={max} arguments, got {}", args.len()),
                ))
            } else {
                Ok(())
            }
        };
        match directive.as_str() {
            "prefix" => {
                arity(2, 2)?;
                let Token::Word(name) = &args[0].token else {
                    return Err(syntax(line, args[0].column, "expected `name:`"));
                };
                let Some(name) = name.strip_suffix(':') else {
                    return Err(syntax(line, args[0].column, "prefix name must end with `:`"));
                };
                let Token::Iri(ns) = &args[1].token else {
                    return Err(syntax(line, args[1].column, "expected <namespace-iri>"));
                };
                parser.prefixes.insert(name.to_string(), ns.clone());
            }
            "version" => {
                arity(1, 1)?;
                voc.version = match &args[0].token {
                    Token::Quoted(s) | Token::Word(s) | Token::Iri(s) => s.clone(),
                };
            }
            "concept" | "property" => {
                arity(1, 3)?;
                let iri_s = parser.term(line, &args[0])?;
                if let Some(&first_line) = declared_at.get(&iri_s) {
                    return Err(VocabularyError::DuplicateIri {
                        iri: iri_s,
                        first_line,
                        line,
                    });
                }
                declared_at.insert(iri_s.clone(), line);
                let mut label = None;
                let mut flag = None;
                for a in &args[1..] {
                    match &a.token {
                        Token::Quoted(s) if label.is_none() && flag.is_none() => label = Some(s.clone()),
                        Token::Word(w) if flag.is_none() => flag = Some((w.clone(), a.column)),
                        _ => return Err(syntax(line, a.column, "unexpected argument")),
                    }
                }
                let label = label.unwrap_or_else(|| iri::local_name(&iri_s).to_string());
                if directive == "concept" {
                    let origin = match flag {
                        None => Origin::Saws,
                        Some((w, col)) => {
                            Origin::parse(&w).ok_or_else(|| syntax(line, col, format!("unknown origin `{w}`")))?
                        }
                    };
                    voc.concepts.insert(
                        iri_s.clone(),
                        Concept {
                            iri: iri_s,
                            label,
                            parents: BTreeSet::new(),
                            origin,
                        },
                    );
                } else {
                    let symmetric = match flag {
                        None => false,
                        Some((w, _)) if w == "symmetric" => true,
                        Some((w, col)) => return Err(syntax(line, col, format!("unknown flag `{w}`"))),
                    };
                    voc.properties.insert(
                        iri_s.clone(),
                        PropertyDef {
                            iri: iri_s,
                            label,
                            parents: BTreeSet::new(),
                            domain: BTreeSet::new(),
                            range: BTreeSet::new(),
                            symmetric,
                        },
                    );
                }
            }
            "subconcept" | "subproperty" | "domain" | "range" => {
                arity(2, 2)?;
                let a = parser.term(line, &args[0])?;
                let b = parser.term(line, &args[1])?;
                let kind = match directive.as_str() {
                    "subconcept" => Link::SubConcept,
                    "subproperty" => Link::SubProperty,
                    "domain" => Link::Domain,
                    _ => Link::Range,
                };
                links.push((line, kind, a, b));
            }
            other => return Err(syntax(line, first.column, format!("unknown directive `{other}`"))),
        }
    }

    for (line, kind, a, b) in links {
        let (a_kind, b_kind) = match kind {
            Link::SubConcept => ("concept", "concept"),
            Link::SubProperty => ("property", "property"),
            Link::Domain | Link::Range => ("property", "concept"),
        };
        resolve(&voc, &a, a_kind, line)?;
        resolve(&voc, &b, b_kind, line)?;
        match kind {
            Link::SubConcept => {
                voc.concepts.get_mut(&a).expect("resolved").parents.insert(b);
            }
            Link::SubProperty => {
                voc.properties.get_mut(&a).expect("resolved").parents.insert(b);
            }
            Link::Domain => {
                voc.properties.get_mut(&a).expect("resolved").domain.insert(b);
            }
            Link::Range => {
                voc.properties.get_mut(&a).expect("resolved").range.insert(b);
            }
        }
    }

    let diagnostics = validate_vocabulary_errors(&voc);
    if let Some(cycle) = diagnostics.iter().find(|d| d.rule == "cycle") {
        return Err(VocabularyError::Cycle {
            iris: cycle.iris.clone(),
        });
    }
    if !diagnostics.is_empty() {
        return Err(VocabularyError::Invalid { diagnostics });
    }
    Ok(voc)
}

fn validate_vocabulary_errors(voc: &Vocabulary) -> Vec<Diagnostic> {
    validate::validate_vocabulary(voc)
        .into_iter()
        .filter(Diagnostic::is_error)
        .collect()
}

fn resolve(voc: &Vocabulary, iri_s: &str, expected: &'static str, line: usize) -> Result<(), VocabularyError> {
    let is_concept = voc.concepts.contains_key(iri_s);
    let is_property = voc.properties.contains_key(iri_s);
    let ok = match expected {
        "concept" => is_concept,
        _ => is_property,
    };
    if ok {
        return Ok(());
    }
    if is_concept || is_property {
        return Err(VocabularyError::KindConfusion {
            iri: iri_s.to_string(),
            expected,
            found: if is_concept { "concept" } else { "property" },
            line,
        });
    }
    Err(VocabularyError::Dangling {
        iri: iri_s.to_string(),
        expected,
        line,
    })
}
