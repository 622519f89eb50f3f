//! Canonical N-Triples dump of a snapshot, with optional reified provenance.
//!
//! Lines are sorted by (subject, predicate, object serialization) and
//! deduplicated, so equal quad sets always produce identical bytes. With
//! provenance, each asserted quad also gets
//!
//! ```text
//! <id> rdf:type rdf:Statement .
//! <id> rdf:subject <s> .
//! <id> rdf:predicate <p> .
//! <id> rdf:object o .
//! <id> dcterms:creator <resp> .            (when responsibility is known)
//! <id> saws:certainty "Target:degree" .    (one per note)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{AssertionMeta, GraphSnapshot, Quad, Term};
use crate::assertion::CertaintyNote;
use crate::iri::{
    self, DCTERMS_CREATOR, RDF_OBJECT, RDF_PREDICATE, RDF_STATEMENT, RDF_SUBJECT, RDF_TYPE, SAWS_CERTAINTY,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct NTriplesError {
    pub line: usize,
    pub message: String,
}

pub(crate) fn term_to_string(t: &Term) -> String {
    match t {
        Term::Iri(v) => format!("<{v}>"),
        Term::Literal { lexical, lang } => {
            let mut s = String::with_capacity(lexical.len() + 2);
            s.push('"');
            for c in lexical.chars() {
                match c {
                    '\\' => s.push_str("\\\\"),
                    '"' => s.push_str("\\\""),
                    '\n' => s.push_str("\\n"),
                    '\r' => s.push_str("\\r"),
                    '\t' => s.push_str("\\t"),
                    ' '..='~' => s.push(c),
                    c if (c as u32) <= 0xFFFF => {
                        let _ = write!(s, "\\u{:04X}", c as u32);
                    }
                    c => {
                        let _ = write!(s, "\\U{:08X}", c as u32);
                    }
                }
            }
            s.push('"');
            if let Some(lang) = lang {
                s.push('@');
                s.push_str(lang);
            }
            s
        }
    }
}

type Line = (String, String, String);

fn triple(s: &str, p: &str, o: &Term) -> Line {
    (s.to_string(), p.to_string(), term_to_string(o))
}

/// Serializes a snapshot as canonical N-Triples.
pub fn export_ntriples(g: &GraphSnapshot, include_provenance: bool) -> String {
    let mut lines: BTreeSet<Line> = BTreeSet::new();
    for q in g.quads() {
        lines.insert(triple(&q.s, &q.p, &q.o));
        let (true, Some(meta)) = (include_provenance, &q.meta) else {
            continue;
        };
        let id = &meta.assertion_id;
        lines.insert(triple(id, RDF_TYPE, &Term::iri(RDF_STATEMENT)));
        lines.insert(triple(id, RDF_SUBJECT, &Term::iri(q.s.as_str())));
        lines.insert(triple(id, RDF_PREDICATE, &Term::iri(q.p.as_str())));
        lines.insert(triple(id, RDF_OBJECT, &q.o));
        if let Some(resp) = &meta.responsibility {
            lines.insert(triple(id, DCTERMS_CREATOR, &Term::iri(resp.as_str())));
        }
        for note in &meta.certainty {
            lines.insert(triple(id, SAWS_CERTAINTY, &Term::literal(note.to_string())));
        }
    }
    let mut out = String::new();
    for (s, p, o) in lines {
        let _ = writeln!(out, "<{s}> <{p}> {o} .");
    }
    out
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> NTriplesError {
        NTriplesError {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) -> bool {
        let mut any = false;
        while matches!(self.chars.peek(), Some(' ' | '\t')) {
            self.chars.next();
            any = true;
        }
        any
    }

    fn expect_ws(&mut self) -> Result<(), NTriplesError> {
        if self.skip_ws() {
            Ok(())
        } else {
            Err(self.err("expected whitespace"))
        }
    }

    fn hex_escape(&mut self, width: usize) -> Result<char, NTriplesError> {
        let digits: String = (0..width).filter_map(|_| self.chars.next()).collect();
        if digits.len() != width {
            return Err(self.err("truncated unicode escape"));
        }
        u32::from_str_radix(&digits, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.err(format!("invalid unicode escape `{digits}`")))
    }

    fn iri(&mut self) -> Result<String, NTriplesError> {
        if self.chars.next() != Some('<') {
            return Err(self.err("expected `<`"));
        }
        let mut out = String::new();
        loop {
            match self.chars.next() {
                None => return Err(self.err("unterminated IRI")),
                Some('>') => break,
                Some('\\') => match self.chars.next() {
                    Some('u') => out.push(self.hex_escape(4)?),
                    Some('U') => out.push(self.hex_escape(8)?),
                    _ => return Err(self.err("invalid escape in IRI")),
                },
                Some(c) => out.push(c),
            }
        }
        if !iri::is_absolute(&out) {
            return Err(self.err(format!("<{out}> is not an absolute IRI")));
        }
        Ok(out)
    }

    fn literal(&mut self) -> Result<Term, NTriplesError> {
        self.chars.next();
        let mut lexical = String::new();
        loop {
            match self.chars.next() {
                None => return Err(self.err("unterminated literal")),
                Some('"') => break,
                Some('\\') => match self.chars.next() {
                    Some('t') => lexical.push('\t'),
                    Some('b') => lexical.push('\u{8}'),
                    Some('n') => lexical.push('\n'),
                    Some('r') => lexical.push('\r'),
                    Some('f') => lexical.push('\u{c}'),
                    Some('"') => lexical.push('"'),
                    Some('\'') => lexical.push('\''),
                    Some('\\') => lexical.push('\\'),
                    Some('u') => lexical.push(self.hex_escape(4)?),
                    Some('U') => lexical.push(self.hex_escape(8)?),
                    _ => return Err(self.err("invalid escape in literal")),
                },
                Some(c) => lexical.push(c),
            }
        }
        let lang = if self.chars.peek() == Some(&'@') {
            self.chars.next();
            let mut tag = String::new();
            while let Some(&c) = self.chars.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    tag.push(c);
                    self.chars.next();
                } else {
                    break;
                }
            }
            if tag.is_empty() {
                return Err(self.err("empty language tag"));
            }
            Some(tag)
        } else if self.chars.peek() == Some(&'^') {
            return Err(self.err("typed literals are not supported"));
        } else {
            None
        };
        Ok(Term::Literal { lexical, lang })
    }
}

fn parse_line(line_no: usize, line: &str) -> Result<(String, String, Term), NTriplesError> {
    let mut c = Cursor {
        chars: line.chars().peekable(),
        line: line_no,
    };
    c.skip_ws();
    let s = c.iri()?;
    c.expect_ws()?;
    let p = c.iri()?;
    c.expect_ws()?;
    let o = match c.chars.peek() {
        Some('<') => Term::Iri(c.iri()?),
        Some('"') => c.literal()?,
        Some('_') => return Err(c.err("blank nodes are not supported")),
        _ => return Err(c.err("expected an IRI or literal object")),
    };
    c.skip_ws();
    if c.chars.next() != Some('.') {
        return Err(c.err("expected terminating `.`"));
    }
    c.skip_ws();
    if c.chars.next().is_some() {
        return Err(c.err("trailing characters after `.`"));
    }
    Ok((s, p, o))
}

#[derive(Default)]
struct Reified {
    subject: Option<String>,
    predicate: Option<String>,
    object: Option<Term>,
    creator: Option<String>,
    certainty: Vec<CertaintyNote>,
    lines: Vec<usize>,
}

/// Parses an N-Triples dump back into quads.
///
/// Reification groups (subjects with `rdf:subject`, `rdf:predicate` and
/// `rdf:object` lines) are folded back into [`AssertionMeta`] on the quad they
/// describe; `source_doc` is not part of the dump and comes back empty.
pub fn import_ntriples(text: &str) -> Result<Vec<Quad>, NTriplesError> {
    let mut triples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        triples.push((idx + 1, parse_line(idx + 1, trimmed)?));
    }

    let mut groups: BTreeMap<String, Reified> = BTreeMap::new();
    for (line, (s, p, o)) in &triples {
        let slot = match p.as_str() {
            RDF_SUBJECT | RDF_PREDICATE | RDF_OBJECT | DCTERMS_CREATOR | SAWS_CERTAINTY => true,
            RDF_TYPE => o.as_iri() == Some(RDF_STATEMENT),
            _ => false,
        };
        if !slot {
            continue;
        }
        let g = groups.entry(s.clone()).or_default();
        g.lines.push(*line);
        match (p.as_str(), o) {
            (RDF_SUBJECT, Term::Iri(v)) => g.subject = Some(v.clone()),
            (RDF_PREDICATE, Term::Iri(v)) => g.predicate = Some(v.clone()),
            (RDF_OBJECT, o) => g.object = Some(o.clone()),
            (DCTERMS_CREATOR, Term::Iri(v)) => g.creator = Some(v.clone()),
            (SAWS_CERTAINTY, Term::Literal { lexical, .. }) => {
                let note = lexical.parse().map_err(|e| NTriplesError {
                    line: *line,
                    message: format!("bad certainty note: {e}"),
                })?;
                g.certainty.push(note);
            }
            _ => {}
        }
    }
    groups.retain(|_, g| g.subject.is_some() && g.predicate.is_some() && g.object.is_some());

    let consumed: BTreeSet<usize> = groups.values().flat_map(|g| g.lines.iter().copied()).collect();
    let covered: BTreeSet<(&str, &str, &Term)> = groups
        .values()
        .map(|g| {
            (
                g.subject.as_deref().expect("retained"),
                g.predicate.as_deref().expect("retained"),
                g.object.as_ref().expect("retained"),
            )
        })
        .collect();

    let mut out = Vec::new();
    for (line, (s, p, o)) in &triples {
        if consumed.contains(line) || covered.contains(&(s.as_str(), p.as_str(), o)) {
            continue;
        }
        out.push(Quad::new(s.clone(), p.clone(), o.clone()));
    }
    for (id, g) in groups {
        out.push(Quad {
            s: g.subject.expect("retained"),
            p: g.predicate.expect("retained"),
            o: g.object.expect("retained"),
            meta: Some(AssertionMeta {
                assertion_id: id,
                responsibility: g.creator,
                certainty: g.certainty,
                source_doc: String::new(),
            }),
        });
    }
    Ok(out)
}
