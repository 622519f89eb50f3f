use std::collections::{BTreeMap, HashMap};

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use sha2::{Digest, Sha256};

use super::{
    normalize_whitespace, profile, segment_uri, Document, EntityKind, EntityRef, IngestConfig, IngestError,
    IngestResult, LineAnchor, SegType, Segment, Strictness,
};
use crate::assertion::{CertaintyNote, CertaintyTarget, RelationAssertion};
use crate::diagnostic::{Diagnostic, Severity};
use crate::iri;

type Attrs = BTreeMap<String, String>;

struct SegDraft {
    xml_id: Option<String>,
    seg_type: SegType,
    text: String,
    children: Vec<usize>,
    anchors: Vec<LineAnchor>,
    entities: Vec<EntityRef>,
    locator: String,
}

struct EntityDraft {
    kind: EntityKind,
    normalized: Option<String>,
    authority: Option<String>,
    text: String,
    owner: Option<usize>,
    locator: String,
}

struct RelationDraft {
    attrs: Attrs,
    certainty: Vec<(Attrs, String)>,
    locator: String,
}

#[derive(Clone, Copy)]
enum Kind {
    Root,
    Seg(usize),
    Entity(usize),
    Relation(usize),
    Title,
    Idno,
    Bibl,
    Other,
}

struct Frame {
    name: String,
    kind: Kind,
    locator: String,
    child_counts: HashMap<String, usize>,
}

#[derive(Default)]
struct State {
    segs: Vec<SegDraft>,
    roots: Vec<usize>,
    entities: Vec<EntityDraft>,
    doc_entities: Vec<EntityRef>,
    relations: Vec<RelationDraft>,
    diagnostics: Vec<Diagnostic>,
    root_id: Option<String>,
    idno: Option<String>,
    title: String,
    title_done: bool,
    language: String,
    lang_fallback: Option<String>,
    bibliography: Vec<String>,
    bibl_buf: String,
    idno_buf: String,
    line: u32,
    page: Option<String>,
    seen_root: bool,
}

/// Parses a TEI document; the doc id falls back to a content hash when the
/// header carries none.
pub fn parse_document(xml_text: &str, config: &IngestConfig) -> Result<IngestResult, IngestError> {
    parse_document_at(xml_text, "", config)
}

/// Parses a TEI document read from `source_path`, whose file stem is the doc id
/// fallback after the root `xml:id` and the header `<idno>`.
pub fn parse_document_at(
    xml_text: &str,
    source_path: &str,
    config: &IngestConfig,
) -> Result<IngestResult, IngestError> {
    let mut reader = Reader::from_str(xml_text);
    reader.config_mut().check_end_names = true;
    let mut st = State::default();
    let mut stack = vec![Frame {
        name: String::new(),
        kind: Kind::Root,
        locator: String::new(),
        child_counts: HashMap::new(),
    }];

    let xml_err = |pos: u64, message: String| {
        let (line, column) = line_col(xml_text, pos as usize);
        IngestError::Xml { line, column, message }
    };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| xml_err(reader.error_position(), e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                if stack.len() == 1 {
                    if st.seen_root {
                        return Err(xml_err(reader.buffer_position(), "multiple root elements".into()));
                    }
                    st.seen_root = true;
                }
                let attrs = read_attrs(e).map_err(|m| xml_err(reader.buffer_position(), m))?;
                let name = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
                let sibling_index = {
                    let counts = &mut stack.last_mut().expect("root frame").child_counts;
                    let n = counts.entry(name.clone()).or_insert(0);
                    *n += 1;
                    *n
                };
                let frame = st.open(&stack, name, sibling_index, attrs);
                stack.push(frame);
                if is_empty {
                    let frame = stack.pop().expect("just pushed");
                    st.close(frame);
                }
            }
            Event::End(_) => {
                let frame = stack.pop().expect("reader checks end names");
                st.close(frame);
            }
            Event::Text(t) => {
                let text = t
                    .xml_content()
                    .map_err(|e| xml_err(reader.buffer_position(), e.to_string()))?;
                st.text(&stack, &text, || {
                    xml_err(reader.buffer_position(), "text outside the root element".into())
                })?;
            }
            Event::CData(t) => {
                let text = t
                    .xml_content()
                    .map_err(|e| xml_err(reader.buffer_position(), e.to_string()))?;
                st.text(&stack, &text, || {
                    xml_err(reader.buffer_position(), "CDATA outside the root element".into())
                })?;
            }
            Event::GeneralRef(r) => {
                let resolved = if r.is_char_ref() {
                    r.resolve_char_ref()
                        .map_err(|e| xml_err(reader.buffer_position(), e.to_string()))?
                        .map(String::from)
                } else {
                    let name = r
                        .decode()
                        .map_err(|e| xml_err(reader.buffer_position(), e.to_string()))?;
                    resolve_predefined_entity(&name).map(String::from)
                };
                let Some(text) = resolved else {
                    return Err(xml_err(reader.buffer_position(), "undefined entity reference".into()));
                };
                st.text(&stack, &text, || {
                    xml_err(reader.buffer_position(), "reference outside the root element".into())
                })?;
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if stack.len() > 1 {
        let open = stack.last().expect("non-empty").name.clone();
        return Err(xml_err(xml_text.len() as u64, format!("unclosed element <{open}>")));
    }
    if !st.seen_root {
        return Err(xml_err(0, "no root element".into()));
    }

    st.finish(xml_text, source_path, config)
}

fn line_col(text: &str, pos: usize) -> (usize, usize) {
    let pos = pos.min(text.len());
    let before = &text.as_bytes()[..pos];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
    (line, column)
}

fn read_attrs(e: &BytesStart<'_>) -> Result<Attrs, String> {
    let mut out = Attrs::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = attr.unescape_value().map_err(|e| e.to_string())?.into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

fn entity_kind(name: &str, ty: Option<&str>) -> Option<EntityKind> {
    match name {
        "persName" => Some(match ty {
            Some("personalName" | "personal") => EntityKind::PersonalName,
            _ => EntityKind::Person,
        }),
        "placeName" => Some(match ty {
            Some("ethnic" | "placeEthnic") => EntityKind::PlaceEthnic,
            _ => EntityKind::PlaceGeo,
        }),
        "name" | "rs" => ty.and_then(EntityKind::parse),
        _ => None,
    }
}

impl State {
    fn within(stack: &[Frame], name: &str) -> bool {
        stack.iter().any(|f| f.name == name)
    }

    fn open(&mut self, stack: &[Frame], name: String, sibling_index: usize, attrs: Attrs) -> Frame {
        let parent = stack.last().expect("root frame");
        let locator = format!("{}/{}[{}]", parent.locator, name, sibling_index);
        let in_header = Self::within(stack, "teiHeader");
        let in_text = !in_header && Self::within(stack, "text");
        let parent_kind = parent.kind;

        let kind = match name.as_str() {
            "TEI" if stack.len() == 1 => {
                self.root_id = attrs.get("xml:id").cloned();
                self.lang_fallback = attrs.get("xml:lang").cloned();
                Kind::Other
            }
            "text" if !in_header => {
                if let Some(l) = attrs.get("xml:lang") {
                    self.lang_fallback = Some(l.clone());
                }
                Kind::Other
            }
            "title" if in_header && !self.title_done && Self::within(stack, "titleStmt") => Kind::Title,
            "idno" if in_header && self.idno.is_none() && Self::within(stack, "publicationStmt") => {
                self.idno_buf.clear();
                Kind::Idno
            }
            "language" if in_header => {
                if self.language.is_empty() {
                    if let Some(ident) = attrs.get("ident") {
                        self.language = ident.trim().to_string();
                    }
                }
                Kind::Other
            }
            "bibl" | "biblStruct" if in_header && !stack.iter().any(|f| matches!(f.kind, Kind::Bibl)) => {
                self.bibl_buf.clear();
                Kind::Bibl
            }
            "seg" if in_text => {
                let idx = self.segs.len();
                self.segs.push(SegDraft {
                    xml_id: attrs.get("xml:id").cloned(),
                    seg_type: SegType::from(attrs.get("type").cloned().unwrap_or_default()),
                    text: String::new(),
                    children: Vec::new(),
                    anchors: Vec::new(),
                    entities: Vec::new(),
                    locator: locator.clone(),
                });
                match Self::innermost_seg(stack) {
                    Some(p) => self.segs[p].children.push(idx),
                    None => self.roots.push(idx),
                }
                Kind::Seg(idx)
            }
            "pb" if in_text => {
                self.page = attrs.get("n").cloned();
                Kind::Other
            }
            "lb" if in_text => {
                let n = attrs
                    .get("n")
                    .and_then(|n| n.trim().parse::<u32>().ok())
                    .filter(|&n| n > 0);
                self.line = n.unwrap_or(self.line + 1);
                if let Some(seg) = Self::innermost_seg(stack) {
                    self.segs[seg].anchors.push(LineAnchor {
                        line: self.line,
                        page: self.page.clone(),
                    });
                }
                Kind::Other
            }
            "relation" => {
                if attrs.contains_key("mutual") {
                    self.diagnostics.push(
                        Diagnostic::error("unsupported-mutual", "<relation> with @mutual is not supported")
                            .with_locator(&locator),
                    );
                }
                self.relations.push(RelationDraft {
                    attrs,
                    certainty: Vec::new(),
                    locator: locator.clone(),
                });
                Kind::Relation(self.relations.len() - 1)
            }
            "certainty" => {
                if let Kind::Relation(r) = parent_kind {
                    self.relations[r].certainty.push((attrs, locator.clone()));
                }
                Kind::Other
            }
            _ => match entity_kind(&name, attrs.get("type").map(String::as_str)).filter(|_| in_text) {
                Some(kind) => {
                    let authority = match attrs.get("ref").map(|r| r.trim()) {
                        Some(r) if iri::is_absolute(r) => Some(r.to_string()),
                        Some(r) => {
                            self.diagnostics.push(
                                Diagnostic::warning(
                                    "invalid-authority-iri",
                                    format!("@ref `{r}` on <{name}> is not an absolute IRI; ignored"),
                                )
                                .with_locator(&locator),
                            );
                            None
                        }
                        None => None,
                    };
                    self.entities.push(EntityDraft {
                        kind,
                        normalized: attrs
                            .get("key")
                            .map(|k| normalize_whitespace(k))
                            .filter(|k| !k.is_empty()),
                        authority,
                        text: String::new(),
                        owner: Self::innermost_seg(stack),
                        locator: locator.clone(),
                    });
                    Kind::Entity(self.entities.len() - 1)
                }
                None => Kind::Other,
            },
        };
        Frame {
            name,
            kind,
            locator,
            child_counts: HashMap::new(),
        }
    }

    fn innermost_seg(stack: &[Frame]) -> Option<usize> {
        stack.iter().rev().find_map(|f| match f.kind {
            Kind::Seg(i) => Some(i),
            _ => None,
        })
    }

    fn close(&mut self, frame: Frame) {
        match frame.kind {
            Kind::Entity(i) => {
                let d = &self.entities[i];
                let surface = normalize_whitespace(&d.text);
                if surface.is_empty() {
                    self.diagnostics.push(
                        Diagnostic::warning("empty-entity", "entity reference has no text; dropped")
                            .with_locator(&d.locator),
                    );
                    return;
                }
                let r = EntityRef {
                    kind: d.kind,
                    surface,
                    normalized: d.normalized.clone(),
                    authority_iri: d.authority.clone(),
                };
                match d.owner {
                    Some(seg) => self.segs[seg].entities.push(r),
                    None => self.doc_entities.push(r),
                }
            }
            Kind::Title => self.title_done = true,
            Kind::Idno => {
                let v = normalize_whitespace(&self.idno_buf);
                if !v.is_empty() {
                    self.idno = Some(v);
                }
            }
            Kind::Bibl => {
                let v = normalize_whitespace(&self.bibl_buf);
                if !v.is_empty() {
                    self.bibliography.push(v);
                }
            }
            _ => {}
        }
    }

    fn text<F: FnOnce() -> IngestError>(&mut self, stack: &[Frame], text: &str, outside: F) -> Result<(), IngestError> {
        if stack.len() == 1 {
            if text.trim().is_empty() {
                return Ok(());
            }
            return Err(outside());
        }
        for f in stack {
            match f.kind {
                Kind::Seg(i) => self.segs[i].text.push_str(text),
                Kind::Entity(i) => self.entities[i].text.push_str(text),
                Kind::Title => self.title.push_str(text),
                Kind::Idno => self.idno_buf.push_str(text),
                Kind::Bibl => self.bibl_buf.push_str(text),
                _ => {}
            }
        }
        Ok(())
    }

    fn finish(mut self, xml_text: &str, source_path: &str, config: &IngestConfig) -> Result<IngestResult, IngestError> {
        let doc_id = self.doc_id(xml_text, source_path);

        let roots: Vec<usize> = std::mem::take(&mut self.roots);
        let root_segments = roots
            .into_iter()
            .map(|i| self.build_segment(i, &doc_id, config))
            .collect();

        let mut assertions = Vec::new();
        for r in std::mem::take(&mut self.relations) {
            assertions.extend(self.relation_assertions(r, &doc_id, config));
        }

        let language = if self.language.is_empty() {
            self.lang_fallback.take().unwrap_or_default()
        } else {
            std::mem::take(&mut self.language)
        };
        let document = Document {
            doc_id: doc_id.clone(),
            title: normalize_whitespace(&self.title),
            language,
            root_segments,
            header_bibliography: std::mem::take(&mut self.bibliography),
            source_path: source_path.to_string(),
            entities: std::mem::take(&mut self.doc_entities),
        };

        let mut diagnostics = std::mem::take(&mut self.diagnostics);
        diagnostics.extend(profile::document_diagnostics(&document));
        for d in &mut diagnostics {
            if d.doc_id.is_none() {
                d.doc_id = Some(doc_id.clone());
            }
        }
        if config.strictness == Strictness::Strict && diagnostics.iter().any(Diagnostic::is_error) {
            return Err(IngestError::Profile { diagnostics });
        }
        Ok(IngestResult {
            document,
            assertions,
            diagnostics,
        })
    }

    fn doc_id(&mut self, xml_text: &str, source_path: &str) -> String {
        let stem = std::path::Path::new(source_path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .filter(|s| !s.is_empty());
        let raw = self
            .root_id
            .clone()
            .filter(|s| !s.trim().is_empty())
            .or_else(|| self.idno.clone())
            .or(stem);
        let raw = match raw {
            Some(r) => r.trim().to_string(),
            None => {
                let digest = Sha256::digest(xml_text.as_bytes());
                let id: String = digest[..6].iter().map(|b| format!("{b:02x}")).collect();
                self.diagnostics.push(Diagnostic::warning(
                    "derived-doc-id",
                    format!("no root xml:id, header idno or file name; using content hash `doc-{id}`"),
                ));
                return format!("doc-{id}");
            }
        };
        let clean: String = raw
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | ':') {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        if clean != raw {
            self.diagnostics.push(Diagnostic::warning(
                "doc-id-sanitized",
                format!("document id `{raw}` rewritten as `{clean}`"),
            ));
        }
        clean
    }

    fn build_segment(&mut self, idx: usize, doc_id: &str, config: &IngestConfig) -> Segment {
        let children_idx = std::mem::take(&mut self.segs[idx].children);
        let children = children_idx
            .into_iter()
            .map(|c| self.build_segment(c, doc_id, config))
            .collect();
        let xml_id = self.segs[idx].xml_id.clone();
        let locator = self.segs[idx].locator.clone();
        let iri = match &xml_id {
            Some(id) => match segment_uri(config, doc_id, id) {
                Ok(iri) => Some(iri),
                Err(e) => {
                    self.diagnostics
                        .push(Diagnostic::error("invalid-xml-id", e.to_string()).with_locator(&locator));
                    None
                }
            },
            None => None,
        };
        let d = &mut self.segs[idx];
        Segment {
            xml_id,
            iri,
            seg_type: d.seg_type.clone(),
            text_content: normalize_whitespace(&d.text),
            children,
            line_anchors: std::mem::take(&mut d.anchors),
            entities: std::mem::take(&mut d.entities),
            locator,
        }
    }

    fn resolve_pointer(
        &mut self,
        token: &str,
        doc_id: &str,
        config: &IngestConfig,
        attr: &str,
        locator: &str,
    ) -> Option<String> {
        if let Some(local) = token.strip_prefix('#') {
            match segment_uri(config, doc_id, local) {
                Ok(iri) => return Some(iri),
                Err(e) => {
                    self.diagnostics.push(
                        Diagnostic::error("invalid-iri", format!("@{attr} pointer `{token}`: {e}"))
                            .with_locator(locator),
                    );
                    return None;
                }
            }
        }
        if iri::is_absolute(token) {
            Some(token.to_string())
        } else {
            self.diagnostics.push(
                Diagnostic::error("invalid-iri", format!("@{attr} value `{token}` is not an absolute IRI"))
                    .with_locator(locator),
            );
            None
        }
    }

    fn relation_assertions(&mut self, r: RelationDraft, doc_id: &str, config: &IngestConfig) -> Vec<RelationAssertion> {
        let loc = r.locator.as_str();
        let mut missing = false;
        for attr in ["ref", "active", "passive"] {
            if r.attrs.get(attr).is_none_or(|v| v.trim().is_empty()) {
                self.diagnostics.push(
                    Diagnostic::error(format!("missing-{attr}"), format!("<relation> lacks @{attr}")).with_locator(loc),
                );
                missing = true;
            }
        }
        if missing || r.attrs.contains_key("mutual") {
            return Vec::new();
        }

        let ref_tokens: Vec<&str> = r.attrs["ref"].split_whitespace().collect();
        if ref_tokens.len() != 1 {
            self.diagnostics
                .push(Diagnostic::error("invalid-iri", "@ref must hold exactly one property IRI").with_locator(loc));
            return Vec::new();
        }
        let Some(predicate) = self.resolve_pointer(ref_tokens[0], doc_id, config, "ref", loc) else {
            return Vec::new();
        };

        let responsibility = match r.attrs.get("resp").map(|s| s.trim()).filter(|s| !s.is_empty()) {
            None => {
                let severity = match config.strictness {
                    Strictness::Strict => Severity::Error,
                    Strictness::Lenient => Severity::Warning,
                };
                self.diagnostics.push(
                    Diagnostic::new(
                        severity,
                        "missing-resp",
                        "<relation> lacks @resp; responsibility unknown",
                    )
                    .with_locator(loc),
                );
                None
            }
            Some(resp) => self.resolve_pointer(resp, doc_id, config, "resp", loc),
        };

        let mut certainty = Vec::new();
        for (attrs, cloc) in &r.certainty {
            let target = match attrs.get("match").map(|m| m.trim()) {
                Some("..") => Some(CertaintyTarget::AssertionExistence),
                Some("../@ref") => Some(CertaintyTarget::PredicateValue),
                Some("../@active") => Some(CertaintyTarget::SubjectValue),
                Some("../@passive") => Some(CertaintyTarget::ObjectValue),
                _ => None,
            };
            let Some(target) = target else {
                self.diagnostics.push(
                    Diagnostic::warning(
                        "unrecognized-certainty-target",
                        format!(
                            "<certainty match=\"{}\"> does not point at the relation or one of its attributes; dropped",
                            attrs.get("match").map(String::as_str).unwrap_or("")
                        ),
                    )
                    .with_locator(cloc),
                );
                continue;
            };
            match attrs.get("cert").map(|c| c.parse()) {
                Some(Ok(degree)) => certainty.push(CertaintyNote { target, degree }),
                _ => self.diagnostics.push(
                    Diagnostic::warning("invalid-cert", "@cert must be low, medium or high; note dropped")
                        .with_locator(cloc),
                ),
            }
        }

        let resolve_all = |st: &mut State, attr: &str| -> Vec<String> {
            r.attrs[attr]
                .split_whitespace()
                .filter_map(|t| st.resolve_pointer(t, doc_id, config, attr, loc))
                .collect()
        };
        let subjects = resolve_all(self, "active");
        let objects = resolve_all(self, "passive");
        let mut out = Vec::with_capacity(subjects.len() * objects.len());
        for s in &subjects {
            for o in &objects {
                out.push(RelationAssertion {
                    subject: s.clone(),
                    predicate: predicate.clone(),
                    object: o.clone(),
                    responsibility: responsibility.clone(),
                    certainty: certainty.clone(),
                    source_doc: doc_id.to_string(),
                    source_locator: r.locator.clone(),
                });
            }
        }
        out
    }
}
