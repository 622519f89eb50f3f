use std::collections::BTreeSet;

use gnomon_core::assertion::{CertaintyNote, CertaintyTarget, Degree};
use gnomon_core::iri::{self, saws};
use gnomon_core::tei::{check_local_iris, IngestError, SegType};
use gnomon_core::{
    parse_document, parse_document_at, segment_uri, structural_triples, validate_profile, IngestConfig, Severity, Term,
    Vocabulary,
};

const BASE: &str = "http://example.org/saws/";
const ALEXANDER: &str = include_str!("../../../fixtures/alexander.xml");
const GNOMVAT: &str = include_str!("../../../fixtures/gnomvat.xml");

const ACTIVE: &str =
    "http://www.ancientwisdoms.ac.uk/cts/urn:cts:greekLit:tlg3017.Syno298.sawsGrc01:divedition.divsection1.o14.a107";
const PASSIVE: &str = "http://data.perseus.org/citations/urn:cts:greekLit:tlg0031.tlg002.perseus-grc1:9.35";
const VIAF: &str = "http://viaf.org/viaf/44335536/";

fn config() -> IngestConfig {
    IngestConfig::new(BASE).unwrap()
}

fn tei(body: &str) -> String {
    format!(
        r#"<TEI xmlns="http://www.tei-c.org/ns/1.0" xml:id="T"><teiHeader><fileDesc><titleStmt><title>t</title></titleStmt></fileDesc></teiHeader><text><body>{body}</body></text></TEI>"#
    )
}

fn verbatim_relation(children: &str) -> String {
    format!(
        r#"<relation resp="{VIAF}" ref="http://purl.org/saws/ontology#isVariantOf" active="{ACTIVE}" passive="{PASSIVE}">{children}</relation>"#
    )
}

#[test]
fn alexander_segment_tree() {
    let r = parse_document(ALEXANDER, &config()).unwrap();
    let d = &r.document;
    assert_eq!(d.doc_id, "AppGnomVat");
    assert_eq!(d.title, "Appendix Gnomologii Vaticani");
    assert_eq!(d.language, "grc");
    assert_eq!(d.header_bibliography.len(), 1);
    assert_eq!(d.root_segments.len(), 1);
    let item = &d.root_segments[0];
    assert_eq!(item.seg_type, SegType::ContentItem);
    let kinds: Vec<_> = item.children.iter().map(|c| c.seg_type.clone()).collect();
    assert_eq!(kinds, [SegType::Narrative, SegType::Statement]);
    assert_eq!(
        item.children[0].text_content,
        "Alexander, asked whom he loved more, Philip or Aristotle, said:"
    );
    assert!(item.children[1]
        .text_content
        .starts_with("Both equally, for one gave me the gift of life"));
    assert!(item.children.iter().all(|c| c.children.is_empty()));
    let statement_iri = item.children[1].iri.as_deref().unwrap();
    assert!(statement_iri.ends_with("#AppGnomVat001s2"));
    assert_eq!(statement_iri, "http://example.org/saws/AppGnomVat#AppGnomVat001s2");
    assert!(r.assertions.is_empty());
    assert!(!r.diagnostics.iter().any(|d| d.is_error()));
}

#[test]
fn verbatim_relation_becomes_one_assertion() {
    let r = parse_document(&tei(&verbatim_relation("")), &config()).unwrap();
    assert_eq!(r.assertions.len(), 1);
    let a = &r.assertions[0];
    assert_eq!(a.subject, ACTIVE);
    assert_eq!(a.predicate, saws::IS_VARIANT_OF);
    assert_eq!(a.object, PASSIVE);
    assert_eq!(a.responsibility.as_deref(), Some(VIAF));
    assert!(a.certainty.is_empty());
    assert_eq!(a.source_doc, "T");
}

#[test]
fn certainty_notes() {
    let cases = [
        (
            r#"<certainty match="../@ref" locus="value" cert="low"/>"#,
            CertaintyTarget::PredicateValue,
            Degree::Low,
        ),
        (
            r#"<certainty match=".." locus="name" cert="low"/>"#,
            CertaintyTarget::AssertionExistence,
            Degree::Low,
        ),
        (
            r#"<certainty match="../@active" locus="value" cert="medium"/>"#,
            CertaintyTarget::SubjectValue,
            Degree::Medium,
        ),
        (
            r#"<certainty match="../@passive" locus="value" cert="high"/>"#,
            CertaintyTarget::ObjectValue,
            Degree::High,
        ),
    ];
    let plain = parse_document(&tei(&verbatim_relation("")), &config())
        .unwrap()
        .assertions;
    for (child, target, degree) in cases {
        let r = parse_document(&tei(&verbatim_relation(child)), &config()).unwrap();
        assert_eq!(r.assertions.len(), 1, "{child}");
        assert_eq!(r.assertions[0].certainty, vec![CertaintyNote { target, degree }]);
        let mut stripped = r.assertions[0].clone();
        stripped.certainty.clear();
        assert_eq!(stripped, plain[0]);
    }
}

#[test]
fn unusable_certainty_is_dropped_with_warning() {
    for child in [
        r#"<certainty match="../@resp" locus="value" cert="low"/>"#,
        r#"<certainty match=".." locus="name" cert="unknown"/>"#,
    ] {
        let r = parse_document(&tei(&verbatim_relation(child)), &config()).unwrap();
        assert!(r.assertions[0].certainty.is_empty());
        assert!(r.diagnostics.iter().any(|d| d.severity == Severity::Warning), "{child}");
    }
}

#[test]
fn cartesian_expansion() {
    let body = format!(
        r#"<relation resp="{VIAF}" ref="{}" active="http://a/1 http://a/2" passive="http://b/1 http://b/2 http://b/3"/>
           <relation resp="{VIAF}" ref="{}" active="http://a/3" passive="http://b/4"/>"#,
        saws::IS_VARIANT_OF,
        saws::IS_VARIANT_OF
    );
    let r = parse_document(&tei(&body), &config()).unwrap();
    let mut expected = BTreeSet::new();
    for s in ["http://a/1", "http://a/2"] {
        for o in ["http://b/1", "http://b/2", "http://b/3"] {
            expected.insert((s.to_string(), o.to_string()));
        }
    }
    expected.insert(("http://a/3".into(), "http://b/4".into()));
    let got: BTreeSet<_> = r
        .assertions
        .iter()
        .map(|a| (a.subject.clone(), a.object.clone()))
        .collect();
    assert_eq!(r.assertions.len(), 2 * 3 + 1);
    assert_eq!(got, expected);
}

#[test]
fn empty_body() {
    let r = parse_document(&tei(""), &config()).unwrap();
    assert!(r.document.root_segments.is_empty());
    assert!(r.assertions.is_empty());
    assert!(!r.diagnostics.iter().any(|d| d.is_error()));
}

#[test]
fn missing_resp_strict_and_lenient() {
    let body = format!(
        r#"<relation ref="{}" active="{ACTIVE}" passive="{PASSIVE}"/>"#,
        saws::IS_VARIANT_OF
    );
    match parse_document(&tei(&body), &config().strict()) {
        Err(IngestError::Profile { diagnostics }) => {
            assert!(diagnostics.iter().any(|d| d.rule == "missing-resp" && d.is_error()))
        }
        other => panic!("expected profile error, got {other:?}"),
    }
    let r = parse_document(&tei(&body), &config()).unwrap();
    assert_eq!(r.assertions.len(), 1);
    assert!(r.assertions[0].responsibility.is_none());
    assert!(r
        .diagnostics
        .iter()
        .any(|d| d.rule == "missing-resp" && d.severity == Severity::Warning));
}

#[test]
fn missing_core_attributes_are_profile_errors() {
    for (attr, rule) in [
        ("ref", "missing-ref"),
        ("active", "missing-active"),
        ("passive", "missing-passive"),
    ] {
        let mut attrs = vec![
            format!(r#"resp="{VIAF}""#),
            format!(r#"ref="{}""#, saws::IS_VARIANT_OF),
            format!(r#"active="{ACTIVE}""#),
            format!(r#"passive="{PASSIVE}""#),
        ];
        attrs.retain(|a| !a.starts_with(&format!("{attr}=")));
        let r = parse_document(&tei(&format!("<relation {}/>", attrs.join(" "))), &config()).unwrap();
        assert!(r.assertions.is_empty());
        assert!(r.diagnostics.iter().any(|d| d.rule == rule && d.is_error()), "{rule}");
    }
}

#[test]
fn malformed_xml_is_fatal() {
    assert!(matches!(
        parse_document("<TEI><text><body><seg></body></text></TEI>", &config()),
        Err(IngestError::Xml { .. })
    ));
}

#[test]
fn segment_uri_scheme() {
    let c = config();
    let u = segment_uri(&c, "GnomVat", "AppGnomVat001s2").unwrap();
    assert_eq!(u, "http://example.org/saws/GnomVat#AppGnomVat001s2");
    assert_eq!(segment_uri(&c, "GnomVat", "AppGnomVat001s2").unwrap(), u);
    assert!(segment_uri(&c, "GnomVat", "a#b").is_err());
    assert!(segment_uri(&c, "GnomVat", "a b").is_err());
    assert!(segment_uri(&c, "GnomVat", "").is_err());
    assert!(IngestConfig::new("http://example.org/saws").is_err());
}

#[test]
fn thousand_distinct_uris() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let c = config();
    let alphabet: Vec<char> = "abcXYZ019_-.".chars().collect();
    let word = |rng: &mut rand::rngs::StdRng| -> String {
        let n = rng.gen_range(1..8);
        (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
    };
    let mut pairs = BTreeSet::new();
    while pairs.len() < 1000 {
        let doc = word(&mut rng);
        let id = word(&mut rng);
        pairs.insert((doc, id));
    }
    let uris: BTreeSet<String> = pairs.iter().map(|(d, i)| segment_uri(&c, d, i).unwrap()).collect();
    assert_eq!(uris.len(), 1000);
}

#[test]
fn structural_quads_for_alexander() {
    let c = config();
    let r = parse_document(ALEXANDER, &c).unwrap();
    let (quads, diags) = structural_triples(&r.document, &c);
    assert!(diags.is_empty());
    let seg = |id: &str| format!("{BASE}AppGnomVat#{id}");
    let doc = format!("{BASE}AppGnomVat");
    let expected = vec![
        (
            doc.clone(),
            iri::DCTERMS_TITLE.to_string(),
            Term::literal("Appendix Gnomologii Vaticani"),
        ),
        (doc, iri::DCTERMS_LANGUAGE.to_string(), Term::literal("grc")),
        (
            seg("AppGnomVat001"),
            iri::RDF_TYPE.to_string(),
            Term::iri(saws::CONTENT_ITEM),
        ),
        (
            seg("AppGnomVat001s1"),
            iri::RDF_TYPE.to_string(),
            Term::iri(saws::NARRATIVE),
        ),
        (
            seg("AppGnomVat001"),
            saws::CONTAINS.to_string(),
            Term::iri(seg("AppGnomVat001s1")),
        ),
        (
            seg("AppGnomVat001s2"),
            iri::RDF_TYPE.to_string(),
            Term::iri(saws::STATEMENT),
        ),
        (
            seg("AppGnomVat001"),
            saws::CONTAINS.to_string(),
            Term::iri(seg("AppGnomVat001s2")),
        ),
    ];
    let got: Vec<_> = quads.into_iter().map(|q| (q.s, q.p, q.o)).collect();
    assert_eq!(got, expected);
}

#[test]
fn unidentified_segments_yield_no_quads() {
    let c = config();
    let r = parse_document(
        &tei(r#"<seg type="contentItem"><seg type="statement">x</seg></seg>"#),
        &c,
    )
    .unwrap();
    let (quads, diags) = structural_triples(&r.document, &c);
    assert!(quads
        .iter()
        .all(|q| q.p == iri::DCTERMS_TITLE || q.p == iri::DCTERMS_LANGUAGE));
    assert_eq!(diags.len(), 2);
    assert!(diags.iter().all(|d| d.severity == Severity::Info));
}

#[test]
fn profile_validation_examples() {
    let c = config();
    let voc = Vocabulary::default_saws();
    let r = parse_document(GNOMVAT, &c).unwrap();
    let diags = validate_profile(&r, &voc, &c);
    assert!(!diags.iter().any(|d| d.is_error()), "{diags:?}");
    assert!(diags.iter().any(|d| d.rule == "untyped-endpoint"));

    let body = format!(
        r##"<seg type="contentItem" xml:id="c"><seg type="statement" xml:id="s">x</seg></seg>
           <relation resp="{VIAF}" ref="{}" active="#s" passive="http://example.org/place"/>"##,
        saws::IS_WRITTEN_AT
    );
    let r = parse_document(&tei(&body), &c).unwrap();
    assert_eq!(r.assertions[0].subject, format!("{BASE}T#s"));
    let diags = validate_profile(&r, &voc, &c);
    assert!(diags.iter().any(|d| d.rule == "domain-violation" && d.is_error()));

    let dup = tei(r#"<seg type="contentItem" xml:id="x"/><seg type="contentItem" xml:id="x"/>"#);
    let r = parse_document(&dup, &c).unwrap();
    let d = validate_profile(&r, &voc, &c)
        .into_iter()
        .find(|d| d.rule == "duplicate-id")
        .unwrap();
    assert!(d.message.contains("seg[1]") && d.message.contains("seg[2]"));

    let orphan = tei(r#"<seg type="statement" xml:id="x">s</seg>"#);
    let r = parse_document(&orphan, &c).unwrap();
    assert!(validate_profile(&r, &voc, &c)
        .iter()
        .any(|d| d.rule == "nesting-violation"));

    let body = format!(
        r#"<relation resp="{VIAF}" ref="http://example.org/notAProperty" active="http://a" passive="http://b"/>"#
    );
    let r = parse_document(&tei(&body), &c).unwrap();
    assert!(validate_profile(&r, &voc, &c)
        .iter()
        .any(|d| d.rule == "unknown-predicate"));
}

#[test]
fn dangling_local_iris() {
    let c = config();
    let body = format!(
        r##"<seg type="contentItem" xml:id="a">x</seg>
           <relation resp="{VIAF}" ref="{}" active="#a" passive="{BASE}T#missing"/>"##,
        saws::IS_VARIANT_OF
    );
    let r = parse_document(&tei(&body), &c).unwrap();
    let diags = check_local_iris([&r.document], &r.assertions, &c);
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].rule, "dangling-local-iri");
}

#[test]
fn parsing_is_pure() {
    let c = config();
    let a = parse_document_at(GNOMVAT, "fixtures/gnomvat.xml", &c).unwrap();
    let b = parse_document_at(GNOMVAT, "fixtures/gnomvat.xml", &c).unwrap();
    assert_eq!(a, b);
}

#[test]
fn entities_lines_and_pages() {
    let r = parse_document(GNOMVAT, &config()).unwrap();
    let narrative = &r.document.root_segments[0].children[0];
    assert_eq!(narrative.entities.len(), 3);
    assert_eq!(narrative.entities[0].normalized.as_deref(), Some("Alexander the Great"));
    assert_eq!(
        narrative.entities[0].authority_iri.as_deref(),
        Some("http://viaf.org/viaf/66804099/")
    );
    let lines: Vec<_> = narrative
        .line_anchors
        .iter()
        .map(|l| (l.line, l.page.as_deref()))
        .collect();
    assert_eq!(lines, [(1, Some("1r")), (2, Some("1r"))]);
    assert_eq!(r.document.entity_count(), 3);
}

#[test]
fn doc_id_fallbacks() {
    let c = config();
    let no_root_id = r#"<TEI><teiHeader><fileDesc><publicationStmt><idno>Idno 1</idno></publicationStmt></fileDesc></teiHeader><text><body/></text></TEI>"#;
    let d = parse_document(no_root_id, &c).unwrap().document;
    assert!(!d.doc_id.is_empty() && !d.doc_id.contains(' '));
    let bare = "<TEI><text><body/></text></TEI>";
    let d = parse_document_at(bare, "/corpus/Vat743.xml", &c).unwrap().document;
    assert_eq!(d.doc_id, "Vat743");
    let r = parse_document(bare, &c).unwrap();
    assert!(!r.document.doc_id.is_empty());
    assert!(r.diagnostics.iter().any(|d| d.severity == Severity::Warning));
}
