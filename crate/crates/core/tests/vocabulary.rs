use gnomon_core::iri::saws;
use gnomon_core::vocabulary::DEFAULT_VOCABULARY;
use gnomon_core::{load_vocabulary, validate_vocabulary, Vocabulary, VocabularyError};

#[test]
fn shipped_vocabulary_is_clean() {
    let voc = Vocabulary::default_saws();
    assert!(!validate_vocabulary(&voc).iter().any(|d| d.is_error()));
    assert_eq!(
        voc.property(saws::IS_VARIANT_OF)
            .unwrap()
            .parents
            .iter()
            .next()
            .unwrap(),
        saws::IS_RELATED_TO
    );
    let closure = voc.subproperty_closure(saws::IS_RELATED_TO).unwrap();
    for p in [
        saws::IS_VARIANT_OF,
        saws::IS_VERBATIM_OF,
        saws::IS_SHORTER_VERSION_OF,
        saws::IS_TRANSLATION_OF,
    ] {
        assert!(closure.contains(p), "{p}");
    }
    assert!(!closure.contains(saws::IS_WRITTEN_BY));
}

#[test]
fn injected_parent_cycle_is_detected() {
    let text = format!("{DEFAULT_VOCABULARY}\nsubproperty saws:isRelatedTo saws:isVerbatimOf\n");
    match load_vocabulary(&text) {
        Err(VocabularyError::Cycle { iris }) => {
            assert!(iris.iter().any(|i| i == saws::IS_RELATED_TO));
            assert!(iris.iter().any(|i| i == saws::IS_VERBATIM_OF));
        }
        other => panic!("expected a cycle, got {other:?}"),
    }

    let mut voc = Vocabulary::default_saws();
    voc.properties
        .get_mut(saws::IS_RELATED_TO)
        .unwrap()
        .parents
        .insert(saws::IS_VARIANT_OF.to_string());
    let cycles: Vec<_> = validate_vocabulary(&voc)
        .into_iter()
        .filter(|d| d.rule == "cycle")
        .collect();
    assert_eq!(cycles.len(), 1);
}

#[test]
fn symmetric_domain_range_mismatch_is_detected() {
    let mut voc = Vocabulary::default_saws();
    let p = voc.properties.get_mut(saws::IS_SEQUENTIALLY_SIMILAR_TO).unwrap();
    assert!(p.symmetric);
    p.range = [saws::MANUSCRIPT.to_string()].into();
    assert!(validate_vocabulary(&voc)
        .iter()
        .any(|d| d.rule == "symmetric-domain-range-mismatch" && d.is_error()));
}

#[test]
fn empty_vocabulary() {
    let voc = load_vocabulary("").unwrap();
    assert!(voc.concepts.is_empty() && voc.properties.is_empty());
    assert!(validate_vocabulary(&voc).is_empty());
}
