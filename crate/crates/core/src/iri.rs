//! IRI helpers and the well-known namespaces the engine writes into graphs.

/// Namespace for terms of the sayings ontology.
pub const SAWS: &str = "http://purl.org/saws/ontology#";
pub const CIDOC: &str = "http://www.cidoc-crm.org/cidoc-crm/";
pub const FRBROO: &str = "http://iflastandards.info/ns/fr/frbr/frbroo/";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const DCTERMS: &str = "http://purl.org/dc/terms/";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_STATEMENT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Statement";
pub const RDF_SUBJECT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#subject";
pub const RDF_PREDICATE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#predicate";
pub const RDF_OBJECT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#object";
pub const DCTERMS_TITLE: &str = "http://purl.org/dc/terms/title";
pub const DCTERMS_LANGUAGE: &str = "http://purl.org/dc/terms/language";
pub const DCTERMS_CREATOR: &str = "http://purl.org/dc/terms/creator";
pub const SAWS_CERTAINTY: &str = "http://purl.org/saws/ontology#certainty";

/// Prefix used for minted assertion identifiers.
pub const ASSERTION_PREFIX: &str = "urn:gnomon:assertion:";

/// Well-known terms of the default vocabulary.
pub mod saws {
    pub const IS_RELATED_TO: &str = "http://purl.org/saws/ontology#isRelatedTo";
    pub const IS_VARIANT_OF: &str = "http://purl.org/saws/ontology#isVariantOf";
    pub const IS_VERBATIM_OF: &str = "http://purl.org/saws/ontology#isVerbatimOf";
    pub const IS_SHORTER_VERSION_OF: &str = "http://purl.org/saws/ontology#isShorterVersionOf";
    pub const IS_TRANSLATION_OF: &str = "http://purl.org/saws/ontology#isTranslationOf";
    pub const IS_SEQUENTIALLY_SIMILAR_TO: &str = "http://purl.org/saws/ontology#isSequentiallySimilarTo";
    pub const IS_WRITTEN_AT: &str = "http://purl.org/saws/ontology#isWrittenAt";
    pub const IS_WRITTEN_BY: &str = "http://purl.org/saws/ontology#isWrittenBy";
    pub const IS_IN_LANGUAGE: &str = "http://purl.org/saws/ontology#isInLanguage";
    pub const IS_ATTRIBUTED_TO: &str = "http://purl.org/saws/ontology#isAttributedTo";
    pub const CONTAINS: &str = "http://purl.org/saws/ontology#contains";
    pub const IS_PART_OF: &str = "http://purl.org/saws/ontology#isPartOf";

    pub const COLLECTION_INSTANCE: &str = "http://purl.org/saws/ontology#CollectionInstance";
    pub const HYPOTHESISED_INSTANCE: &str = "http://purl.org/saws/ontology#HypothesisedInstance";
    pub const SECTION: &str = "http://purl.org/saws/ontology#Section";
    pub const CONTENT_ITEM: &str = "http://purl.org/saws/ontology#ContentItem";
    pub const STATEMENT: &str = "http://purl.org/saws/ontology#Statement";
    pub const NARRATIVE: &str = "http://purl.org/saws/ontology#Narrative";
    pub const MANUSCRIPT: &str = "http://purl.org/saws/ontology#Manuscript";
    pub const SCRIPTORIUM: &str = "http://purl.org/saws/ontology#Scriptorium";
    pub const SCRIBE: &str = "http://purl.org/saws/ontology#Scribe";
    pub const ATTRIBUTED_AUTHOR: &str = "http://purl.org/saws/ontology#AttributedAuthor";
    pub const EDITOR: &str = "http://purl.org/saws/ontology#Editor";

    pub const LINGUISTIC_OBJECT: &str = "http://www.cidoc-crm.org/cidoc-crm/E33_Linguistic_Object";
    pub const PERSON: &str = "http://www.cidoc-crm.org/cidoc-crm/E21_Person";
    pub const LANGUAGE: &str = "http://www.cidoc-crm.org/cidoc-crm/E56_Language";
    pub const EXPRESSION: &str = "http://iflastandards.info/ns/fr/frbr/frbroo/F2_Expression";
}

/// True when `s` looks like an absolute IRI: a scheme (`ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )`),
/// a colon, and a non-empty remainder free of whitespace and characters N-Triples forbids in IRIs.
pub fn is_absolute(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return false;
    }
    !rest.is_empty()
        && !s.chars().any(|c| {
            c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        })
}

/// Expands a `saws:` abbreviation; anything else is returned unchanged.
pub fn expand_saws(s: &str) -> String {
    match s.strip_prefix("saws:") {
        Some(local) => format!("{SAWS}{local}"),
        None => s.to_string(),
    }
}

/// The fragment or last path segment of an IRI, used for short display labels.
pub fn local_name(iri: &str) -> &str {
    iri.rsplit(['#', '/']).find(|s| !s.is_empty()).unwrap_or(iri)
}
