use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use gnomon_core::intertext::{alignment, CorpusIndex};
use gnomon_core::iri::expand_saws;
use gnomon_core::tei::check_local_iris;
use gnomon_core::{
    export_ntriples, import_ntriples, load_vocabulary, parse_document_at, structural_triples, validate_profile,
    validate_vocabulary, Diagnostic, Document, GraphSnapshot, IngestConfig, IngestError, Quad, RelationAssertion, Term,
    Vocabulary,
};
use gnomon_service::{load_corpus, Corpus, CorpusState};

const DEFAULT_BASE_URI: &str = "http://example.org/saws/";

#[derive(Debug, Parser)]
#[command(
    name = "gnomon",
    version,
    about = "TEI gnomologia corpora as a queryable relation graph"
)]
struct Cli {
    /// Prefix for minted document and segment IRIs (must end with `/`)
    #[arg(long, global = true, env = "GNOMON_BASE_URI", default_value = DEFAULT_BASE_URI)]
    base_uri: String,

    /// Relation vocabulary file (defaults to the built-in one)
    #[arg(long, global = true)]
    vocab: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse TEI files and print each result as a JSON line
    Ingest {
        path: PathBuf,
        /// Treat profile errors as fatal
        #[arg(long)]
        strict: bool,
    },
    /// Check TEI files (and the vocabulary) and print diagnostics as JSON lines
    Validate { path: PathBuf },
    /// Write canonical N-Triples for a file or corpus directory
    Triples {
        path: PathBuf,
        /// Add reified provenance for every assertion
        #[arg(long)]
        provenance: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Print triples matching a pattern
    Query {
        #[arg(long = "s")]
        subject: Option<String>,
        #[arg(long = "p")]
        predicate: Option<String>,
        #[arg(long = "o")]
        object: Option<String>,
        /// Include sub-properties (and symmetric readings) of --p
        #[arg(long)]
        subsume: bool,
        #[command(flatten)]
        source: GraphSource,
    },
    /// Print the alignment of a segment against corpus documents as JSON
    Align {
        #[arg(long)]
        iri: String,
        #[command(flatten)]
        source: GraphSource,
        /// Comma-separated doc_ids treated as open (default: all)
        #[arg(long)]
        open: Option<String>,
    },
    /// Run the HTTP API over a corpus directory
    Serve {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Print document, segment and assertion counts as JSON
    Stats {
        #[arg(long)]
        corpus: PathBuf,
    },
}

#[derive(Debug, Args)]
struct GraphSource {
    /// N-Triples dump to query
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Corpus directory to query
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    /// Ran to completion but found errors.
    Diagnostics,
    /// Usage or fatal problem, already described.
    Fatal(String),
}

type Outcome = Result<(), Failure>;

fn fatal(msg: impl Into<String>) -> Failure {
    Failure::Fatal(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if matches!(cli.command, Command::Serve { .. }) {
        "info"
    } else {
        "warn"
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Diagnostics) => ExitCode::from(1),
        Err(Failure::Fatal(msg)) => {
            eprintln!("gnomon: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let config = IngestConfig::new(&cli.base_uri).map_err(|e| fatal(e.to_string()))?;
    let vocab_path = cli.vocab.clone();
    let voc = || -> Result<Vocabulary, Failure> {
        match &vocab_path {
            None => Ok(Vocabulary::default_saws()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| fatal(format!("{}: {e}", p.display())))?;
                load_vocabulary(&text).map_err(|e| fatal(format!("{}: {e}", p.display())))
            }
        }
    };
    match cli.command {
        Command::Ingest { path, strict } => ingest(&path, if strict { config.strict() } else { config }),
        Command::Validate { path } => validate(&path, &config, vocab_path.as_deref()),
        Command::Triples {
            path,
            provenance,
            output,
        } => triples(&path, &config, voc()?, provenance, output.as_deref()),
        Command::Query {
            subject,
            predicate,
            object,
            subsume,
            source,
        } => query(&source, &config, voc()?, subject, predicate, object, subsume),
        Command::Align { iri, source, open } => align(&source, &config, voc()?, &expand_saws(&iri), open),
        Command::Serve { corpus, port, host } => serve(&corpus, &config, voc()?, SocketAddr::new(host, port)),
        Command::Stats { corpus } => {
            let state = open_corpus(&corpus, &config, voc()?)?;
            emit(&serde_json::to_string(&state.stats()).expect("stats serialize"))
        }
    }
}

fn emit(line: &str) -> Outcome {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").map_err(|e| fatal(format!("stdout: {e}")))
}

/// The file itself, or the `.xml` files of a directory in name order.
fn inputs(path: &Path) -> Result<Vec<PathBuf>, Failure> {
    let meta = fs::metadata(path).map_err(|e| fatal(format!("{}: {e}", path.display())))?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path).map_err(|e| fatal(format!("{}: {e}", path.display())))? {
        let p = entry.map_err(|e| fatal(format!("{}: {e}", path.display())))?.path();
        if p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("xml")) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fatal(format!("{}: {e}", path.display())))
}

fn xml_diagnostic(path: &Path, err: &IngestError) -> Diagnostic {
    let rule = match err {
        IngestError::Xml { .. } => "malformed-xml",
        IngestError::Profile { .. } => "profile-error",
        _ => "ingest-failed",
    };
    Diagnostic::error(rule, format!("{}: {err}", path.display()))
}

fn ingest(path: &Path, config: IngestConfig) -> Outcome {
    let mut failed = false;
    for file in inputs(path)? {
        let xml = read(&file)?;
        match parse_document_at(&xml, &file.display().to_string(), &config) {
            Ok(r) => {
                for d in &r.diagnostics {
                    eprintln!("{}: {d}", file.display());
                }
                failed |= r.diagnostics.iter().any(Diagnostic::is_error);
                emit(&serde_json::to_string(&r).expect("ingest results serialize"))?;
            }
            Err(e) => {
                if let IngestError::Profile { diagnostics } = &e {
                    for d in diagnostics {
                        eprintln!("{}: {d}", file.display());
                    }
                }
                eprintln!("{}: {e}", file.display());
                failed = true;
            }
        }
    }
    if failed {
        Err(Failure::Diagnostics)
    } else {
        Ok(())
    }
}

fn validate(path: &Path, config: &IngestConfig, vocab: Option<&Path>) -> Outcome {
    let mut diagnostics = Vec::new();
    let voc = match vocab {
        None => Vocabulary::default_saws(),
        Some(p) => match load_vocabulary(&read(p)?) {
            Ok(v) => {
                diagnostics.extend(validate_vocabulary(&v));
                v
            }
            Err(e) => {
                diagnostics.push(Diagnostic::error("invalid-vocabulary", format!("{}: {e}", p.display())));
                Vocabulary::default()
            }
        },
    };
    let mut documents: Vec<Document> = Vec::new();
    let mut assertions: Vec<RelationAssertion> = Vec::new();
    for file in inputs(path)? {
        let xml = read(&file)?;
        match parse_document_at(&xml, &file.display().to_string(), config) {
            Ok(r) => {
                let profile = validate_profile(&r, &voc, config);
                // the profile pass restates some parse findings at their final severity
                let restated: BTreeSet<(String, Option<String>)> =
                    profile.iter().map(|d| (d.rule.clone(), d.locator.clone())).collect();
                diagnostics.extend(
                    r.diagnostics
                        .iter()
                        .filter(|d| !restated.contains(&(d.rule.clone(), d.locator.clone())))
                        .cloned(),
                );
                diagnostics.extend(profile);
                diagnostics.extend(structural_triples(&r.document, config).1);
                documents.push(r.document);
                assertions.extend(r.assertions);
            }
            Err(e) => diagnostics.push(xml_diagnostic(&file, &e)),
        }
    }
    diagnostics.extend(check_local_iris(&documents, &assertions, config));
    for d in &diagnostics {
        emit(&d.to_json_line())?;
    }
    if diagnostics.iter().any(Diagnostic::is_error) {
        Err(Failure::Diagnostics)
    } else {
        Ok(())
    }
}

fn open_corpus(dir: &Path, config: &IngestConfig, voc: Vocabulary) -> Result<CorpusState, Failure> {
    if !dir.is_dir() {
        return Err(fatal(format!("{}: not a corpus directory", dir.display())));
    }
    load_corpus(dir, config, voc).map_err(|e| fatal(e.to_string()))
}

fn triples(path: &Path, config: &IngestConfig, voc: Vocabulary, provenance: bool, output: Option<&Path>) -> Outcome {
    let (text, errors) = if path.is_dir() {
        let state = open_corpus(path, config, voc)?;
        let skipped = state.diagnostics().iter().any(|d| d.rule == "malformed-xml");
        (state.export(provenance), skipped)
    } else {
        let xml = read(path)?;
        match parse_document_at(&xml, &path.display().to_string(), config) {
            Ok(r) => {
                for d in r.diagnostics.iter().filter(|d| d.is_error()) {
                    eprintln!("{}: {d}", path.display());
                }
                let mut quads: Vec<Quad> = structural_triples(&r.document, config).0;
                quads.extend(r.assertions.iter().map(RelationAssertion::to_quad));
                (export_ntriples(&GraphSnapshot::build(quads), provenance), false)
            }
            Err(e) => return Err(fatal(format!("{}: {e}", path.display()))),
        }
    };
    match output {
        Some(out) => fs::write(out, &text).map_err(|e| fatal(format!("{}: {e}", out.display())))?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| fatal(format!("stdout: {e}")))?,
    }
    if errors {
        Err(Failure::Diagnostics)
    } else {
        Ok(())
    }
}

/// Snapshot from an N-Triples dump or a corpus directory, plus the corpus when one was given.
fn graph_source(
    source: &GraphSource,
    config: &IngestConfig,
    voc: &Vocabulary,
) -> Result<(Arc<GraphSnapshot>, Option<CorpusState>), Failure> {
    let corpus = match &source.corpus {
        Some(dir) => Some(open_corpus(dir, config, voc.clone())?),
        None => None,
    };
    let graph = match (&source.graph, &corpus) {
        (Some(dump), _) => {
            let text = read(dump)?;
            let quads = import_ntriples(&text).map_err(|e| fatal(format!("{}: {e}", dump.display())))?;
            Arc::new(GraphSnapshot::build(quads))
        }
        (None, Some(state)) => Arc::clone(state.snapshot()),
        (None, None) => return Err(fatal("one of --graph or --corpus is required")),
    };
    Ok((graph, corpus))
}

/// `<iri>`, `saws:name`, a bare IRI, or a `"literal"` with optional `@lang`.
fn parse_object(raw: &str) -> Term {
    if let Some(rest) = raw.strip_prefix('"') {
        if let Some(end) = rest.rfind('"') {
            let lexical = &rest[..end];
            return match rest[end + 1..].strip_prefix('@') {
                Some(lang) => Term::lang_literal(lexical, lang),
                None => Term::literal(lexical),
            };
        }
    }
    Term::iri(parse_iri(raw))
}

fn parse_iri(raw: &str) -> String {
    let raw = raw.strip_prefix('<').and_then(|r| r.strip_suffix('>')).unwrap_or(raw);
    expand_saws(raw)
}

fn query(
    source: &GraphSource,
    config: &IngestConfig,
    voc: Vocabulary,
    subject: Option<String>,
    predicate: Option<String>,
    object: Option<String>,
    subsume: bool,
) -> Outcome {
    let (g, _) = graph_source(source, config, &voc)?;
    let s = subject.as_deref().map(parse_iri);
    let p = predicate.as_deref().map(parse_iri);
    let o = object.as_deref().map(parse_object);
    let found: Vec<Quad> = if subsume {
        let p = p.ok_or_else(|| fatal("--subsume needs --p"))?;
        g.match_subsumed(&voc, s.as_deref(), &p, o.as_ref(), true)
            .map_err(|e| fatal(e.to_string()))?
            .into_iter()
            .map(Quad::stripped)
            .collect()
    } else {
        g.matching(s.as_deref(), p.as_deref(), o.as_ref())
            .into_iter()
            .map(Quad::stripped)
            .collect()
    };
    let text = export_ntriples(&GraphSnapshot::build(found), false);
    std::io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| fatal(format!("stdout: {e}")))
}

fn align(source: &GraphSource, config: &IngestConfig, voc: Vocabulary, iri: &str, open: Option<String>) -> Outcome {
    let (g, corpus) = graph_source(source, config, &voc)?;
    let empty = CorpusIndex::default();
    let index = corpus.as_ref().map_or(&empty, |c| c.index());
    let open: BTreeSet<String> = match open {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect(),
        None => corpus
            .as_ref()
            .map(|c| c.documents().keys().cloned().collect())
            .unwrap_or_default(),
    };
    let result = alignment(&g, &voc, index, iri, &open);
    emit(&serde_json::to_string(&result).expect("alignment serializes"))
}

fn serve(dir: &Path, config: &IngestConfig, voc: Vocabulary, addr: SocketAddr) -> Outcome {
    let state = open_corpus(dir, config, voc)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| fatal(format!("runtime: {e}")))?;
    runtime
        .block_on(gnomon_service::serve(Arc::new(Corpus::new(state)), addr))
        .map_err(|e| fatal(format!("{addr}: {e}")))
}
