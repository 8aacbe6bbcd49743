//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use scisoftx_core::graph::{build_file_graph, build_package_graph, GraphLevel};
use scisoftx_core::links::merge;
use scisoftx_core::{CodeIndex, DocumentModel, LinkSet};

use crate::config::{ProjectConfig, DEFAULT_PORT, PORT_ENV};
use crate::evaluate::{evaluate_corpus, format_table, REPORT_FILE};
use crate::extract::extract_spans;
use crate::formats::{
    check_binding, document_from_json, document_to_json, export_xml, graph_to_json, import_xml, index_from_json,
    index_to_json, to_canonical_json, Binding,
};
use crate::repo::{build_index, parse_profiles};
use crate::service::{serve, AppState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "scisoftx", version, about = "Link a paper's code mentions to the code they describe")]
pub struct Cli {
    /// Project configuration (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Report progress and diagnostics on stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract positioned text spans from a PDF.
    Extract {
        #[arg(long)]
        pdf: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Index a source tree.
    Index {
        #[arg(long)]
        repo: Option<PathBuf>,
        /// Comma-separated language profiles (java, python); all when omitted.
        #[arg(long, value_delimiter = ',')]
        profiles: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Link code mentions in a paper to a source tree.
    Link {
        #[arg(long, conflicts_with = "document")]
        pdf: Option<PathBuf>,
        /// A previously extracted document model instead of a PDF.
        #[arg(long)]
        document: Option<PathBuf>,
        #[arg(long, conflicts_with = "index")]
        repo: Option<PathBuf>,
        /// A previously built code index instead of a source tree.
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        profiles: Vec<String>,
        /// Manual links to merge in; they win over auto links at the same place.
        #[arg(long)]
        manual: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a bipartite graph from a link file.
    Graph {
        #[arg(long, default_value = "file")]
        level: String,
        #[arg(long)]
        links: Option<PathBuf>,
        #[arg(long, conflicts_with = "index")]
        repo: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        profiles: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score the linker against a corpus with gold links.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        /// Report file; `<corpus>/report.json` when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API and the explorer UI.
    Serve {
        #[arg(long, env = PORT_ENV)]
        port: Option<u16>,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        host: IpAddr,
        /// Directory with the built explorer UI.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    User(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => EXIT_USER,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::User(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn user(e: impl std::fmt::Display) -> CliError {
    CliError::User(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

struct Ctx {
    config: ProjectConfig,
    verbose: bool,
    started: Instant,
}

impl Ctx {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("[{:>7.3}s] {}", self.started.elapsed().as_secs_f64(), msg.as_ref());
        }
    }

    fn required(&self, flag: Option<PathBuf>, from_config: &Option<PathBuf>, name: &str) -> CliResult<PathBuf> {
        flag.or_else(|| from_config.clone())
            .ok_or_else(|| user(format!("missing --{name} (and no {name}_path in the config)")))
    }

    fn profiles(&self, names: &[String]) -> CliResult<std::collections::BTreeSet<scisoftx_core::Profile>> {
        if names.is_empty() {
            self.config.profile_set().map_err(user)
        } else {
            parse_profiles(names).map_err(user)
        }
    }
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| user(format!("reading {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| internal(format!("creating {}: {e}", parent.display())))?;
            }
            fs::write(p, bytes).map_err(|e| internal(format!("writing {}: {e}", p.display())))
        }
        None => std::io::stdout().write_all(bytes).map_err(internal),
    }
}

fn load_document(ctx: &Ctx, pdf: Option<PathBuf>, document: Option<PathBuf>) -> CliResult<DocumentModel> {
    if let Some(path) = document {
        return document_from_json(&read_input(&path)?).map_err(|e| user(format!("{}: {e}", path.display())));
    }
    let path = ctx.required(pdf, &ctx.config.pdf_path, "pdf")?;
    let doc = extract_spans(&read_input(&path)?).map_err(|e| user(format!("{}: {e}", path.display())))?;
    ctx.log(format!("extracted {} spans from {} pages", doc.spans.len(), doc.page_count));
    Ok(doc)
}

fn load_index(ctx: &Ctx, repo: Option<PathBuf>, index: Option<PathBuf>, profiles: &[String]) -> CliResult<CodeIndex> {
    if let Some(path) = index {
        return index_from_json(&read_input(&path)?).map_err(|e| user(format!("{}: {e}", path.display())));
    }
    let path = ctx.required(repo, &ctx.config.repo_path, "repo")?;
    let index = build_index(&path, &ctx.profiles(profiles)?).map_err(user)?;
    ctx.log(format!("indexed {} entities", index.len()));
    for d in index.diagnostics() {
        ctx.log(format!("diagnostic: {d:?}"));
    }
    Ok(index)
}

fn load_links(path: &Path) -> CliResult<LinkSet> {
    import_xml(&read_input(path)?).map_err(|e| user(format!("{}: {e}", path.display())))
}

fn run_command(ctx: &Ctx, command: Command) -> CliResult {
    match command {
        Command::Extract { pdf, out } => {
            let doc = load_document(ctx, pdf, None)?;
            write_output(out.as_deref(), document_to_json(&doc).as_bytes())
        }
        Command::Index { repo, profiles, out } => {
            let index = load_index(ctx, repo, None, &profiles)?;
            write_output(out.as_deref(), index_to_json(&index).as_bytes())
        }
        Command::Link {
            pdf,
            document,
            repo,
            index,
            profiles,
            manual,
            out,
        } => {
            let doc = load_document(ctx, pdf, document)?;
            let index = load_index(ctx, repo, index, &profiles)?;
            let params = ctx.config.linker_params();
            let mut set = scisoftx_core::linker::link_document(&doc, &index, &params);
            ctx.log(format!("linker produced {} links", set.len()));
            if let Some(path) = manual {
                let manual = load_links(&path)?;
                match check_binding(&manual, &set.document_digest, &set.code_digest) {
                    Ok(Binding::Matches) => {}
                    Ok(Binding::CodeChanged) => {
                        eprintln!("warning: {} was made against a different version of the code", path.display())
                    }
                    Err(e) => return Err(user(format!("{}: {e}", path.display()))),
                }
                let mut manual = manual;
                manual.code_digest = set.code_digest.clone();
                set = merge(&set, &manual).map_err(user)?;
            }
            let out = out.or_else(|| ctx.config.links_path.clone());
            write_output(out.as_deref(), &export_xml(&set))
        }
        Command::Graph {
            level,
            links,
            repo,
            index,
            profiles,
            out,
        } => {
            let level: GraphLevel = level.parse().map_err(user)?;
            let links_path = ctx.required(links, &ctx.config.links_path, "links")?;
            let set = load_links(&links_path)?;
            let have_code = repo.is_some() || index.is_some() || ctx.config.repo_path.is_some();
            let index = if have_code || !set.is_empty() {
                load_index(ctx, repo, index, &profiles)?
            } else {
                CodeIndex::empty("root")
            };
            let build = match level {
                GraphLevel::File => build_file_graph(&set, &index),
                GraphLevel::Package => build_package_graph(&set, &index),
            };
            for u in &build.unresolved {
                eprintln!("warning: link {} targets {} which is not in the code index", u.link_id, u.target_qname);
            }
            build.graph.check().map_err(internal)?;
            write_output(out.as_deref(), graph_to_json(&build.graph).as_bytes())
        }
        Command::Eval { corpus, out } => {
            if !corpus.is_dir() {
                return Err(user(format!("{} is not a directory", corpus.display())));
            }
            let report = evaluate_corpus(&corpus, &ctx.config.linker_params())
                .map_err(|e| user(format!("reading {}: {e}", corpus.display())))?;
            let out = out.unwrap_or_else(|| corpus.join(REPORT_FILE));
            write_output(Some(&out), to_canonical_json(&report).as_bytes())?;
            print!("{}", format_table(&report));
            ctx.log(format!("wrote {}", out.display()));
            Ok(())
        }
        Command::Serve { port, host, static_dir } => {
            let state = AppState::load(&ctx.config, static_dir).map_err(user)?;
            let addr = SocketAddr::new(host, port.unwrap_or(DEFAULT_PORT));
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(internal)?;
            runtime.block_on(serve(state, addr)).map_err(internal)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USER } else { EXIT_OK };
        }
    };
    let config = match &cli.config {
        Some(path) => match ProjectConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USER;
            }
        },
        None => ProjectConfig::default(),
    };
    let ctx = Ctx {
        config,
        verbose: cli.verbose,
        started: Instant::now(),
    };
    match run_command(&ctx, cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
