//! `ils` — embed assertion corpora, query threads and cones, manage link
//! fading, and emit CSV metrics reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 engine error. Data goes to
//! stdout, diagnostics to stderr prefixed `ils: error:`.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use informledge::embed::embed_corpus;
use informledge::lifecycle::{fade_tick, FadePolicy};
use informledge::parser::{load_relation_table, parse_corpus, RelationTable};
use informledge::retrieve::{build_cone, cone_metrics, find_thread, DEFAULT_MAX_DEPTH};
use informledge::store::Store;

/// Env var consulted for the relation table when `--relations` is absent.
const RELATIONS_ENV: &str = "ILS_RELATIONS";

#[derive(Parser)]
#[command(name = "ils", version, about = "Informledge knowledge network engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Embed one or more corpus files into a store
    Embed {
        /// Store snapshot path (created when absent)
        #[arg(long)]
        store: PathBuf,
        /// Relation table path (else $ILS_RELATIONS, else built-in table)
        #[arg(long)]
        relations: Option<PathBuf>,
        /// Initial domain context for corpora without @domain lines
        #[arg(long)]
        domain: Option<String>,
        /// Corpus files, embedded in order
        #[arg(required = true)]
        corpus: Vec<PathBuf>,
    },
    /// Retrieve the knowledge cone of a node
    Cone {
        #[arg(long)]
        store: PathBuf,
        /// Restrict label lookup to one domain
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Apex node label
        label: String,
    },
    /// Find a thread from one label to another
    Thread {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Report domain, node, and link totals
    Stats {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Fade rarely used links
    Fade {
        #[arg(long)]
        store: PathBuf,
        /// Links used fewer times than this are fade candidates
        #[arg(long)]
        min_usage: u64,
        /// Ticks a candidate must sit idle before fading
        #[arg(long)]
        window: u64,
    },
    /// Print the store snapshot
    Dump {
        #[arg(long)]
        store: PathBuf,
    },
    /// Validate a snapshot file and install it as the store
    Load {
        #[arg(long)]
        store: PathBuf,
        snapshot: PathBuf,
    },
    /// Emit CSV metrics reports
    Report {
        #[command(subcommand)]
        kind: ReportKind,
    },
}

#[derive(Subcommand)]
enum ReportKind {
    /// Per-statement embedding scenarios for a corpus
    Table2 {
        /// Optional starting store (never written back)
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        relations: Option<PathBuf>,
        #[arg(long)]
        domain: Option<String>,
        #[arg(required = true)]
        corpus: Vec<PathBuf>,
    },
    /// Cone heights and level widths for a list of apex labels
    Cones {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        #[arg(required = true)]
        apexes: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own usage text; route parse failures to the
            // usage exit code while keeping --help/--version on success.
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("ils: error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_store(path: &Path) -> Result<Store> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read store {}", path.display()))?;
    Store::restore(&text).with_context(|| format!("cannot restore store {}", path.display()))
}

fn load_store_or_empty(path: &Path) -> Result<Store> {
    if path.exists() {
        load_store(path)
    } else {
        Ok(Store::new())
    }
}

fn save_store(store: &Store, path: &Path) -> Result<()> {
    fs::write(path, store.snapshot())
        .with_context(|| format!("cannot write store {}", path.display()))
}

fn load_relations(explicit: Option<&Path>) -> Result<RelationTable> {
    let path = explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(RELATIONS_ENV).map(PathBuf::from));
    match path {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .with_context(|| format!("cannot read relation table {}", path.display()))?;
            load_relation_table(&text)
                .with_context(|| format!("bad relation table {}", path.display()))
        }
        None => Ok(RelationTable::default()),
    }
}

fn read_corpus(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read corpus {}", path.display()))
}

/// Resolves an apex label to a node, preferring the given domain and
/// otherwise the lowest domain index carrying the label.
fn resolve_label(store: &Store, label: &str, domain: Option<&str>) -> Result<informledge::KnnId> {
    match domain {
        Some(name) => {
            let apex = store
                .domain_apex(name)
                .ok_or_else(|| anyhow!("unknown domain `{name}`"))?;
            let l = store.node(apex).expect("apex resolves").coord.l;
            store
                .node_in_domain(l, label)
                .ok_or_else(|| anyhow!("unknown node `{label}` in domain `{name}`"))
        }
        None => store
            .nodes_by_label(label)
            .first()
            .copied()
            .ok_or_else(|| anyhow!("unknown node `{label}`")),
    }
}

fn embed_files(
    store: &mut Store,
    table: &RelationTable,
    domain: Option<&str>,
    corpus: &[PathBuf],
) -> Result<Vec<(informledge::EmbedReport, informledge::ScenarioStats)>> {
    let mut reports = Vec::new();
    for path in corpus {
        let text = read_corpus(path)?;
        let statements = parse_corpus(&text, domain, table)
            .with_context(|| format!("cannot parse corpus {}", path.display()))?;
        let mut batch = embed_corpus(store, &statements, table)
            .with_context(|| format!("cannot embed corpus {}", path.display()))?;
        reports.append(&mut batch);
    }
    Ok(reports)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Embed {
            store: store_path,
            relations,
            domain,
            corpus,
        } => {
            let mut store = load_store_or_empty(&store_path)?;
            let table = load_relations(relations.as_deref())?;
            let reports = embed_files(&mut store, &table, domain.as_deref(), &corpus)?;
            save_store(&store, &store_path)?;
            let nodes: u64 = reports.iter().map(|(report, _)| report.nodes_added).sum();
            let links: u64 = reports.iter().map(|(report, _)| report.links_added).sum();
            println!(
                "embedded {} statements: {nodes} nodes added, {links} links added",
                reports.len()
            );
            Ok(())
        }
        Command::Cone {
            store: store_path,
            domain,
            max_depth,
            format,
            label,
        } => {
            let mut store = load_store(&store_path)?;
            let apex = resolve_label(&store, label.trim(), domain.as_deref())?;
            store.advance_tick();
            let cone = build_cone(&mut store, apex, max_depth)?;
            let metrics = cone_metrics(&store, &cone);
            match format {
                Format::Text => {
                    println!("apex: {}", metrics.apex_label);
                    println!("height: {}", metrics.height);
                    for (level, width) in &metrics.levels {
                        println!("level {level}: {width}");
                    }
                    for thread in &cone.threads {
                        println!("thread: {}", thread.render(&store));
                    }
                }
                Format::Csv => print!("{}", report::render_cones(&[metrics])),
            }
            save_store(&store, &store_path)?;
            Ok(())
        }
        Command::Thread {
            store: store_path,
            from,
            to,
            domain,
            max_depth,
        } => {
            let mut store = load_store(&store_path)?;
            store.advance_tick();
            let thread = find_thread(
                &mut store,
                from.trim(),
                to.trim(),
                domain.as_deref(),
                max_depth,
            )?;
            match thread {
                Some(thread) => println!("{}", thread.render(&store)),
                None => println!("no thread"),
            }
            save_store(&store, &store_path)?;
            Ok(())
        }
        Command::Stats {
            store: store_path,
            format,
        } => {
            let store = load_store(&store_path)?;
            let stats = store.system_stats();
            match format {
                Format::Text => {
                    println!("domains: {}", stats.domain_count);
                    println!("nodes: {}", stats.total_nodes);
                    println!(
                        "links: {} active, {} faded",
                        stats.active_links, stats.faded_links
                    );
                    for domain in &stats.domains {
                        println!(
                            "domain {} (l={}): {} nodes",
                            domain.name, domain.l, domain.nodes
                        );
                    }
                }
                Format::Csv => print!("{}", report::render_stats(&stats)),
            }
            Ok(())
        }
        Command::Fade {
            store: store_path,
            min_usage,
            window,
        } => {
            let mut store = load_store(&store_path)?;
            let policy = FadePolicy::new(window, min_usage)?;
            let now = store.advance_tick();
            let report = fade_tick(&mut store, policy, now);
            save_store(&store, &store_path)?;
            if report.is_empty() {
                println!("faded 0 links");
            } else {
                let ids: Vec<String> = report.faded.iter().map(|id| id.to_string()).collect();
                println!("faded {} links: {}", report.faded.len(), ids.join(" "));
            }
            Ok(())
        }
        Command::Dump { store: store_path } => {
            let store = load_store(&store_path)?;
            print!("{}", store.snapshot());
            Ok(())
        }
        Command::Load {
            store: store_path,
            snapshot,
        } => {
            let text = fs::read_to_string(&snapshot)
                .with_context(|| format!("cannot read snapshot {}", snapshot.display()))?;
            let store = Store::restore(&text)
                .with_context(|| format!("invalid snapshot {}", snapshot.display()))?;
            save_store(&store, &store_path)?;
            println!(
                "loaded {} nodes, {} links",
                store.node_count(),
                store.link_count()
            );
            Ok(())
        }
        Command::Report { kind } => match kind {
            ReportKind::Table2 {
                store: store_path,
                relations,
                domain,
                corpus,
            } => {
                let mut store = match store_path {
                    Some(path) => load_store(&path)?,
                    None => Store::new(),
                };
                let table = load_relations(relations.as_deref())?;
                let reports = embed_files(&mut store, &table, domain.as_deref(), &corpus)?;
                print!("{}", report::render_table2(&reports));
                Ok(())
            }
            ReportKind::Cones {
                store: store_path,
                domain,
                max_depth,
                apexes,
            } => {
                let mut store = load_store(&store_path)?;
                store.advance_tick();
                let mut rows = Vec::with_capacity(apexes.len());
                for label in &apexes {
                    let apex = resolve_label(&store, label.trim(), domain.as_deref())?;
                    let cone = build_cone(&mut store, apex, max_depth)?;
                    rows.push(cone_metrics(&store, &cone));
                }
                print!("{}", report::render_cones(&rows));
                save_store(&store, &store_path)?;
                Ok(())
            }
        },
    }
}
