//! Knowledge embedding: resolving or creating nodes, building links
//! through the relation rulebook, and collecting per-statement metrics.
//!
//! A statement is embedded by a cursor that hands control from unit to
//! unit, left to right: resolve or create the unit's node, then ask the
//! link manager for the link to the next unit. The link manager probes the
//! source node's link database — keyed by (destination, relation) — before
//! assigning strand values and persisting a new link, so re-embedding
//! known knowledge adds nothing.

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{integrativity_of, Coordinate, KnnId, LinkDescriptor, LinkId, ModelError};
use crate::parser::{CorpusStatement, RelationTable, Statement};
use crate::store::Store;

/// Raw counts collected while one statement was embedded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbedReport {
    /// Distinct units named by the statement.
    pub nodes_in_statement: u64,
    /// Units that did not exist before this statement.
    pub nodes_added: u64,
    /// Links inspected by dedup probes plus links created.
    pub links_traversed: u64,
    /// Links created by this statement.
    pub links_added: u64,
}

/// An embed report reduced to the two percentages that characterize the
/// embedding scenario. Values are rounded half-up to two decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioStats {
    pub nodes_added_pct: f64,
    pub links_added_pct: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("cannot classify a report with zero nodes or traversals")]
    EmptyReport,
    #[error("line {line}: {source}")]
    Statement {
        line: usize,
        source: Box<EmbedError>,
    },
}

/// Returns the node for `label` in `domain`, creating it (and the domain
/// apex, if the domain is new) when absent.
///
/// A created node lands one level below its parent — the preceding unit of
/// the statement, or the domain apex when there is none — at the smallest
/// free index of that level.
pub fn resolve_or_create_node(
    store: &mut Store,
    label: &str,
    domain: &str,
    parent: Option<KnnId>,
) -> (KnnId, bool) {
    let label = label.trim();
    debug_assert!(!label.is_empty());
    let apex = match store.domain_apex(domain) {
        Some(apex) => apex,
        None => store.create_domain(domain),
    };
    let domain_l = store
        .node(apex)
        .expect("domain apex resolves")
        .coord
        .l;
    if let Some(existing) = store.node_in_domain(domain_l, label) {
        return (existing, false);
    }
    let parent_level = parent
        .and_then(|id| store.node(id))
        .map(|node| node.coord.m)
        .unwrap_or(0);
    let m = parent_level + 1;
    let n = store.next_level_index(domain_l, m);
    let id = store.insert_node(label.to_string(), Coordinate::new(domain_l, m, n));
    (id, true)
}

/// Outcome of a dedup probe against the source node's link database.
struct Probe {
    existing: Option<LinkId>,
    links_inspected: u64,
}

fn probe_link(store: &Store, src: KnnId, dst: KnnId, relation: &str) -> Probe {
    match store.active_link(src, dst, relation) {
        Some(id) => Probe {
            existing: Some(id),
            links_inspected: 1,
        },
        None => Probe {
            existing: None,
            links_inspected: 0,
        },
    }
}

/// Builds (or finds) the active link `src -> dst` under `relation`.
///
/// On a probe miss, the descriptor is composed from the relation table's
/// performance values and the integrativity computed from the endpoint
/// coordinates, then persisted in the source node's link database.
pub fn build_link(
    store: &mut Store,
    src: KnnId,
    dst: KnnId,
    relation: &str,
    table: &RelationTable,
) -> Result<(LinkId, bool), EmbedError> {
    if src == dst {
        return Err(ModelError::SelfLink(src).into());
    }
    let properties = table
        .get(relation)
        .ok_or_else(|| EmbedError::UnknownRelation(relation.to_string()))?;
    if let Some(existing) = store.active_link(src, dst, relation) {
        return Ok((existing, false));
    }
    let src_coord = store.node(src).expect("source node resolves").coord;
    let dst_coord = store.node(dst).expect("destination node resolves").coord;
    let descriptor = LinkDescriptor {
        source: src,
        destination: dst,
        inclusivity: properties.inclusivity,
        additivity: properties.additivity,
        integrativity: integrativity_of(src_coord, dst_coord),
        relation: relation.to_string(),
    };
    Ok((store.insert_link(descriptor), true))
}

/// Embeds one validated statement and reports what changed.
pub fn embed_statement(
    store: &mut Store,
    stmt: &Statement,
    table: &RelationTable,
) -> Result<EmbedReport, EmbedError> {
    let mut seen: HashSet<&str> = HashSet::new();
    let mut nodes_added = 0;
    let mut links_traversed = 0;
    let mut links_added = 0;

    let (mut cursor, created) =
        resolve_or_create_node(store, &stmt.units[0], &stmt.domain, None);
    seen.insert(stmt.units[0].as_str());
    if created {
        nodes_added += 1;
    }

    for (unit, relation) in stmt.units[1..].iter().zip(&stmt.relations) {
        let (next, created) =
            resolve_or_create_node(store, unit, &stmt.domain, Some(cursor));
        if seen.insert(unit.as_str()) && created {
            nodes_added += 1;
        }

        if cursor == next {
            return Err(ModelError::SelfLink(cursor).into());
        }
        let probe = probe_link(store, cursor, next, relation);
        links_traversed += probe.links_inspected;
        if probe.existing.is_none() {
            build_link(store, cursor, next, relation, table)?;
            links_traversed += 1;
            links_added += 1;
        }
        cursor = next;
    }

    Ok(EmbedReport {
        nodes_in_statement: seen.len() as u64,
        nodes_added,
        links_traversed,
        links_added,
    })
}

/// Rounds `100 * numerator / denominator` half-up to two decimals.
fn percentage(numerator: u64, denominator: u64) -> f64 {
    let hundredths = (20_000 * numerator + denominator) / (2 * denominator);
    hundredths as f64 / 100.0
}

/// Reduces a report to its scenario percentages.
pub fn classify_scenario(report: EmbedReport) -> Result<ScenarioStats, EmbedError> {
    if report.nodes_in_statement == 0 || report.links_traversed == 0 {
        return Err(EmbedError::EmptyReport);
    }
    Ok(ScenarioStats {
        nodes_added_pct: percentage(report.nodes_added, report.nodes_in_statement),
        links_added_pct: percentage(report.links_added, report.links_traversed),
    })
}

/// Embeds a corpus in order, producing one report per statement. Aborts on
/// the first failing statement, naming its corpus line.
pub fn embed_corpus(
    store: &mut Store,
    corpus: &[CorpusStatement],
    table: &RelationTable,
) -> Result<Vec<(EmbedReport, ScenarioStats)>, EmbedError> {
    let mut reports = Vec::with_capacity(corpus.len());
    for entry in corpus {
        let wrap = |source: EmbedError| EmbedError::Statement {
            line: entry.line,
            source: Box::new(source),
        };
        let report = embed_statement(store, &entry.statement, table).map_err(wrap)?;
        let stats = classify_scenario(report).map_err(wrap)?;
        reports.push((report, stats));
    }
    Ok(reports)
}
