//! Knowledge retrieval: thread expansion, cone assembly, and the
//! thread-existence query.
//!
//! Expansion walks a node's active inclusive links depth-first. A thread
//! grows through additive links and stops one hop after a subtractive
//! link; it also stops at the depth cap, at a node with no eligible link,
//! or when every continuation would revisit a node already on the thread.
//! Exclusive links never take part in open-ended expansion — they answer
//! only explicit named-relation probes.
//!
//! A cone is the bundle of all threads rooted at one apex node; its height
//! is the number of threads with at least one link.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::model::{Additivity, Coordinate, Inclusivity, KnnId, LinkId};
use crate::store::Store;

/// Default traversal depth cap, in links per thread.
pub const DEFAULT_MAX_DEPTH: usize = 32;

/// An ordered node/link path from a start node to a terminal node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Thread {
    pub nodes: Vec<KnnId>,
    /// Always one shorter than `nodes`.
    pub links: Vec<LinkId>,
}

impl Thread {
    pub fn hop_count(&self) -> usize {
        self.links.len()
    }

    pub fn terminal(&self) -> KnnId {
        *self.nodes.last().expect("threads hold at least one node")
    }

    /// Thread as ` -> `-joined labels.
    pub fn render(&self, store: &Store) -> String {
        self.nodes
            .iter()
            .map(|id| {
                store
                    .node(*id)
                    .map(|node| node.label.as_str())
                    .unwrap_or("?")
            })
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

/// All threads rooted at an apex node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub apex: KnnId,
    /// Extended threads only; the degenerate single-node thread is not a
    /// cone member.
    pub threads: Vec<Thread>,
    /// Number of threads.
    pub height: usize,
    /// Node count per knowledge level `m`, over the distinct nodes the
    /// cone touches (the apex included).
    pub level_widths: BTreeMap<u32, usize>,
}

/// One row of the cone report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeMetrics {
    pub apex_label: String,
    pub height: usize,
    /// `(level, width)` pairs ascending by level.
    pub levels: Vec<(u32, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RetrieveError {
    #[error("unknown node {0}")]
    UnknownNode(KnnId),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
}

/// A link eligible for expansion, pre-sorted for deterministic traversal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Edge {
    dst_coord: Coordinate,
    relation: String,
    link: LinkId,
    dst: KnnId,
    subtractive: bool,
}

fn eligible_edges(store: &Store, from: KnnId) -> Vec<Edge> {
    let mut edges: Vec<Edge> = store
        .active_outgoing(from)
        .filter_map(|id| {
            let link = store.link(id)?;
            if link.descriptor.inclusivity != Inclusivity::Inclusive {
                return None;
            }
            let dst = link.descriptor.destination;
            Some(Edge {
                dst_coord: store.node(dst)?.coord,
                relation: link.descriptor.relation.clone(),
                link: id,
                dst,
                subtractive: link.descriptor.additivity == Additivity::Subtractive,
            })
        })
        .collect();
    edges.sort();
    edges
}

/// Usage deltas gathered during a read pass, applied once it completes.
#[derive(Default)]
struct UsageDeltas {
    nodes: HashMap<KnnId, u64>,
    links: HashMap<LinkId, u64>,
}

impl UsageDeltas {
    fn visit_node(&mut self, id: KnnId) {
        *self.nodes.entry(id).or_default() += 1;
    }

    fn traverse_link(&mut self, id: LinkId) {
        *self.links.entry(id).or_default() += 1;
    }

    fn apply(self, store: &mut Store) {
        let now = store.tick();
        for (id, delta) in self.nodes {
            if let Some(node) = store.node_mut(id) {
                node.usage += delta;
            }
        }
        for (id, delta) in self.links {
            if let Some(link) = store.link_mut(id) {
                link.usage += delta;
                link.last_used = now;
            }
        }
    }
}

fn expand_from(
    store: &Store,
    start: KnnId,
    max_depth: usize,
    deltas: &mut UsageDeltas,
) -> Vec<Thread> {
    let mut threads = Vec::new();
    let mut nodes = vec![start];
    let mut links = Vec::new();
    deltas.visit_node(start);
    descend(store, max_depth, &mut nodes, &mut links, &mut threads, deltas);
    threads
}

fn descend(
    store: &Store,
    max_depth: usize,
    nodes: &mut Vec<KnnId>,
    links: &mut Vec<LinkId>,
    threads: &mut Vec<Thread>,
    deltas: &mut UsageDeltas,
) {
    let current = *nodes.last().expect("path is never empty");
    let arrived_subtractive = links
        .last()
        .and_then(|id| store.link(*id))
        .map(|link| link.descriptor.additivity == Additivity::Subtractive)
        .unwrap_or(false);

    let continuations: Vec<Edge> = if arrived_subtractive || links.len() == max_depth {
        Vec::new()
    } else {
        eligible_edges(store, current)
            .into_iter()
            .filter(|edge| !nodes.contains(&edge.dst))
            .collect()
    };

    if continuations.is_empty() {
        threads.push(Thread {
            nodes: nodes.clone(),
            links: links.clone(),
        });
        return;
    }

    for edge in continuations {
        deltas.traverse_link(edge.link);
        deltas.visit_node(edge.dst);
        nodes.push(edge.dst);
        links.push(edge.link);
        descend(store, max_depth, nodes, links, threads, deltas);
        nodes.pop();
        links.pop();
    }
}

/// Expands every maximal knowledge thread rooted at `start`.
///
/// Children are explored in ascending destination-coordinate order, so the
/// returned thread list is deterministic. Every visited node and traversed
/// link has its usage counter bumped after the read pass (links also take
/// the current tick as `last_used`).
pub fn expand_threads(
    store: &mut Store,
    start: KnnId,
    max_depth: usize,
) -> Result<Vec<Thread>, RetrieveError> {
    debug_assert!(max_depth >= 1);
    if store.node(start).is_none() {
        return Err(RetrieveError::UnknownNode(start));
    }
    let mut deltas = UsageDeltas::default();
    let threads = expand_from(store, start, max_depth, &mut deltas);
    deltas.apply(store);
    Ok(threads)
}

/// Builds the knowledge cone of `apex`: all extended threads plus the
/// per-level node widths.
pub fn build_cone(store: &mut Store, apex: KnnId, max_depth: usize) -> Result<Cone, RetrieveError> {
    let threads: Vec<Thread> = expand_threads(store, apex, max_depth)?
        .into_iter()
        .filter(|thread| thread.hop_count() > 0)
        .collect();

    let mut distinct: Vec<KnnId> = threads
        .iter()
        .flat_map(|thread| thread.nodes.iter().copied())
        .chain(std::iter::once(apex))
        .collect();
    distinct.sort();
    distinct.dedup();

    let mut level_widths = BTreeMap::new();
    for id in distinct {
        if let Some(node) = store.node(id) {
            *level_widths.entry(node.coord.m).or_default() += 1;
        }
    }

    Ok(Cone {
        apex,
        height: threads.len(),
        threads,
        level_widths,
    })
}

/// Resolves `from_label` (inside `domain` when given, otherwise across all
/// domains in ascending domain order) and returns the first thread that
/// reaches a node labelled `to_label`, trimmed at that node.
pub fn find_thread(
    store: &mut Store,
    from_label: &str,
    to_label: &str,
    domain: Option<&str>,
    max_depth: usize,
) -> Result<Option<Thread>, RetrieveError> {
    let starts: Vec<KnnId> = match domain {
        Some(name) => {
            let apex = store
                .domain_apex(name)
                .ok_or_else(|| RetrieveError::UnknownDomain(name.to_string()))?;
            let l = store.node(apex).expect("apex resolves").coord.l;
            store
                .node_in_domain(l, from_label)
                .map(|id| vec![id])
                .unwrap_or_default()
        }
        None => store.nodes_by_label(from_label),
    };
    if starts.is_empty() {
        return Err(RetrieveError::UnknownLabel(from_label.to_string()));
    }

    for start in starts {
        for thread in expand_threads(store, start, max_depth)? {
            let hit = thread.nodes.iter().position(|id| {
                store
                    .node(*id)
                    .map(|node| node.label == to_label)
                    .unwrap_or(false)
            });
            if let Some(position) = hit {
                return Ok(Some(Thread {
                    nodes: thread.nodes[..=position].to_vec(),
                    links: thread.links[..position].to_vec(),
                }));
            }
        }
    }
    Ok(None)
}

/// Drops the domain axis of a coordinate: the `(m, n)` dataset view.
pub fn dataset_projection(coord: Coordinate) -> (u32, u32) {
    (coord.m, coord.n)
}

/// Report row for one cone: apex label, height, and level widths sorted by
/// level.
pub fn cone_metrics(store: &Store, cone: &Cone) -> ConeMetrics {
    ConeMetrics {
        apex_label: store
            .node(cone.apex)
            .map(|node| node.label.clone())
            .unwrap_or_default(),
        height: cone.height,
        levels: cone.level_widths.iter().map(|(m, w)| (*m, *w)).collect(),
    }
}
