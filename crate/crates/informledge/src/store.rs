//! Node and link tables, deterministic snapshot persistence, and
//! system-level statistics.
//!
//! The store is single-writer: embedding and lifecycle operations take
//! `&mut Store`, while snapshots are plain strings safe to hand to any
//! number of readers. Snapshots use the line-oriented ILSSNAP text format
//! so that equal stores serialize to identical bytes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    integrativity_of, Additivity, Coordinate, Inclusivity, Integrativity, Knn, KnnId, Link,
    LinkDescriptor, LinkId, LinkState,
};

/// Magic first line of the snapshot format.
const SNAPSHOT_HEADER: &str = "ILSSNAP 1";

/// The knowledge network: nodes, links, domain apexes, and the lifecycle
/// tick.
#[derive(Debug, Clone, Default)]
pub struct Store {
    nodes: Vec<Knn>,
    links: Vec<Link>,
    domains: BTreeMap<String, KnnId>,
    tick: u64,
    // Lookup indexes, rebuilt on restore.
    labels: HashMap<(u32, String), KnnId>,
    coords: HashMap<Coordinate, KnnId>,
    level_indexes: HashMap<(u32, u32), BTreeSet<u32>>,
    // Each node's active links, keyed by (destination, relation). This is
    // the per-node link database a dedup probe inspects.
    outgoing: HashMap<KnnId, BTreeMap<(KnnId, String), LinkId>>,
}

/// Per-domain slice of the system stats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainCount {
    pub name: String,
    pub l: u32,
    pub nodes: usize,
}

/// Union-of-domains view of what the store knows: the per-domain node
/// counts partition the node table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemStats {
    pub domain_count: usize,
    pub total_nodes: usize,
    pub active_links: usize,
    pub faded_links: usize,
    /// One entry per domain, ascending by `l`.
    pub domains: Vec<DomainCount>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StoreError {
    #[error("bad snapshot header (expected `{SNAPSHOT_HEADER}`)")]
    BadHeader,
    #[error("corrupt record at line {line}: {reason}")]
    CorruptRecord { line: usize, reason: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn node(&self, id: KnnId) -> Option<&Knn> {
        self.nodes.get(id.index())
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.get(id.index())
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Knn> {
        self.nodes.iter()
    }

    /// Links in id order.
    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.iter()
    }

    /// Domain names with their apex nodes, in name order.
    pub fn domains(&self) -> impl Iterator<Item = (&str, KnnId)> {
        self.domains.iter().map(|(name, id)| (name.as_str(), *id))
    }

    pub fn domain_apex(&self, name: &str) -> Option<KnnId> {
        self.domains.get(name).copied()
    }

    /// Current lifecycle tick.
    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Advances the lifecycle clock by one tick and returns the new value.
    /// Called once per retrieval batch.
    pub fn advance_tick(&mut self) -> u64 {
        self.tick += 1;
        self.tick
    }

    /// Looks up a node by label within one domain.
    pub fn node_in_domain(&self, domain_l: u32, label: &str) -> Option<KnnId> {
        self.labels.get(&(domain_l, label.to_string())).copied()
    }

    /// All nodes carrying this label, ascending by domain index.
    pub fn nodes_by_label(&self, label: &str) -> Vec<KnnId> {
        let mut ids: Vec<KnnId> = self
            .nodes
            .iter()
            .filter(|node| node.label == label)
            .map(|node| node.id)
            .collect();
        ids.sort_by_key(|id| self.nodes[id.index()].coord);
        ids
    }

    /// The active link from `src` to `dst` under `relation`, if any.
    pub fn active_link(&self, src: KnnId, dst: KnnId, relation: &str) -> Option<LinkId> {
        self.outgoing
            .get(&src)?
            .get(&(dst, relation.to_string()))
            .copied()
    }

    /// Active links leaving `src`, ascending by (destination, relation).
    pub fn active_outgoing(&self, src: KnnId) -> impl Iterator<Item = LinkId> + '_ {
        self.outgoing
            .get(&src)
            .into_iter()
            .flat_map(|slots| slots.values().copied())
    }

    /// Registers a new domain apex and returns its id. The apex label is
    /// the domain name and its coordinate is `(l, 0, 0)` for the next free
    /// domain index.
    pub(crate) fn create_domain(&mut self, name: &str) -> KnnId {
        debug_assert!(self.domains.get(name).is_none());
        let next_l = self
            .nodes
            .iter()
            .map(|node| node.coord.l)
            .max()
            .unwrap_or(0)
            + 1;
        let apex = self.insert_node(name.to_string(), Coordinate::new(next_l, 0, 0));
        self.domains.insert(name.to_string(), apex);
        apex
    }

    /// Smallest unused `n` at `(l, m)`.
    pub(crate) fn next_level_index(&self, l: u32, m: u32) -> u32 {
        let used = self.level_indexes.get(&(l, m));
        let mut candidate = 0;
        if let Some(used) = used {
            while used.contains(&candidate) {
                candidate += 1;
            }
        }
        candidate
    }

    pub(crate) fn insert_node(&mut self, label: String, coord: Coordinate) -> KnnId {
        debug_assert!(!label.trim().is_empty());
        debug_assert!(!label.contains(['\t', '\n']));
        debug_assert!(!self.coords.contains_key(&coord));
        let id = KnnId(self.nodes.len() as u64);
        self.labels.insert((coord.l, label.clone()), id);
        self.coords.insert(coord, id);
        self.level_indexes
            .entry((coord.l, coord.m))
            .or_default()
            .insert(coord.n);
        self.nodes.push(Knn {
            id,
            label,
            coord,
            usage: 0,
        });
        id
    }

    /// Stores a fresh active link. The caller guarantees no active link
    /// with the same (source, destination, relation) exists.
    pub(crate) fn insert_link(&mut self, descriptor: LinkDescriptor) -> LinkId {
        let id = LinkId(self.links.len() as u64);
        let key = (descriptor.destination, descriptor.relation.clone());
        let replaced = self
            .outgoing
            .entry(descriptor.source)
            .or_default()
            .insert(key, id);
        debug_assert!(replaced.is_none());
        self.links.push(Link {
            id,
            descriptor,
            usage: 0,
            last_used: self.tick,
            state: LinkState::Active,
        });
        id
    }

    pub(crate) fn node_mut(&mut self, id: KnnId) -> Option<&mut Knn> {
        self.nodes.get_mut(id.index())
    }

    pub(crate) fn link_mut(&mut self, id: LinkId) -> Option<&mut Link> {
        self.links.get_mut(id.index())
    }

    /// Moves an active link into the dormant area: it keeps its row in the
    /// link table but leaves the per-node link database.
    pub(crate) fn deactivate_link(&mut self, id: LinkId) {
        let link = &mut self.links[id.index()];
        link.state = LinkState::Faded;
        let key = (
            link.descriptor.destination,
            link.descriptor.relation.clone(),
        );
        if let Some(slots) = self.outgoing.get_mut(&link.descriptor.source) {
            if slots.get(&key) == Some(&id) {
                slots.remove(&key);
            }
        }
    }

    /// Reactivates a faded link, restoring it to the per-node link
    /// database. Fails if the slot has been taken by a newer active link.
    pub(crate) fn reactivate_link(&mut self, id: LinkId) -> Result<(), StoreError> {
        let link = &self.links[id.index()];
        let src = link.descriptor.source;
        let key = (
            link.descriptor.destination,
            link.descriptor.relation.clone(),
        );
        let slots = self.outgoing.entry(src).or_default();
        if let Some(existing) = slots.get(&key) {
            return Err(StoreError::InvariantViolation(format!(
                "active link {existing} already holds ({src} -> {}, {})",
                key.0, key.1
            )));
        }
        slots.insert(key, id);
        self.links[id.index()].state = LinkState::Active;
        Ok(())
    }

    /// Serializes the store to ILSSNAP text. Records are sorted by id, so
    /// equal stores produce identical bytes.
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        out.push_str(SNAPSHOT_HEADER);
        out.push('\n');
        out.push_str("[nodes]\n");
        for node in &self.nodes {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                node.id, node.label, node.coord.l, node.coord.m, node.coord.n, node.usage
            );
        }
        out.push_str("[links]\n");
        for link in &self.links {
            let d = &link.descriptor;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                link.id,
                d.source,
                d.destination,
                d.relation,
                d.inclusivity,
                d.additivity,
                d.integrativity,
                link.usage,
                link.last_used,
                link.state
            );
        }
        out.push_str("[domains]\n");
        let mut domains: Vec<(&String, &KnnId)> = self.domains.iter().collect();
        domains.sort_by_key(|(_, id)| **id);
        for (name, apex) in domains {
            let _ = writeln!(out, "{name}\t{apex}");
        }
        out
    }

    /// Reconstructs a store from ILSSNAP text, re-validating every store
    /// invariant. Rejects rather than repairs invalid input.
    ///
    /// The tick is not part of the format; it resumes from the largest
    /// persisted `last_used`.
    pub fn restore(text: &str) -> Result<Store, StoreError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(StoreError::BadHeader)?;
        if header.trim_end() != SNAPSHOT_HEADER {
            return Err(StoreError::BadHeader);
        }

        #[derive(PartialEq)]
        enum Section {
            Preamble,
            Nodes,
            Links,
            Domains,
        }
        let mut section = Section::Preamble;
        let mut store = Store::new();
        let mut domain_rows: Vec<(usize, String, KnnId)> = Vec::new();

        for (index, line) in lines {
            let line_no = index + 1;
            let corrupt = |reason: &str| StoreError::CorruptRecord {
                line: line_no,
                reason: reason.to_string(),
            };
            match line {
                "[nodes]" if section == Section::Preamble => section = Section::Nodes,
                "[links]" if section == Section::Nodes => section = Section::Links,
                "[domains]" if section == Section::Links => section = Section::Domains,
                "[nodes]" | "[links]" | "[domains]" => {
                    return Err(corrupt("section out of order"))
                }
                row => match section {
                    Section::Preamble => return Err(corrupt("data before [nodes] section")),
                    Section::Nodes => restore_node(&mut store, row, line_no)?,
                    Section::Links => restore_link(&mut store, row, line_no)?,
                    Section::Domains => {
                        let fields: Vec<&str> = row.split('\t').collect();
                        if fields.len() != 2 {
                            return Err(corrupt("domain row needs 2 fields"));
                        }
                        if fields[0].is_empty() {
                            return Err(corrupt("empty domain name"));
                        }
                        let apex = KnnId(
                            fields[1]
                                .parse()
                                .map_err(|_| corrupt("unparsable apex id"))?,
                        );
                        domain_rows.push((line_no, fields[0].to_string(), apex));
                    }
                },
            }
        }
        if section != Section::Domains {
            return Err(StoreError::CorruptRecord {
                line: text.lines().count(),
                reason: "missing section".to_string(),
            });
        }

        restore_domains(&mut store, domain_rows)?;
        store.tick = store.links.iter().map(|link| link.last_used).max().unwrap_or(0);
        Ok(store)
    }

    /// Partitions nodes by domain and reports the per-domain knowledge
    /// counts together with link totals.
    pub fn system_stats(&self) -> SystemStats {
        let mut per_l: BTreeMap<u32, usize> = BTreeMap::new();
        for node in &self.nodes {
            *per_l.entry(node.coord.l).or_default() += 1;
        }
        let mut domains: Vec<DomainCount> = self
            .domains
            .iter()
            .map(|(name, apex)| {
                let l = self.nodes[apex.index()].coord.l;
                DomainCount {
                    name: name.clone(),
                    l,
                    nodes: per_l.get(&l).copied().unwrap_or(0),
                }
            })
            .collect();
        domains.sort_by_key(|domain| domain.l);
        let faded = self
            .links
            .iter()
            .filter(|link| link.state == LinkState::Faded)
            .count();
        SystemStats {
            domain_count: domains.len(),
            total_nodes: self.nodes.len(),
            active_links: self.links.len() - faded,
            faded_links: faded,
            domains,
        }
    }
}

fn restore_node(store: &mut Store, row: &str, line_no: usize) -> Result<(), StoreError> {
    let corrupt = |reason: String| StoreError::CorruptRecord {
        line: line_no,
        reason,
    };
    let fields: Vec<&str> = row.split('\t').collect();
    if fields.len() != 6 {
        return Err(corrupt(format!("node row needs 6 fields, found {}", fields.len())));
    }
    let id: u64 = fields[0]
        .parse()
        .map_err(|_| corrupt("unparsable node id".into()))?;
    if id != store.nodes.len() as u64 {
        return Err(corrupt(format!("node ids must be dense and ordered, expected {}", store.nodes.len())));
    }
    let label = fields[1].to_string();
    if label.trim().is_empty() {
        return Err(corrupt("empty node label".into()));
    }
    let parse_coord = |field: &str, axis: &str| {
        field
            .parse::<u32>()
            .map_err(|_| corrupt(format!("unparsable coordinate {axis}")))
    };
    let coord = Coordinate::new(
        parse_coord(fields[2], "l")?,
        parse_coord(fields[3], "m")?,
        parse_coord(fields[4], "n")?,
    );
    if coord.l == 0 {
        return Err(StoreError::InvariantViolation(format!(
            "node {id} domain index must be positive"
        )));
    }
    let usage: u64 = fields[5]
        .parse()
        .map_err(|_| corrupt("unparsable usage".into()))?;
    if store.coords.contains_key(&coord) {
        return Err(StoreError::InvariantViolation(format!(
            "duplicate coordinate {coord}"
        )));
    }
    if store.labels.contains_key(&(coord.l, label.clone())) {
        return Err(StoreError::InvariantViolation(format!(
            "duplicate label `{label}` in domain {}",
            coord.l
        )));
    }
    let node_id = store.insert_node(label, coord);
    store.nodes[node_id.index()].usage = usage;
    Ok(())
}

fn restore_link(store: &mut Store, row: &str, line_no: usize) -> Result<(), StoreError> {
    let corrupt = |reason: String| StoreError::CorruptRecord {
        line: line_no,
        reason,
    };
    let fields: Vec<&str> = row.split('\t').collect();
    if fields.len() != 10 {
        return Err(corrupt(format!("link row needs 10 fields, found {}", fields.len())));
    }
    let id: u64 = fields[0]
        .parse()
        .map_err(|_| corrupt("unparsable link id".into()))?;
    if id != store.links.len() as u64 {
        return Err(corrupt(format!("link ids must be dense and ordered, expected {}", store.links.len())));
    }
    let src = KnnId(
        fields[1]
            .parse()
            .map_err(|_| corrupt("unparsable source id".into()))?,
    );
    let dst = KnnId(
        fields[2]
            .parse()
            .map_err(|_| corrupt("unparsable destination id".into()))?,
    );
    let relation = fields[3].to_string();
    if relation.is_empty() {
        return Err(corrupt("empty relation name".into()));
    }
    let inclusivity = match fields[4] {
        "inclusive" => Inclusivity::Inclusive,
        "exclusive" => Inclusivity::Exclusive,
        other => return Err(corrupt(format!("bad inclusivity `{other}`"))),
    };
    let additivity = match fields[5] {
        "additive" => Additivity::Additive,
        "subtractive" => Additivity::Subtractive,
        other => return Err(corrupt(format!("bad additivity `{other}`"))),
    };
    let integrativity = match fields[6] {
        "integrative" => Integrativity::Integrative,
        "differentiative" => Integrativity::Differentiative,
        other => return Err(corrupt(format!("bad integrativity `{other}`"))),
    };
    let usage: u64 = fields[7]
        .parse()
        .map_err(|_| corrupt("unparsable usage".into()))?;
    let last_used: u64 = fields[8]
        .parse()
        .map_err(|_| corrupt("unparsable last_used".into()))?;
    let state = match fields[9] {
        "active" => LinkState::Active,
        "faded" => LinkState::Faded,
        other => return Err(corrupt(format!("bad link state `{other}`"))),
    };

    let src_node = store.node(src).ok_or_else(|| {
        StoreError::InvariantViolation(format!("link {id} has dangling source {src}"))
    })?;
    let dst_node = store.node(dst).ok_or_else(|| {
        StoreError::InvariantViolation(format!("link {id} has dangling destination {dst}"))
    })?;
    if src == dst {
        return Err(StoreError::InvariantViolation(format!(
            "link {id} is a self link on node {src}"
        )));
    }
    let expected = integrativity_of(src_node.coord, dst_node.coord);
    if integrativity != expected {
        return Err(StoreError::InvariantViolation(format!(
            "link {id} integrativity does not match its endpoint domains"
        )));
    }
    if state == LinkState::Active && store.active_link(src, dst, &relation).is_some() {
        return Err(StoreError::InvariantViolation(format!(
            "duplicate active link ({src} -> {dst}, {relation})"
        )));
    }

    let link_id = LinkId(store.links.len() as u64);
    store.links.push(Link {
        id: link_id,
        descriptor: LinkDescriptor {
            source: src,
            destination: dst,
            inclusivity,
            additivity,
            integrativity,
            relation: relation.clone(),
        },
        usage,
        last_used,
        state,
    });
    if state == LinkState::Active {
        store
            .outgoing
            .entry(src)
            .or_default()
            .insert((dst, relation), link_id);
    }
    Ok(())
}

fn restore_domains(
    store: &mut Store,
    rows: Vec<(usize, String, KnnId)>,
) -> Result<(), StoreError> {
    let mut seen_l = BTreeSet::new();
    for (line_no, name, apex) in rows {
        let apex_node = store.node(apex).ok_or_else(|| {
            StoreError::InvariantViolation(format!("domain `{name}` has dangling apex {apex}"))
        })?;
        if !apex_node.coord.is_apex() {
            return Err(StoreError::InvariantViolation(format!(
                "domain `{name}` apex {apex} is not at (l,0,0)"
            )));
        }
        if !seen_l.insert(apex_node.coord.l) {
            return Err(StoreError::InvariantViolation(format!(
                "two domains share domain index {}",
                apex_node.coord.l
            )));
        }
        if store.domains.insert(name.clone(), apex).is_some() {
            return Err(StoreError::CorruptRecord {
                line: line_no,
                reason: format!("duplicate domain name `{name}`"),
            });
        }
    }
    for node in &store.nodes {
        if !seen_l.contains(&node.coord.l) {
            return Err(StoreError::InvariantViolation(format!(
                "node {} belongs to domain index {} which no domain declares",
                node.id, node.coord.l
            )));
        }
    }
    Ok(())
}
