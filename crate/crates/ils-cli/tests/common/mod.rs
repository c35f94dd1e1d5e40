//! Shared test support: seeded random stores, a brute-force thread oracle,
//! and an independent simulator for embedding counts.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use informledge::embed::{build_link, resolve_or_create_node};
use informledge::lifecycle::{fade_tick, touch_link, FadePolicy};
use informledge::model::{Additivity, Inclusivity, KnnId, LinkId, LinkState};
use informledge::parser::{load_relation_table, CorpusStatement, RelationTable};
use informledge::store::Store;

/// Relation table mixing every inclusivity/additivity combination.
pub fn mixed_relation_table() -> RelationTable {
    load_relation_table(
        "R_IA\tinclusive\tadditive\n\
         R_IS\tinclusive\tsubtractive\n\
         R_EA\texclusive\tadditive\n\
         R_ES\texclusive\tsubtractive\n",
    )
    .expect("mixed table parses")
}

/// Builds a random store through the public embedding and lifecycle API,
/// so every store invariant holds by construction. At most 12 nodes
/// (apexes included) and 20 links, with mixed strand values, random usage
/// counters, and a faded subset.
pub fn random_store(seed: u64) -> Store {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = Store::new();
    let table = mixed_relation_table();
    let relations = ["R_IA", "R_IS", "R_EA", "R_ES"];

    let domain_count = rng.random_range(1..=3usize);
    let domains: Vec<String> = (0..domain_count).map(|i| format!("d{i}")).collect();
    let unit_count = rng.random_range(1..=12 - domain_count);
    let mut ids = Vec::new();
    for i in 0..unit_count {
        let domain = &domains[rng.random_range(0..domains.len())];
        let parent = if ids.is_empty() || rng.random_bool(0.3) {
            None
        } else {
            Some(ids[rng.random_range(0..ids.len())])
        };
        let (id, _) = resolve_or_create_node(&mut store, &format!("n{i}"), domain, parent);
        ids.push(id);
    }

    // Bias sources toward the previous destination so chains form, and
    // bias relations toward inclusive-additive so threads run deep.
    let link_attempts = rng.random_range(4..=16usize);
    let mut previous_dst = None;
    for _ in 0..link_attempts {
        let src = match previous_dst {
            Some(dst) if rng.random_bool(0.6) => dst,
            _ => ids[rng.random_range(0..ids.len())],
        };
        let dst = ids[rng.random_range(0..ids.len())];
        if src == dst {
            continue;
        }
        let relation = if rng.random_bool(0.55) {
            "R_IA"
        } else {
            relations[rng.random_range(0..relations.len())]
        };
        let _ = build_link(&mut store, src, dst, relation, &table);
        previous_dst = Some(dst);
    }

    // Touch a subset, then fade what stayed cold.
    let now = store.advance_tick();
    let link_ids: Vec<LinkId> = store.links().map(|link| link.id).collect();
    for id in &link_ids {
        if rng.random_bool(0.5) {
            for _ in 0..rng.random_range(1..=3) {
                touch_link(&mut store, *id, now).expect("active link");
            }
        }
    }
    if rng.random_bool(0.6) {
        fade_tick(&mut store, FadePolicy::new(1, 1).unwrap(), now);
    }

    // Fresh links created after the fade pass stay active with zero usage,
    // leaving fade candidates for lifecycle tests.
    for _ in 0..rng.random_range(0..=4usize) {
        let src = ids[rng.random_range(0..ids.len())];
        let dst = ids[rng.random_range(0..ids.len())];
        if src == dst {
            continue;
        }
        let relation = relations[rng.random_range(0..relations.len())];
        let _ = build_link(&mut store, src, dst, relation, &table);
    }
    store
}

/// A thread as bare id sequences, for set comparison.
pub type ThreadKey = (Vec<KnnId>, Vec<LinkId>);

/// Exhaustively enumerates every maximal thread from `start` straight from
/// the link table: follow active inclusive links, never revisit a node,
/// stop one hop after a subtractive link or at the depth cap. A path is
/// recorded exactly when it cannot be extended.
pub fn oracle_threads(store: &Store, start: KnnId, max_depth: usize) -> BTreeSet<ThreadKey> {
    struct Edge {
        id: LinkId,
        src: KnnId,
        dst: KnnId,
        subtractive: bool,
    }
    let edges: Vec<Edge> = store
        .links()
        .filter(|link| {
            link.state == LinkState::Active
                && link.descriptor.inclusivity == Inclusivity::Inclusive
        })
        .map(|link| Edge {
            id: link.id,
            src: link.descriptor.source,
            dst: link.descriptor.destination,
            subtractive: link.descriptor.additivity == Additivity::Subtractive,
        })
        .collect();

    let mut results = BTreeSet::new();
    let mut worklist: Vec<ThreadKey> = vec![(vec![start], Vec::new())];
    while let Some((nodes, links)) = worklist.pop() {
        let stopped = links
            .last()
            .map(|id| edges.iter().find(|edge| edge.id == *id).unwrap().subtractive)
            .unwrap_or(false)
            || links.len() == max_depth;
        let last = *nodes.last().unwrap();
        let extensions: Vec<&Edge> = if stopped {
            Vec::new()
        } else {
            edges
                .iter()
                .filter(|edge| edge.src == last && !nodes.contains(&edge.dst))
                .collect()
        };
        if extensions.is_empty() {
            results.insert((nodes, links));
            continue;
        }
        for edge in extensions {
            let mut next_nodes = nodes.clone();
            next_nodes.push(edge.dst);
            let mut next_links = links.clone();
            next_links.push(edge.id);
            worklist.push((next_nodes, next_links));
        }
    }
    results
}

/// Replays embedding over plain label sets, independent of the store:
/// distinct units per statement, node creations against a `(domain,
/// label)` set, and link probes against a `(domain, src, dst, relation)`
/// set. One probe inspection or creation each counts one traversal.
pub fn simulate_reports(corpus: &[CorpusStatement]) -> Vec<(u64, u64, u64, u64)> {
    let mut nodes: HashSet<(String, String)> = HashSet::new();
    let mut links: HashSet<(String, String, String, String)> = HashSet::new();
    let mut reports = Vec::new();
    for entry in corpus {
        let stmt = &entry.statement;
        let distinct: HashSet<&String> = stmt.units.iter().collect();
        let mut nodes_added = 0;
        for unit in &distinct {
            if nodes.insert((stmt.domain.clone(), (*unit).clone())) {
                nodes_added += 1;
            }
        }
        let mut traversed = 0;
        let mut added = 0;
        for (pair, relation) in stmt.units.windows(2).zip(&stmt.relations) {
            let key = (
                stmt.domain.clone(),
                pair[0].clone(),
                pair[1].clone(),
                relation.clone(),
            );
            traversed += 1;
            if links.insert(key) {
                added += 1;
            }
        }
        reports.push((distinct.len() as u64, nodes_added, traversed, added));
    }
    reports
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .expect("golden file exists")
}

/// Runs the `ils` binary with the given arguments.
pub fn ils(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ils"))
        .args(args)
        .env_remove("ILS_RELATIONS")
        .output()
        .expect("ils binary runs")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}
