//! Informledge: a knowledge network of autonomous nodes and multi-strand
//! links.
//!
//! Assertion statements are embedded into Knowledge Network Nodes (KNNs)
//! addressed by `(l, m, n)` coordinates and joined by links whose strands
//! carry one property each: direction, inclusivity, additivity, and
//! integrativity. Retrieval follows those strands to pull knowledge back
//! out as threads and cones.
//!
//! - **model**: domain types and the strand-composition rule
//! - **parser**: the assertion DSL and the relation table
//! - **embed**: statement embedding and scenario metrics
//! - **retrieve**: thread expansion, cones, and thread queries
//! - **lifecycle**: link usage tracking, fading, and recreation
//! - **store**: node/link tables, ILSSNAP snapshots, system stats
//!
//! # Example
//!
//! ```
//! use informledge::embed::embed_statement;
//! use informledge::parser::{parse_statement, RelationTable};
//! use informledge::retrieve::{find_thread, DEFAULT_MAX_DEPTH};
//! use informledge::store::Store;
//!
//! let mut store = Store::new();
//! let table = RelationTable::default();
//! for line in ["Africa CONTAINS lion", "lion HAS_PROPERTY strong"] {
//!     let stmt = parse_statement(line, "geo").unwrap();
//!     embed_statement(&mut store, &stmt, &table).unwrap();
//! }
//! let thread = find_thread(&mut store, "Africa", "strong", None, DEFAULT_MAX_DEPTH)
//!     .unwrap()
//!     .unwrap();
//! assert_eq!(thread.render(&store), "Africa -> lion -> strong");
//! ```

pub mod embed;
pub mod lifecycle;
pub mod model;
pub mod parser;
pub mod retrieve;
pub mod store;

pub use embed::{EmbedError, EmbedReport, ScenarioStats};
pub use lifecycle::{FadePolicy, FadeReport, LifecycleError};
pub use model::{
    Additivity, Coordinate, Inclusivity, Integrativity, Knn, KnnId, Link, LinkDescriptor, LinkId,
    LinkState, ModelError, Strand, StrandAxis,
};
pub use parser::{CorpusStatement, ParseError, RelationTable, Statement};
pub use retrieve::{Cone, ConeMetrics, RetrieveError, Thread, DEFAULT_MAX_DEPTH};
pub use store::{Store, StoreError, SystemStats};
