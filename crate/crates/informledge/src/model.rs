//! Core domain types: nodes, coordinates, link strands, and descriptors.
//!
//! Every node (KNN) lives at an `(l, m, n)` coordinate: `l` is the knowledge
//! domain, `m` the level inside that domain, `n` the index within the level.
//! Links between nodes are bundles of four strands, one per axis: a
//! directional strand carrying the endpoint pair plus three performance
//! strands (inclusivity, additivity, integrativity).

use std::fmt;

use thiserror::Error;

/// Position of a node in the knowledge network.
///
/// Axis `l` starts at 1 (a domain index), `m` and `n` start at 0. The apex
/// of domain `l` sits at `(l, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coordinate {
    /// Knowledge domain index (1-based).
    pub l: u32,
    /// Knowledge level within the domain (0 = apex).
    pub m: u32,
    /// Index within the level.
    pub n: u32,
}

impl Coordinate {
    pub fn new(l: u32, m: u32, n: u32) -> Self {
        Self { l, m, n }
    }

    /// Whether this is a domain apex position.
    pub fn is_apex(&self) -> bool {
        self.m == 0 && self.n == 0
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.l, self.m, self.n)
    }
}

/// Stable node identifier, assigned densely in creation order and never
/// reused within a store's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KnnId(pub u64);

impl KnnId {
    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for KnnId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Stable link identifier, dense in creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u64);

impl LinkId {
    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Knowledge Network Node: one concept stored in the network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Knn {
    pub id: KnnId,
    /// Non-empty concept label; unique per domain.
    pub label: String,
    pub coord: Coordinate,
    /// Times this node was visited during retrieval.
    pub usage: u64,
}

/// Whether a link may be followed by open-ended expansion or only by
/// explicit named-relation queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inclusivity {
    Inclusive,
    Exclusive,
}

/// Whether a thread keeps growing through a link or stops at its
/// destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Additivity {
    Additive,
    Subtractive,
}

/// Whether a link joins nodes from different domains (integrative) or from
/// the same domain (differentiative).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Integrativity {
    Integrative,
    Differentiative,
}

impl fmt::Display for Inclusivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inclusivity::Inclusive => "inclusive",
            Inclusivity::Exclusive => "exclusive",
        })
    }
}

impl fmt::Display for Additivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Additivity::Additive => "additive",
            Additivity::Subtractive => "subtractive",
        })
    }
}

impl fmt::Display for Integrativity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrativity::Integrative => "integrative",
            Integrativity::Differentiative => "differentiative",
        })
    }
}

/// The four strand axes of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrandAxis {
    Directional,
    Inclusivity,
    Additivity,
    Integrativity,
}

impl fmt::Display for StrandAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrandAxis::Directional => "directional",
            StrandAxis::Inclusivity => "inclusivity",
            StrandAxis::Additivity => "additivity",
            StrandAxis::Integrativity => "integrativity",
        })
    }
}

/// One property channel of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strand {
    Directional { source: KnnId, destination: KnnId },
    Inclusivity(Inclusivity),
    Additivity(Additivity),
    Integrativity(Integrativity),
}

impl Strand {
    pub fn axis(&self) -> StrandAxis {
        match self {
            Strand::Directional { .. } => StrandAxis::Directional,
            Strand::Inclusivity(_) => StrandAxis::Inclusivity,
            Strand::Additivity(_) => StrandAxis::Additivity,
            Strand::Integrativity(_) => StrandAxis::Integrativity,
        }
    }
}

/// A complete strand bundle in canonical axis order, plus the relation name
/// that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinkDescriptor {
    pub source: KnnId,
    pub destination: KnnId,
    pub inclusivity: Inclusivity,
    pub additivity: Additivity,
    pub integrativity: Integrativity,
    pub relation: String,
}

/// Lifecycle state of a link. Faded links are retained but invisible to
/// traversal until recreated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkState {
    Active,
    Faded,
}

impl fmt::Display for LinkState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkState::Active => "active",
            LinkState::Faded => "faded",
        })
    }
}

/// A stored link: descriptor plus usage-tracking state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub id: LinkId,
    pub descriptor: LinkDescriptor,
    /// Times this link was traversed during retrieval.
    pub usage: u64,
    /// Tick of the most recent traversal (or creation).
    pub last_used: u64,
    pub state: LinkState,
}

impl Link {
    pub fn is_active(&self) -> bool {
        self.state == LinkState::Active
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("missing {0} strand")]
    MissingAxis(StrandAxis),
    #[error("duplicate {0} strand")]
    DuplicateAxis(StrandAxis),
    #[error("link source and destination are the same node ({0})")]
    SelfLink(KnnId),
}

/// Composes a strand set into a canonical descriptor.
///
/// The result is independent of the order the strands are supplied in:
/// exactly one strand per axis is required, and the directional endpoints
/// must be distinct nodes.
pub fn compose_link(strands: &[Strand], relation: &str) -> Result<LinkDescriptor, ModelError> {
    let mut directional = None;
    let mut inclusivity = None;
    let mut additivity = None;
    let mut integrativity = None;

    for strand in strands {
        match *strand {
            Strand::Directional {
                source,
                destination,
            } => {
                if directional.replace((source, destination)).is_some() {
                    return Err(ModelError::DuplicateAxis(StrandAxis::Directional));
                }
            }
            Strand::Inclusivity(value) => {
                if inclusivity.replace(value).is_some() {
                    return Err(ModelError::DuplicateAxis(StrandAxis::Inclusivity));
                }
            }
            Strand::Additivity(value) => {
                if additivity.replace(value).is_some() {
                    return Err(ModelError::DuplicateAxis(StrandAxis::Additivity));
                }
            }
            Strand::Integrativity(value) => {
                if integrativity.replace(value).is_some() {
                    return Err(ModelError::DuplicateAxis(StrandAxis::Integrativity));
                }
            }
        }
    }

    let (source, destination) =
        directional.ok_or(ModelError::MissingAxis(StrandAxis::Directional))?;
    let inclusivity = inclusivity.ok_or(ModelError::MissingAxis(StrandAxis::Inclusivity))?;
    let additivity = additivity.ok_or(ModelError::MissingAxis(StrandAxis::Additivity))?;
    let integrativity =
        integrativity.ok_or(ModelError::MissingAxis(StrandAxis::Integrativity))?;

    if source == destination {
        return Err(ModelError::SelfLink(source));
    }

    Ok(LinkDescriptor {
        source,
        destination,
        inclusivity,
        additivity,
        integrativity,
        relation: relation.to_string(),
    })
}

/// Integrativity of a link between two coordinates: integrative when the
/// endpoints belong to different domains, differentiative otherwise.
pub fn integrativity_of(src: Coordinate, dst: Coordinate) -> Integrativity {
    if src.l != dst.l {
        Integrativity::Integrative
    } else {
        Integrativity::Differentiative
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn full_strand_set() -> Vec<Strand> {
        vec![
            Strand::Directional {
                source: KnnId(1),
                destination: KnnId(2),
            },
            Strand::Inclusivity(Inclusivity::Inclusive),
            Strand::Additivity(Additivity::Additive),
            Strand::Integrativity(Integrativity::Differentiative),
        ]
    }

    #[test]
    fn compose_assembles_canonical_descriptor() {
        let descriptor = compose_link(&full_strand_set(), "IS_A").unwrap();
        assert_eq!(descriptor.source, KnnId(1));
        assert_eq!(descriptor.destination, KnnId(2));
        assert_eq!(descriptor.inclusivity, Inclusivity::Inclusive);
        assert_eq!(descriptor.additivity, Additivity::Additive);
        assert_eq!(descriptor.integrativity, Integrativity::Differentiative);
        assert_eq!(descriptor.relation, "IS_A");
    }

    #[test]
    fn compose_is_order_independent() {
        let mut reversed = full_strand_set();
        reversed.reverse();
        assert_eq!(
            compose_link(&full_strand_set(), "IS_A").unwrap(),
            compose_link(&reversed, "IS_A").unwrap()
        );
    }

    #[test]
    fn compose_rejects_self_link() {
        let strands = vec![
            Strand::Directional {
                source: KnnId(3),
                destination: KnnId(3),
            },
            Strand::Inclusivity(Inclusivity::Inclusive),
            Strand::Additivity(Additivity::Additive),
            Strand::Integrativity(Integrativity::Differentiative),
        ];
        assert_eq!(
            compose_link(&strands, "IS_A"),
            Err(ModelError::SelfLink(KnnId(3)))
        );
    }

    #[test]
    fn compose_rejects_missing_axis() {
        let strands = &full_strand_set()[..3];
        assert_eq!(
            compose_link(strands, "IS_A"),
            Err(ModelError::MissingAxis(StrandAxis::Integrativity))
        );
    }

    #[test]
    fn compose_rejects_duplicate_axis() {
        let mut strands = full_strand_set();
        strands.push(Strand::Inclusivity(Inclusivity::Exclusive));
        assert_eq!(
            compose_link(&strands, "IS_A"),
            Err(ModelError::DuplicateAxis(StrandAxis::Inclusivity))
        );
    }

    #[test]
    fn integrativity_follows_domain_membership() {
        assert_eq!(
            integrativity_of(Coordinate::new(1, 2, 0), Coordinate::new(1, 3, 1)),
            Integrativity::Differentiative
        );
        assert_eq!(
            integrativity_of(Coordinate::new(1, 2, 0), Coordinate::new(4, 1, 0)),
            Integrativity::Integrative
        );
        assert_eq!(
            integrativity_of(Coordinate::new(7, 3, 5), Coordinate::new(7, 0, 0)),
            Integrativity::Differentiative
        );
    }

    proptest! {
        #[test]
        fn compose_ignores_strand_order(permutation in Just(full_strand_set()).prop_shuffle()) {
            let canonical = compose_link(&full_strand_set(), "CONTAINS").unwrap();
            prop_assert_eq!(compose_link(&permutation, "CONTAINS").unwrap(), canonical);
        }
    }
}
