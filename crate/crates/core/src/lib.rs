//! Trails, d-separation and the structure of minimal activated trails in
//! directed acyclic graphs.
//!
//! Nodes are dense indices ([`NodeId`]); labels are optional and only used
//! for rendering and I/O.

pub mod dag;
pub mod decompose;
pub mod dsep;
pub mod error;
pub mod io;
pub mod nodeset;
pub mod order;
pub mod search;
pub mod structure;
pub mod trail;
pub mod verify;

pub use dag::{BuildError, Dag};
pub use decompose::{closest_descendant, decompose, ActivationWitness, DescendantPath, TrailDecomposition};
pub use dsep::{d_separated, d_separated_by_trails, trails_xyz};
pub use error::QueryError;
pub use nodeset::{NodeId, NodeSet};
pub use order::{compare, minimal_trails, trail_key, MinimalTrails, OrderResult, TrailKey};
pub use search::{enumerate_trails, shortest_constrained_trail, TrailConstraints, Trails};
pub use structure::{
    connected_or_dsep, decompose_local, find_active_cycles, has_active_cycle,
    has_local_relationships, local_after_removal, ActiveCycle, LocalVerdict, LocalWitness,
    Partition,
};
pub use trail::{chords, common_ancestor, is_activated, ConnectionKind, Direction, Trail};
