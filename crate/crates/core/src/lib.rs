//! Causality-preserving temporal random walks over a sliding-window edge stream.
//!
//! The crate is organised around one immutable snapshot type, [`EdgeStore`],
//! which keeps every active edge once and exposes two offset views over it:
//! a global timestamp-grouped view (start-edge selection, eviction) and a
//! per-node timestamp-grouped view (hop-by-hop neighbourhood lookup).
//!
//! - [`window`] ingests batches, evicts expired edges and rebuilds snapshots.
//! - [`samplers`] holds the temporal bias pickers and their reference oracle.
//! - [`walk`] schedules and executes walks step by step.
//! - [`validity`] audits walks against an independent edge oracle.

pub mod edge_store;
pub mod io;
pub mod mem;
pub mod primitives;
pub mod rng;
pub mod samplers;
pub mod synth;
pub mod validity;
pub mod walk;
pub mod window;

/// Timestamps are unsigned integers in whatever unit the input uses.
pub type Timestamp = u64;

/// Dense node id assigned by [`EdgeStore`] at build time.
pub type NodeId = u32;

/// Slot value for "no timestamp" (the open start of a per-node walk).
pub const NO_TIME: Timestamp = Timestamp::MAX;

pub use edge_store::{DirectionMode, EdgeStore, EdgeStoreError, NeighborRange, TemporalEdge};
pub use samplers::{BiasKind, Node2VecParams};
pub use walk::{
    generate_walks, generate_walks_fullwalk, Direction, StartMode, TierThresholds, Variant, WalkConfig, WalkSet,
    WalkStats,
};
pub use window::{BatchStats, WindowConfig, WindowManager};
