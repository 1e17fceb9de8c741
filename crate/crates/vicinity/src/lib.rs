//! Landmark-based approximate distance oracles for sparse graphs.
//!
//! The crate provides an immutable weighted undirected graph type with exact
//! and truncated shortest-path search, deterministic graph generators, a
//! degree reduction that turns average-degree bounds into maximum-degree
//! bounds, a family of landmark oracles (stretch 2, stretch 4k-1 with an
//! embedded Thorup-Zwick sub-oracle, and additive-stretch variants), and a
//! static simulator of the compact routing scheme derived from the stretch-2
//! oracle.
//!
//! Everything is `no_std` + `alloc`: the core is pure computation over
//! owned buffers. File formats, serialization and the CLI live in the
//! companion `vicinity-cli` crate.
//!
//! All randomized construction is driven by [`rng::SplitMix64`], a portable
//! counter-based generator with a documented output sequence, so builds are
//! bit-reproducible per seed.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod additive;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod generators;
pub mod graph;
pub mod landmark;
pub mod mult;
pub mod query;
pub mod reduction;
pub mod rng;
pub mod routing;
pub mod stretch2;
pub mod tz;

pub use graph::{dijkstra, exact_oracle, truncated_dijkstra, AllPairs, DistanceTable, Graph, NodeId};
pub use landmark::{sample_landmarks, LandmarkMode, LandmarkSet};
pub use query::{Branch, QueryResult};
