//! IO, file formats, serialization and the evaluation harness for the
//! `vicinity` oracles. Everything here needs `std`; the algorithms live in
//! the core crate.

pub mod container;
pub mod edgelist;
pub mod eval;
pub mod report;
pub mod scenario;
