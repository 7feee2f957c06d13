//! Long cycles in percolated vertex expanders.
//!
//! This crate holds the allocation-only core of the laboratory: the static
//! graph and forest types, seeded generators, the `(=k,d)` expansion
//! certifier, the two-layer percolation oracle, the modified depth-first
//! search with its block/safe/trash bookkeeping, and the closed-form bounds
//! and diagnostics used to read its output.
//!
//! Everything here is deterministic in its seed. IO, file formats, threading
//! and the command line live in the `percolade` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod certify;
pub mod config;
pub mod dfs;
pub mod diagnostics;
mod error;
pub mod generators;
pub mod graph;
pub mod percolation;
pub mod rng;
pub mod trial;

pub use config::ExperimentConfig;
pub use dfs::{run_dfs, DfsRun};
pub use error::{Error, Result};
pub use graph::{Forest, Graph, Vertex};
pub use percolation::{EdgeOracle, SprinklingSplit};
pub use trial::{run_trial, TrialResult};
