//! File formats, the parallel trial harness and the command line for
//! `percolade-core`.

pub mod cli;
pub mod edgelist;
pub mod harness;
pub mod plot;
pub mod records;

pub use edgelist::{load_graph, read_edge_list, save_graph, write_edge_list, FormatError};
pub use harness::{resolve_threads, run_experiment, run_sweep, Experiment, Grid, HarnessOptions, SweepRow};
