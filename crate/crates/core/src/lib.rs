//! Estimation of s-t connection reliability in DAGs with independent edge
//! failures: exact brute-force oracles for small instances, a sampling-based
//! approximation scheme for larger ones, and the reductions that connect
//! reliability counting to independent-set counting and automata.

pub mod bitset;
pub mod config;
pub mod estimator;
pub mod exact;
pub mod fpras;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod io;
pub mod reductions;
pub mod rng;
pub mod sampler;
pub mod store;
pub mod subgraph;
pub mod subset;
pub mod testutil;
pub mod validate;

pub use bitset::BitSet;
pub use config::{Config, Preset};
pub use fpras::{run, RunReport};
pub use graph::Dag;
pub use instance::{preprocess, Instance, Preprocessed, RawInstance};
pub use subgraph::Subgraph;
