//! Node spreading power on undirected networks.
//!
//! The crate computes the expected force (ExF) of network nodes alongside
//! k-shell and eigenvector centrality, simulates discrete-time SI/SIS/SIR
//! processes, and correlates the metrics with simulated outcomes.
//!
//! ```
//! use exforce::graph::Graph;
//! use exforce::metrics::expected_force;
//!
//! let k4 = Graph::from_unlabeled(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
//! let exf = expected_force(&k4, 0).unwrap();
//! assert!((exf - 12f64.ln()).abs() < 1e-12);
//! ```

pub mod correlation;
pub mod epidemic;
pub mod experiment;
#[cfg(feature = "fetch")]
pub mod fetch;
pub mod figure;
pub mod format;
pub mod generate;
pub mod graph;
pub mod metrics;
pub mod stats;

pub use graph::{Graph, GraphError, NodeId};
