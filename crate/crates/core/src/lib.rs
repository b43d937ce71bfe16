//! Pose graph initialization for structure-from-motion.
//!
//! Candidate image pairs are ranked by a message-passing predictor over image
//! embeddings ([`gnn`]), then selected as a union of edge-disjoint maximum-score
//! spanning trees whose scores are modulated by hop distance in the graph built
//! so far ([`selection`]). [`oracle`] derives ground-truth ranks from synthetic
//! scene geometry, [`clustering`] splits large collections into overlapping
//! subgraphs, and [`metrics`] scores rankings, graphs and camera poses.

pub mod clustering;
pub mod commands;
pub mod error;
pub mod gnn;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod selection;
pub mod synthetic;

pub use error::{Error, Result};
