//! Cumulativeness of technological knowledge: citation graphs, path-length
//! indicators, a stochastic growth model and the statistics that connect them.

pub mod analytic;
pub mod error;
pub mod fit;
pub mod graph;
pub mod growth;
pub mod ingest;
pub mod numeric;
pub mod paths;

pub use error::{Error, Result};
pub use graph::{
    BacklinkDistribution, Checkpoint, ChiSquare, CumulativenessSeries, DistributionFit, Family,
    GraphParts, InventionNode, KnowledgeGraph, LinearFit, ModelParams, PathCounts,
    PathLengthDistribution, RatePredictions, Violation,
};
pub use paths::CountMode;
