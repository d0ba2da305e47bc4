use thiserror::Error;

use crate::graph::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {}", join_violations(.0))]
    InvalidGraph(Vec<Violation>),
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("prefix size {n} out of range 1..={max}")]
    PrefixOutOfRange { n: usize, max: usize },
    #[error("graph is empty")]
    EmptyGraph,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate design: regressor is constant")]
    DegenerateDesign,
    #[error("{0}")]
    Ingest(#[from] crate::ingest::IngestError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
