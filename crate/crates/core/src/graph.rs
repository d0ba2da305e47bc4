//! Domain types shared across the crate: invention nodes, the knowledge graph,
//! model parameters and the result records produced by the measurement and
//! fitting code.
//!
//! A [`KnowledgeGraph`] is chronologically ordered. Node `i` has ordinal `i`,
//! and every internal edge points from a later (citing) node to an earlier
//! (cited) one, so the node order is already a topological order.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One invention (a patent family in the empirical setting).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventionNode {
    pub node_id: String,
    pub ordinal: usize,
    pub year: Option<i32>,
    pub class_labels: BTreeSet<String>,
}

impl InventionNode {
    pub fn new(node_id: impl Into<String>, ordinal: usize) -> Self {
        Self {
            node_id: node_id.into(),
            ordinal,
            year: None,
            class_labels: BTreeSet::new(),
        }
    }

    pub fn with_year(mut self, year: i32) -> Self {
        self.year = Some(year);
        self
    }
}

/// Unvalidated graph contents. [`validate_graph`] inspects these, and
/// [`KnowledgeGraph::from_parts`] accepts them only when no violation exists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphParts {
    pub nodes: Vec<InventionNode>,
    /// `(citing ordinal, cited ordinal)` pairs.
    pub internal_edges: Vec<(usize, usize)>,
    /// Number of backward links leaving the technology, one entry per node.
    pub external_backlink_counts: Vec<u64>,
}

impl GraphParts {
    /// Nodes `0..n` with generated ids, no years and no external links.
    pub fn unlabeled(n: usize, internal_edges: Vec<(usize, usize)>) -> Self {
        Self {
            nodes: (0..n).map(|i| InventionNode::new(format!("{i}"), i)).collect(),
            internal_edges,
            external_backlink_counts: vec![0; n],
        }
    }
}

/// A broken [`KnowledgeGraph`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OrdinalMismatch { position: usize, ordinal: usize },
    DuplicateNodeId { id: String, ordinals: (usize, usize) },
    YearOrder { earlier: usize, later: usize },
    EdgeOutOfRange { citing: usize, cited: usize },
    SelfLoop { ordinal: usize },
    ForwardEdge { citing: usize, cited: usize },
    DuplicateEdge { citing: usize, cited: usize },
    ExternalCountLength { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrdinalMismatch { position, ordinal } => {
                write!(f, "ordinal mismatch: node at position {position} has ordinal {ordinal}")
            }
            Violation::DuplicateNodeId { id, ordinals } => write!(
                f,
                "duplicate node id {id:?} at ordinals {} and {}",
                ordinals.0, ordinals.1
            ),
            Violation::YearOrder { earlier, later } => write!(
                f,
                "year order: node {later} has an earlier year than node {earlier}"
            ),
            Violation::EdgeOutOfRange { citing, cited } => {
                write!(f, "edge out of range: ({citing}, {cited})")
            }
            Violation::SelfLoop { ordinal } => write!(f, "self loop on node {ordinal}"),
            Violation::ForwardEdge { citing, cited } => {
                write!(f, "forward edge: {citing} cites later node {cited}")
            }
            Violation::DuplicateEdge { citing, cited } => {
                write!(f, "duplicate edge: ({citing}, {cited})")
            }
            Violation::ExternalCountLength { expected, found } => write!(
                f,
                "external backlink counts: expected {expected} entries, found {found}"
            ),
        }
    }
}

/// Lists every violated graph invariant. An empty result means the parts form
/// a valid [`KnowledgeGraph`].
pub fn validate_graph(parts: &GraphParts) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = parts.nodes.len();

    let mut seen_ids = std::collections::HashMap::new();
    for (pos, node) in parts.nodes.iter().enumerate() {
        if node.ordinal != pos {
            out.push(Violation::OrdinalMismatch { position: pos, ordinal: node.ordinal });
        }
        if let Some(&first) = seen_ids.get(node.node_id.as_str()) {
            out.push(Violation::DuplicateNodeId {
                id: node.node_id.clone(),
                ordinals: (first, pos),
            });
        } else {
            seen_ids.insert(node.node_id.as_str(), pos);
        }
    }

    // Year order is checked between consecutive nodes that carry a year.
    let mut last_dated: Option<(usize, i32)> = None;
    for (pos, node) in parts.nodes.iter().enumerate() {
        if let Some(year) = node.year {
            if let Some((prev, prev_year)) = last_dated {
                if year < prev_year {
                    out.push(Violation::YearOrder { earlier: prev, later: pos });
                }
            }
            last_dated = Some((pos, year));
        }
    }

    let mut seen_edges = HashSet::new();
    let mut reported_dups = HashSet::new();
    for &(citing, cited) in &parts.internal_edges {
        if citing >= n || cited >= n {
            out.push(Violation::EdgeOutOfRange { citing, cited });
            continue;
        }
        if citing == cited {
            out.push(Violation::SelfLoop { ordinal: citing });
        } else if citing < cited {
            out.push(Violation::ForwardEdge { citing, cited });
        }
        if !seen_edges.insert((citing, cited)) && reported_dups.insert((citing, cited)) {
            out.push(Violation::DuplicateEdge { citing, cited });
        }
    }

    if parts.external_backlink_counts.len() != n {
        out.push(Violation::ExternalCountLength {
            expected: n,
            found: parts.external_backlink_counts.len(),
        });
    }
    out
}

/// Chronologically ordered citation DAG restricted to one technology.
///
/// Immutable once built. Backward adjacency is kept in compressed form:
/// the cited ordinals of node `i` are `cited[offsets[i]..offsets[i + 1]]`,
/// sorted ascending.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    parts: GraphParts,
    offsets: Vec<usize>,
    cited: Vec<usize>,
}

impl KnowledgeGraph {
    pub fn from_parts(parts: GraphParts) -> Result<Self> {
        let violations = validate_graph(&parts);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }
        let n = parts.nodes.len();
        let mut degree = vec![0usize; n];
        for &(citing, _) in &parts.internal_edges {
            degree[citing] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut cited = vec![0usize; parts.internal_edges.len()];
        for &(citing, target) in &parts.internal_edges {
            cited[fill[citing]] = target;
            fill[citing] += 1;
        }
        for i in 0..n {
            cited[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Ok(Self { parts, offsets, cited })
    }

    pub fn parts(&self) -> &GraphParts {
        &self.parts
    }

    pub fn into_parts(self) -> GraphParts {
        self.parts
    }

    pub fn node_count(&self) -> usize {
        self.parts.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[InventionNode] {
        &self.parts.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.cited.len()
    }

    /// Ordinals cited by `node`, ascending.
    pub fn cited_by(&self, node: usize) -> &[usize] {
        &self.cited[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Number of internal backward links of `node`.
    pub fn backlinks(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Internal edges whose citing node lies in the first `n` nodes. Since
    /// edges point backward, both endpoints then lie in the prefix.
    pub fn edges_in_prefix(&self, n: usize) -> usize {
        self.offsets[n]
    }

    pub fn external_backlinks(&self, node: usize) -> u64 {
        self.parts.external_backlink_counts[node]
    }

    /// Internal backlink counts `m_1..m_N` in ordinal order.
    pub fn backlink_sequence(&self) -> Vec<u64> {
        (0..self.node_count()).map(|i| self.backlinks(i) as u64).collect()
    }
}

/// Parameters of the search-process growth model.
///
/// The completion probability for a technology holding `n` inventions is
/// `1 / (q n + m1)`. `r` is the fraction of initial inventions assumed by the
/// analytic path-count solution and defaults to `1 / m1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    q: f64,
    m1: f64,
    r: f64,
}

impl ModelParams {
    pub fn new(q: f64, m1: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidParams(format!("q must be > 0, got {q}")));
        }
        if !(m1.is_finite() && m1 > 1.0) {
            return Err(Error::InvalidParams(format!("m1 must be > 1, got {m1}")));
        }
        Ok(Self { q, m1, r: 1.0 / m1 })
    }

    /// Parameters from the fitted form `q n + m0`.
    pub fn from_q_m0(q: f64, m0: f64) -> Result<Self> {
        Self::new(q, m0 + 1.0)
    }

    pub fn with_r(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidParams(format!("r must lie in (0, 1], got {r}")));
        }
        self.r = r;
        Ok(self)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m0(&self) -> f64 {
        self.m1 - 1.0
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Histogram of internal backward links per node over a prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacklinkDistribution {
    pub n: usize,
    /// `counts[m]` nodes carry exactly `m` internal backward links.
    pub counts: Vec<u64>,
    pub mean: f64,
}

impl BacklinkDistribution {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let n: u64 = counts.iter().sum();
        let weighted: u64 = counts.iter().enumerate().map(|(m, c)| m as u64 * c).sum();
        let mean = if n == 0 { 0.0 } else { weighted as f64 / n as f64 };
        Self { n: n as usize, counts, mean }
    }
}

/// Path counts per length, either exact or as natural logarithms.
#[derive(Debug, Clone, PartialEq)]
pub enum PathCounts {
    Exact(Vec<BigUint>),
    /// `ln f_k`; `-inf` encodes a zero count.
    Log(Vec<f64>),
}

impl PathCounts {
    pub fn len(&self) -> usize {
        match self {
            PathCounts::Exact(v) => v.len(),
            PathCounts::Log(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `f_k` as a float. Saturates to infinity for exact counts beyond `f64`.
    pub fn get_f64(&self, k: usize) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            PathCounts::Exact(v) => v.get(k).map_or(0.0, |c| c.to_f64().unwrap_or(f64::INFINITY)),
            PathCounts::Log(v) => v.get(k).map_or(0.0, |l| l.exp()),
        }
    }

    pub fn ln(&self, k: usize) -> f64 {
        match self {
            PathCounts::Exact(v) => v.get(k).map_or(f64::NEG_INFINITY, crate::numeric::ln_biguint),
            PathCounts::Log(v) => v.get(k).copied().unwrap_or(f64::NEG_INFINITY),
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.get_f64(k)).collect()
    }

    pub fn exact(&self) -> Option<&[BigUint]> {
        match self {
            PathCounts::Exact(v) => Some(v),
            PathCounts::Log(_) => None,
        }
    }

    /// Natural log of the total path count.
    pub fn ln_total(&self) -> f64 {
        match self {
            PathCounts::Exact(v) => crate::numeric::ln_biguint(&v.iter().sum()),
            PathCounts::Log(v) => crate::numeric::log_sum_exp(v),
        }
    }

    /// Decimal rendering of `f_k`: exact digits for integer counts, a float
    /// otherwise.
    pub fn display(&self, k: usize) -> String {
        match self {
            PathCounts::Exact(v) => v[k].to_string(),
            PathCounts::Log(v) => format!("{:e}", v[k].exp()),
        }
    }
}

/// Path-length distribution of one prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLengthDistribution {
    pub n: usize,
    /// `counts[k] = f_k`, the number of paths of length `k`.
    pub counts: PathCounts,
    /// `normalized[k] = f_k / sum f`. Empty when no path exists.
    pub normalized: Vec<f64>,
    /// Mean path length.
    pub ipl: f64,
    /// Longest path length with a nonzero count.
    pub mipl: usize,
}

impl PathLengthDistribution {
    pub fn from_counts(n: usize, counts: PathCounts) -> Self {
        let normalized = crate::numeric::normalize_counts(&counts);
        let ipl = normalized.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let mipl = match &counts {
            PathCounts::Exact(v) => v.iter().rposition(|c| c.bits() > 0),
            PathCounts::Log(v) => v.iter().rposition(|l| *l > f64::NEG_INFINITY),
        }
        .unwrap_or(0);
        Self { n, counts, normalized, ipl, mipl }
    }

    pub fn has_paths(&self) -> bool {
        !self.normalized.is_empty()
    }
}

/// One measurement point of a [`CumulativenessSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    /// Internal dependence.
    pub id: f64,
    /// Internal path length (mean).
    pub ipl: f64,
    /// Maximum internal path length.
    pub mipl: usize,
    /// External dependence.
    pub ed: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CumulativenessSeries {
    pub checkpoints: Vec<Checkpoint>,
}

impl CumulativenessSeries {
    pub fn new(checkpoints: Vec<Checkpoint>) -> Result<Self> {
        for w in checkpoints.windows(2) {
            if w[1].n <= w[0].n {
                return Err(Error::InvalidInput(format!(
                    "checkpoint sizes must increase strictly ({} then {})",
                    w[0].n, w[1].n
                )));
            }
        }
        if let Some(c) = checkpoints.iter().find(|c| !(c.id >= 0.0 && c.ipl >= 0.0 && c.ed >= 0.0)) {
            return Err(Error::InvalidInput(format!("negative or undefined entry at n={}", c.n)));
        }
        Ok(Self { checkpoints })
    }

    pub fn len(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }

    pub fn last(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }
}

/// Predicted ipl growth rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePredictions {
    /// `q / (q + 1)`.
    pub p: f64,
    pub q_prime_a: f64,
    pub p_prime_a: f64,
    pub q_prime_b: f64,
    pub p_prime_b: f64,
    /// Maximum speed of the longest path, `2 p`.
    pub v: f64,
    pub delta_n: f64,
}

/// Ordinary least squares result for `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub r_squared: f64,
    /// Residual standard error with `n_obs - 2` degrees of freedom.
    pub residual_se: f64,
    pub f_statistic: f64,
    pub n_obs: usize,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Geometric,
    /// The path-length law `C(n', k+1) / (2^n' - 1)`.
    BinomialType,
    Binomial,
    Normal,
    Poisson,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Geometric => "geometric",
            Family::BinomialType => "binomial-type",
            Family::Binomial => "binomial",
            Family::Normal => "normal",
            Family::Poisson => "poisson",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Goodness of fit of an empirical distribution against one model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFit {
    pub family: Family,
    /// Family parameters: geometric `[rho]`, binomial-type `[n']`,
    /// binomial `[trials, p]`, normal `[mean, sd]`, poisson `[eta]`.
    pub params: Vec<f64>,
    /// `(empirical probability, model probability)` per support value.
    pub plot_points: Vec<(f64, f64)>,
    pub plot_correlation: f64,
    pub chi_square: ChiSquare,
    pub warning: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(n: usize, edges: &[(usize, usize)]) -> GraphParts {
        GraphParts::unlabeled(n, edges.to_vec())
    }

    #[test]
    fn ordered_edges_are_valid() {
        assert!(validate_graph(&parts(3, &[(2, 0), (2, 1)])).is_empty());
    }

    #[test]
    fn forward_edge_is_reported() {
        let v = validate_graph(&parts(3, &[(0, 2)]));
        assert_eq!(v, vec![Violation::ForwardEdge { citing: 0, cited: 2 }]);
        assert!(v[0].to_string().starts_with("forward edge"));
    }

    #[test]
    fn duplicate_edge_reported_once() {
        let v = validate_graph(&parts(3, &[(2, 0), (2, 0)]));
        assert_eq!(v, vec![Violation::DuplicateEdge { citing: 2, cited: 0 }]);
        assert!(v[0].to_string().starts_with("duplicate edge"));
        let v = validate_graph(&parts(3, &[(2, 0), (2, 0), (2, 0)]));
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn other_violations() {
        let mut p = parts(3, &[(1, 1), (5, 0)]);
        p.nodes[2].ordinal = 7;
        p.nodes[1].node_id = "0".into();
        p.external_backlink_counts.pop();
        let v = validate_graph(&p);
        assert!(v.contains(&Violation::SelfLoop { ordinal: 1 }));
        assert!(v.contains(&Violation::EdgeOutOfRange { citing: 5, cited: 0 }));
        assert!(v.contains(&Violation::OrdinalMismatch { position: 2, ordinal: 7 }));
        assert!(v.contains(&Violation::DuplicateNodeId { id: "0".into(), ordinals: (0, 1) }));
        assert!(v.contains(&Violation::ExternalCountLength { expected: 3, found: 2 }));
    }

    #[test]
    fn year_order_checked_over_dated_nodes() {
        let mut p = parts(3, &[]);
        p.nodes[0].year = Some(2001);
        p.nodes[2].year = Some(2000);
        assert_eq!(validate_graph(&p), vec![Violation::YearOrder { earlier: 0, later: 2 }]);
    }

    #[test]
    fn from_parts_rejects_invalid() {
        assert!(matches!(
            KnowledgeGraph::from_parts(parts(2, &[(0, 1)])),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn adjacency_is_sorted_per_node() {
        let g = KnowledgeGraph::from_parts(parts(4, &[(3, 2), (3, 0), (2, 1)])).unwrap();
        assert_eq!(g.cited_by(3), &[0, 2]);
        assert_eq!(g.cited_by(0), &[] as &[usize]);
        assert_eq!(g.edges_in_prefix(3), 1);
        assert_eq!(g.backlink_sequence(), vec![0, 0, 1, 2]);
    }

    #[test]
    fn model_params_round_trip() {
        let p = ModelParams::new(0.002, 3.0).unwrap();
        assert_eq!(p.m0(), 2.0);
        let back = ModelParams::from_q_m0(p.q(), p.m0()).unwrap();
        assert_eq!(back, p);
        assert_eq!(p.r(), 1.0 / 3.0);
        assert!(ModelParams::new(0.0, 2.0).is_err());
        assert!(ModelParams::new(0.1, 1.0).is_err());
        assert!(p.with_r(0.0).is_err());
        assert_eq!(p.with_r(1.0).unwrap().r(), 1.0);
    }

    #[test]
    fn backlink_distribution_mean() {
        let d = BacklinkDistribution::from_counts(vec![2, 1, 1]);
        assert_eq!(d.n, 4);
        assert_eq!(d.mean, 0.75);
    }

    #[test]
    fn series_requires_increasing_n() {
        let c = |n| Checkpoint { n, id: 0.0, ipl: 0.0, mipl: 0, ed: 0.0 };
        assert!(CumulativenessSeries::new(vec![c(1), c(2)]).is_ok());
        assert!(CumulativenessSeries::new(vec![c(2), c(2)]).is_err());
    }
}
