//! Cumulativeness indicators on a [`KnowledgeGraph`] prefix.
//!
//! Paths start at an initial node (one without internal backward links) and
//! follow citations forward in time. The number of paths of length `k` ending
//! at node `i` obeys
//!
//! ```text
//! l[i][0] = 1                          if i is initial
//! l[i][k] = sum over c cited by i of l[c][k - 1]
//! ```
//!
//! and `f_k` is the sum of `l[i][k]` over the prefix. Because edges only point
//! backward, one sweep in ordinal order computes every vector, and the running
//! totals after node `n - 1` are exactly the distribution of the first `n`
//! nodes. Per-node vectors are kept for the whole sweep since any later node
//! may cite any earlier one.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{
    BacklinkDistribution, Checkpoint, CumulativenessSeries, KnowledgeGraph, PathCounts,
    PathLengthDistribution,
};
use crate::numeric::ln_add;

/// Node count above which [`CountMode::Auto`] switches to log-space counts.
pub const DEFAULT_LOG_THRESHOLD: usize = 50_000;

/// Arithmetic used for path counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Arbitrary-precision integers.
    Exact,
    /// Natural logarithms accumulated with log-sum-exp; each addition carries
    /// a relative error of a few ulps.
    Log,
    /// Exact up to `threshold` nodes, log-space beyond.
    Auto { threshold: usize },
}

impl Default for CountMode {
    fn default() -> Self {
        CountMode::Auto { threshold: DEFAULT_LOG_THRESHOLD }
    }
}

impl CountMode {
    fn uses_log(self, n: usize) -> bool {
        match self {
            CountMode::Exact => false,
            CountMode::Log => true,
            CountMode::Auto { threshold } => n > threshold,
        }
    }
}

fn check_prefix(g: &KnowledgeGraph, n: usize) -> Result<()> {
    if n == 0 || n > g.node_count() {
        return Err(Error::PrefixOutOfRange { n, max: g.node_count() });
    }
    Ok(())
}

/// Average number of internal backward links over the first `n` nodes.
pub fn internal_dependence(g: &KnowledgeGraph, n: usize) -> Result<f64> {
    check_prefix(g, n)?;
    Ok(g.edges_in_prefix(n) as f64 / n as f64)
}

/// Average number of backward links leaving the technology over the first
/// `n` nodes.
pub fn external_dependence(g: &KnowledgeGraph, n: usize) -> Result<f64> {
    check_prefix(g, n)?;
    let total: u64 = (0..n).map(|i| g.external_backlinks(i)).sum();
    Ok(total as f64 / n as f64)
}

/// Fraction of the first `n` nodes without internal backward links.
pub fn initial_fraction(g: &KnowledgeGraph, n: usize) -> Result<f64> {
    check_prefix(g, n)?;
    let initial = (0..n).filter(|&i| g.backlinks(i) == 0).count();
    Ok(initial as f64 / n as f64)
}

pub fn backlink_distribution(g: &KnowledgeGraph, n: usize) -> Result<BacklinkDistribution> {
    check_prefix(g, n)?;
    let mut counts = Vec::new();
    for i in 0..n {
        let m = g.backlinks(i);
        if counts.len() <= m {
            counts.resize(m + 1, 0);
        }
        counts[m] += 1;
    }
    Ok(BacklinkDistribution::from_counts(counts))
}

/// Path-length distribution of the first `n` nodes using the default
/// [`CountMode`].
pub fn path_length_distribution(g: &KnowledgeGraph, n: usize) -> Result<PathLengthDistribution> {
    path_length_distribution_with(g, n, CountMode::default())
}

pub fn path_length_distribution_with(
    g: &KnowledgeGraph,
    n: usize,
    mode: CountMode,
) -> Result<PathLengthDistribution> {
    check_prefix(g, n)?;
    let mut out = measure_checkpoints(g, &[n], mode)?;
    Ok(out.pop().unwrap().distribution)
}

/// Checkpoint sizes `stride, 2 stride, ...`, always ending at `node_count`.
pub fn checkpoint_sizes(node_count: usize, stride: usize) -> Vec<usize> {
    let stride = stride.max(1);
    let mut sizes: Vec<usize> = (1..).map(|j| j * stride).take_while(|&n| n < node_count).collect();
    if node_count > 0 {
        sizes.push(node_count);
    }
    sizes
}

/// Indicators at every `stride` nodes (and at the full graph) with the
/// default [`CountMode`].
pub fn cumulativeness_series(g: &KnowledgeGraph, stride: usize) -> Result<CumulativenessSeries> {
    cumulativeness_series_with(g, stride, CountMode::default())
}

pub fn cumulativeness_series_with(
    g: &KnowledgeGraph,
    stride: usize,
    mode: CountMode,
) -> Result<CumulativenessSeries> {
    if stride == 0 {
        return Err(Error::InvalidInput("stride must be at least 1".into()));
    }
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let sizes = checkpoint_sizes(g.node_count(), stride);
    let checkpoints = measure_checkpoints(g, &sizes, mode)?
        .into_iter()
        .map(|m| m.checkpoint)
        .collect();
    CumulativenessSeries::new(checkpoints)
}

/// Everything measured at one prefix size.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub checkpoint: Checkpoint,
    pub distribution: PathLengthDistribution,
    /// Number of initial nodes in the prefix.
    pub initial_nodes: usize,
}

/// Measures the graph at each of the strictly increasing prefix sizes in a
/// single incremental sweep.
pub fn measure_checkpoints(
    g: &KnowledgeGraph,
    sizes: &[usize],
    mode: CountMode,
) -> Result<Vec<Measurement>> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    for w in sizes.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidInput("checkpoint sizes must increase strictly".into()));
        }
    }
    if let Some(&n) = sizes.iter().find(|&&n| n == 0 || n > g.node_count()) {
        check_prefix(g, n)?;
    }
    let largest = sizes.last().copied().unwrap_or(0);
    if mode.uses_log(largest) {
        Ok(Sweep::<LnWeight>::new(g).run(sizes))
    } else {
        Ok(Sweep::<BigUint>::new(g).run(sizes))
    }
}

trait PathWeight: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add_assign(&mut self, other: &Self);
    fn into_counts(values: Vec<Self>) -> PathCounts;
}

impl PathWeight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    #[inline]
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }

    fn into_counts(values: Vec<Self>) -> PathCounts {
        PathCounts::Exact(values)
    }
}

/// A count stored as its natural logarithm.
#[derive(Debug, Clone, Copy)]
struct LnWeight(f64);

impl PathWeight for LnWeight {
    fn zero() -> Self {
        LnWeight(f64::NEG_INFINITY)
    }

    fn one() -> Self {
        LnWeight(0.0)
    }

    #[inline]
    fn add_assign(&mut self, other: &Self) {
        self.0 = ln_add(self.0, other.0);
    }

    fn into_counts(values: Vec<Self>) -> PathCounts {
        PathCounts::Log(values.into_iter().map(|w| w.0).collect())
    }
}

/// Path counts ending at one node, for lengths `offset..offset + values.len()`.
struct NodePaths<W> {
    offset: usize,
    values: Vec<W>,
}

struct Sweep<'g, W> {
    graph: &'g KnowledgeGraph,
    nodes: Vec<NodePaths<W>>,
    totals: Vec<W>,
    initial: usize,
    external: u64,
}

impl<'g, W: PathWeight> Sweep<'g, W> {
    fn new(graph: &'g KnowledgeGraph) -> Self {
        Self {
            graph,
            nodes: Vec::with_capacity(graph.node_count()),
            totals: Vec::new(),
            initial: 0,
            external: 0,
        }
    }

    fn step(&mut self) {
        let i = self.nodes.len();
        let cited = self.graph.cited_by(i);
        self.external += self.graph.external_backlinks(i);
        let paths = if cited.is_empty() {
            self.initial += 1;
            NodePaths { offset: 0, values: vec![W::one()] }
        } else {
            let lo = cited.iter().map(|&c| self.nodes[c].offset).min().unwrap();
            let hi = cited
                .iter()
                .map(|&c| self.nodes[c].offset + self.nodes[c].values.len())
                .max()
                .unwrap();
            let mut values = vec![W::zero(); hi - lo];
            for &c in cited {
                let src = &self.nodes[c];
                let base = src.offset - lo;
                for (dst, w) in values[base..].iter_mut().zip(&src.values) {
                    dst.add_assign(w);
                }
            }
            NodePaths { offset: lo + 1, values }
        };
        let end = paths.offset + paths.values.len();
        if self.totals.len() < end {
            self.totals.resize(end, W::zero());
        }
        for (dst, w) in self.totals[paths.offset..].iter_mut().zip(&paths.values) {
            dst.add_assign(w);
        }
        self.nodes.push(paths);
    }

    fn snapshot(&self) -> Measurement {
        let n = self.nodes.len();
        let distribution = PathLengthDistribution::from_counts(n, W::into_counts(self.totals.clone()));
        let checkpoint = Checkpoint {
            n,
            id: self.graph.edges_in_prefix(n) as f64 / n as f64,
            ipl: distribution.ipl,
            mipl: distribution.mipl,
            ed: self.external as f64 / n as f64,
        };
        Measurement { checkpoint, distribution, initial_nodes: self.initial }
    }

    fn run(mut self, sizes: &[usize]) -> Vec<Measurement> {
        let mut out = Vec::with_capacity(sizes.len());
        for &n in sizes {
            while self.nodes.len() < n {
                self.step();
            }
            out.push(self.snapshot());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphParts;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> KnowledgeGraph {
        KnowledgeGraph::from_parts(GraphParts::unlabeled(n, edges.to_vec())).unwrap()
    }

    /// a, b initial; c cites a; d cites a and c.
    fn abcd() -> KnowledgeGraph {
        graph(4, &[(2, 0), (3, 0), (3, 2)])
    }

    fn chain(n: usize) -> KnowledgeGraph {
        graph(n, &(1..n).map(|i| (i, i - 1)).collect::<Vec<_>>())
    }

    /// Counts every path by depth-first enumeration from each initial node
    /// along forward links. Independent of the sweep.
    fn brute_force_counts(g: &KnowledgeGraph, n: usize) -> Vec<u64> {
        let mut forward = vec![Vec::new(); n];
        for i in 0..n {
            for &c in g.cited_by(i) {
                forward[c].push(i);
            }
        }
        fn walk(node: usize, len: usize, forward: &[Vec<usize>], counts: &mut Vec<u64>) {
            if counts.len() <= len {
                counts.resize(len + 1, 0);
            }
            counts[len] += 1;
            for &next in &forward[node] {
                walk(next, len + 1, forward, counts);
            }
        }
        let mut counts = Vec::new();
        for start in (0..n).filter(|&i| g.cited_by(i).is_empty()) {
            walk(start, 0, &forward, &mut counts);
        }
        counts
    }

    fn exact_u64(d: &PathLengthDistribution) -> Vec<u64> {
        d.counts.exact().unwrap().iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn internal_dependence_examples() {
        let g = abcd();
        assert_eq!(internal_dependence(&g, 4).unwrap(), 0.75);
        assert_eq!(internal_dependence(&graph(5, &[]), 5).unwrap(), 0.0);
        assert_eq!(internal_dependence(&graph(1, &[]), 1).unwrap(), 0.0);
        assert!(matches!(internal_dependence(&g, 0), Err(Error::PrefixOutOfRange { .. })));
        assert!(internal_dependence(&g, 5).is_err());
    }

    #[test]
    fn external_dependence_examples() {
        let mut p = GraphParts::unlabeled(3, vec![]);
        p.external_backlink_counts = vec![2, 0, 1];
        let g = KnowledgeGraph::from_parts(p).unwrap();
        assert_eq!(external_dependence(&g, 3).unwrap(), 1.0);
        assert_eq!(external_dependence(&graph(3, &[]), 3).unwrap(), 0.0);
        let mut p = GraphParts::unlabeled(1, vec![]);
        p.external_backlink_counts = vec![5];
        assert_eq!(external_dependence(&KnowledgeGraph::from_parts(p).unwrap(), 1).unwrap(), 5.0);
    }

    #[test]
    fn path_distribution_of_small_example() {
        let d = path_length_distribution(&abcd(), 4).unwrap();
        assert_eq!(exact_u64(&d), brute_force_counts(&abcd(), 4));
        assert_eq!(exact_u64(&d), vec![2, 2, 1]);
        assert!((d.ipl - 0.8).abs() < 1e-15);
        assert_eq!(d.mipl, 2);
    }

    #[test]
    fn antichain_and_chain() {
        let d = path_length_distribution(&graph(6, &[]), 6).unwrap();
        assert_eq!(exact_u64(&d), vec![6]);
        assert_eq!((d.ipl, d.mipl), (0.0, 0));

        let n = 9;
        let d = path_length_distribution(&chain(n), n).unwrap();
        assert_eq!(exact_u64(&d), vec![1; n]);
        assert!((d.ipl - (n - 1) as f64 / 2.0).abs() < 1e-12);
        assert_eq!(d.mipl, n - 1);
    }

    #[test]
    fn initial_fraction_examples() {
        assert_eq!(initial_fraction(&abcd(), 4).unwrap(), 0.5);
        assert_eq!(initial_fraction(&graph(4, &[]), 4).unwrap(), 1.0);
        assert_eq!(initial_fraction(&chain(8), 8).unwrap(), 1.0 / 8.0);
    }

    #[test]
    fn series_examples() {
        let s = cumulativeness_series(&abcd(), 2).unwrap();
        let got: Vec<(usize, f64, f64)> = s.checkpoints.iter().map(|c| (c.n, c.id, c.ipl)).collect();
        assert_eq!(got.len(), 2);
        assert_eq!((got[0].0, got[0].1, got[0].2), (2, 0.0, 0.0));
        assert_eq!(got[1].0, 4);
        assert_eq!(got[1].1, 0.75);
        assert!((got[1].2 - 0.8).abs() < 1e-15);

        let s = cumulativeness_series(&abcd(), 10).unwrap();
        assert_eq!(s.checkpoints.iter().map(|c| c.n).collect::<Vec<_>>(), vec![4]);

        let s = cumulativeness_series(&graph(7, &[]), 3).unwrap();
        assert_eq!(s.checkpoints.iter().map(|c| c.n).collect::<Vec<_>>(), vec![3, 6, 7]);
        assert!(s.checkpoints.iter().all(|c| c.id == 0.0 && c.ipl == 0.0));

        assert!(cumulativeness_series(&abcd(), 0).is_err());
        let empty = KnowledgeGraph::from_parts(GraphParts::default()).unwrap();
        assert!(matches!(cumulativeness_series(&empty, 1), Err(Error::EmptyGraph)));
    }

    #[test]
    fn log_mode_matches_exact() {
        let g = graph(6, &[(2, 0), (3, 0), (3, 2), (4, 3), (4, 1), (5, 4), (5, 2)]);
        let exact = path_length_distribution_with(&g, 6, CountMode::Exact).unwrap();
        let log = path_length_distribution_with(&g, 6, CountMode::Log).unwrap();
        assert!(matches!(log.counts, PathCounts::Log(_)));
        assert_eq!(exact.mipl, log.mipl);
        for k in 0..exact.counts.len() {
            let e = exact.counts.get_f64(k);
            assert!((log.counts.get_f64(k) - e).abs() <= 1e-12 * e);
        }
        assert!((exact.ipl - log.ipl).abs() < 1e-12);
        // Auto switches on size
        let auto = path_length_distribution_with(&g, 6, CountMode::Auto { threshold: 5 }).unwrap();
        assert!(matches!(auto.counts, PathCounts::Log(_)));
    }

    #[test]
    fn normalized_sums_to_one() {
        let d = path_length_distribution(&abcd(), 4).unwrap();
        assert!((d.normalized.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn backlink_histogram() {
        let h = backlink_distribution(&abcd(), 4).unwrap();
        assert_eq!(h.counts, vec![2, 1, 1]);
        assert_eq!(h.mean, 0.75);
    }

    fn random_dag() -> impl Strategy<Value = KnowledgeGraph> {
        (1usize..=12, 0.0f64..=0.5, any::<u64>()).prop_map(|(n, density, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..i {
                    if rng.gen::<f64>() < density {
                        edges.push((i, j));
                    }
                }
            }
            graph(n, &edges)
        })
    }

    proptest! {
        #[test]
        fn sweep_matches_enumeration(g in random_dag()) {
            for n in 1..=g.node_count() {
                let d = path_length_distribution_with(&g, n, CountMode::Exact).unwrap();
                prop_assert_eq!(exact_u64(&d), brute_force_counts(&g, n));
            }
        }

        #[test]
        fn mipl_and_total_are_monotone(g in random_dag()) {
            let ms = measure_checkpoints(&g, &(1..=g.node_count()).collect::<Vec<_>>(), CountMode::Exact).unwrap();
            for w in ms.windows(2) {
                prop_assert!(w[1].distribution.mipl >= w[0].distribution.mipl);
                let total = |m: &Measurement| m.distribution.counts.exact().unwrap().iter().sum::<BigUint>();
                prop_assert!(total(&w[1]) >= total(&w[0]));
            }
        }

        #[test]
        fn incremental_equals_pointwise(g in random_dag(), stride in 1usize..5) {
            let s = cumulativeness_series_with(&g, stride, CountMode::Exact).unwrap();
            for c in &s.checkpoints {
                let d = path_length_distribution_with(&g, c.n, CountMode::Exact).unwrap();
                prop_assert_eq!(c.ipl.to_bits(), d.ipl.to_bits());
                prop_assert_eq!(c.mipl, d.mipl);
                prop_assert_eq!(c.id.to_bits(), internal_dependence(&g, c.n).unwrap().to_bits());
            }
        }
    }
}
