//! Search-process growth model.
//!
//! When a technology holds `n` inventions, an inventor completes an invention
//! with probability `rho(n) = 1 / (q n + m1)` before each further search, and
//! every search picks up one backward link. The number of links is therefore
//! geometric, `P(m) = (1 - rho)^m rho`, and each link targets an existing
//! invention chosen uniformly.
//!
//! Randomness comes from ChaCha8 (`rand_chacha` 0.3) seeded with a single
//! `u64` through `SeedableRng::seed_from_u64`. For every new node the
//! simulator draws one uniform for the link count, then the distinct targets
//! with `rand::seq::index::sample`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{GraphParts, InventionNode, KnowledgeGraph, ModelParams};

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Probability of completing an invention with `n` inventions in place.
pub fn rho(n: u64, params: &ModelParams) -> f64 {
    1.0 / (params.q() * n as f64 + params.m1())
}

/// Draws a geometric link count with success probability `rho` by inversion.
pub fn sample_geometric<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> u64 {
    // 1 - U lies in (0, 1], so the logarithm is finite
    let u = 1.0 - rng.gen::<f64>();
    if rho >= 1.0 {
        return 0;
    }
    let m = (u.ln() / (-rho).ln_1p()).floor();
    if m >= u64::MAX as f64 {
        u64::MAX
    } else {
        m as u64
    }
}

/// Number of internal backward links of a node arriving when `n` nodes exist.
pub fn sample_backlink_count<R: Rng + ?Sized>(n: u64, params: &ModelParams, rng: &mut R) -> u64 {
    sample_geometric(rho(n, params), rng)
}

/// Grows a graph of `node_count` nodes from `seed`.
///
/// Node ids are `S` followed by the zero-padded ordinal so that lexicographic
/// id order equals ordinal order.
pub fn simulate(params: &ModelParams, node_count: usize, seed: u64) -> KnowledgeGraph {
    let mut rng = rng_from_seed(seed);
    simulate_with_rng(params, node_count, &mut rng)
}

pub fn simulate_with_rng<R: Rng + ?Sized>(
    params: &ModelParams,
    node_count: usize,
    rng: &mut R,
) -> KnowledgeGraph {
    let width = node_count.saturating_sub(1).to_string().len();
    let mut nodes = Vec::with_capacity(node_count);
    let mut edges = Vec::new();
    for n in 0..node_count {
        let mut node = InventionNode::new(format!("S{n:0width$}"), n);
        node.class_labels.insert(SIMULATED_CLASS.to_string());
        nodes.push(node);
        let m = sample_backlink_count(n as u64, params, rng).min(n as u64) as usize;
        if m > 0 {
            edges.extend(index::sample(rng, n, m).into_iter().map(|target| (n, target)));
        }
    }
    let parts = GraphParts {
        nodes,
        internal_edges: edges,
        external_backlink_counts: vec![0; node_count],
    };
    KnowledgeGraph::from_parts(parts).expect("simulated edges point backward and are distinct")
}

/// Class label attached to simulated nodes.
pub const SIMULATED_CLASS: &str = "SIM";
