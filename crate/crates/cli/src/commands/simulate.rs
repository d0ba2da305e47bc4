use cumuldyn::growth::{simulate, SIMULATED_CLASS};
use cumuldyn::paths::{initial_fraction, internal_dependence};
use cumuldyn::ModelParams;

use crate::error::{CliError, CliResult};
use crate::report::{create_dir, RunMetadata, Table};
use crate::SimulateArgs;

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let params = ModelParams::new(args.q, args.m1)?;
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let g = simulate(&params, args.n, args.seed);
    create_dir(&args.out)?;

    let mut nodes = Table::create(args.out.join("nodes.csv"), &["node_id", "year", "classes"])?;
    for node in g.nodes() {
        nodes.row([node.node_id.as_str(), "", SIMULATED_CLASS])?;
    }
    nodes.finish()?;

    let mut edges = Table::create(args.out.join("edges.csv"), &["citing_id", "cited_id", "origin"])?;
    for (i, node) in g.nodes().iter().enumerate() {
        for &cited in g.cited_by(i) {
            edges.row([node.node_id.as_str(), g.nodes()[cited].node_id.as_str(), ""])?;
        }
    }
    edges.finish()?;

    let mut meta = RunMetadata::new("simulate");
    meta.param("q", params.q())
        .param("m1", params.m1())
        .param("m0", params.m0())
        .param("n", args.n)
        .param("seed", args.seed)
        .param("rng", "ChaCha8 (rand_chacha 0.3) seeded with seed_from_u64")
        .output("nodes.csv")
        .output("edges.csv")
        .diag("edges", g.edge_count())
        .diag("id", internal_dependence(&g, args.n)?)
        .diag("initial_fraction", initial_fraction(&g, args.n)?);
    meta.write(&args.out)
}
