use std::path::Path;

use cumuldyn::ingest::{build_graph, load_corpus, TechnologyQuery};
use cumuldyn::paths::{backlink_distribution, checkpoint_sizes, measure_checkpoints};
use cumuldyn::KnowledgeGraph;

use crate::error::{CliError, CliResult};
use crate::report::{create_dir, num, RunMetadata, Table};
use crate::MeasureArgs;

pub fn run(args: &MeasureArgs) -> CliResult<()> {
    if args.count.stride == 0 {
        return Err(CliError::Usage("--stride must be at least 1".into()));
    }
    let corpus = load_corpus(&args.corpus.nodes, &args.corpus.edges)?;
    let query = TechnologyQuery::new(&args.name, &args.prefixes, args.corpus.year_cutoff)?;
    let filters = args.corpus.filters();
    let (g, diagnostics) = build_graph(&corpus, &query, filters)?;

    let mut meta = RunMetadata::new("measure");
    meta.param("name", &args.name)
        .param("prefixes", query.prefixes())
        .param("year_cutoff", args.corpus.year_cutoff)
        .param("filters", filters)
        .param("stride", args.count.stride)
        .param("mode", format!("{:?}", args.count.count_mode()))
        .input(&args.corpus.nodes)
        .input(&args.corpus.edges)
        .diag("build", &diagnostics);
    if diagnostics.chronology_dropped + diagnostics.tie_order_dropped > 0 {
        meta.warn(format!(
            "dropped {} citations to later nodes",
            diagnostics.chronology_dropped + diagnostics.tie_order_dropped
        ));
    }
    write_measurements(&g, args.count.stride, args.count.count_mode(), &args.out, &mut meta)?;
    meta.write(&args.out)
}

/// Writes `series.csv`, `distributions/n{n}.csv`, `backlinks_hist.csv` and
/// `backlinks.csv` for `g`.
pub fn write_measurements(
    g: &KnowledgeGraph,
    stride: usize,
    mode: cumuldyn::CountMode,
    out: &Path,
    meta: &mut RunMetadata,
) -> CliResult<()> {
    let sizes = checkpoint_sizes(g.node_count(), stride);
    let measurements = measure_checkpoints(g, &sizes, mode)?;
    let dist_dir = out.join("distributions");
    create_dir(&dist_dir)?;

    let mut series = Table::create(out.join("series.csv"), &["n", "id", "ipl", "mipl", "ed"])?;
    for m in &measurements {
        let c = &m.checkpoint;
        series.row([c.n.to_string(), num(c.id), num(c.ipl), c.mipl.to_string(), num(c.ed)])?;

        let d = &m.distribution;
        let mut table = Table::create(dist_dir.join(format!("n{}.csv", c.n)), &["k", "count", "normalized"])?;
        for k in 0..d.counts.len() {
            let p = d.normalized.get(k).copied().unwrap_or(0.0);
            table.row([k.to_string(), d.counts.display(k), num(p)])?;
        }
        table.finish()?;
    }
    series.finish()?;

    let mut hist = Table::create(out.join("backlinks_hist.csv"), &["n", "m", "count"])?;
    for &n in &sizes {
        let h = backlink_distribution(g, n)?;
        for (m, count) in h.counts.iter().enumerate().filter(|(_, &c)| c > 0) {
            hist.row([n.to_string(), m.to_string(), count.to_string()])?;
        }
    }
    hist.finish()?;

    let mut nodes = Table::create(out.join("backlinks.csv"), &["ordinal", "node_id", "year", "internal", "external"])?;
    for (i, node) in g.nodes().iter().enumerate() {
        nodes.row([
            i.to_string(),
            node.node_id.clone(),
            node.year.map(|y| y.to_string()).unwrap_or_default(),
            g.backlinks(i).to_string(),
            g.external_backlinks(i).to_string(),
        ])?;
    }
    nodes.finish()?;

    let last = measurements.last().expect("graph is nonempty");
    meta.output("series.csv")
        .output("distributions/")
        .output("backlinks_hist.csv")
        .output("backlinks.csv")
        .diag("nodes", g.node_count())
        .diag("internal_edges", g.edge_count())
        .diag("initial_nodes", last.initial_nodes)
        .diag("final", last.checkpoint);
    Ok(())
}
