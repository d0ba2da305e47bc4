use cumuldyn::fit::{
    classify_relative_cumulativeness, fit_series, invention_rate, ols_fit, power_law_fit, Quantity, TechnologyPoint,
};
use cumuldyn::ingest::{build_graph, load_corpus, load_grouping_table, queries_from_table, Corpus, IngestError, TechnologyQuery};
use cumuldyn::paths::cumulativeness_series_with;
use cumuldyn::LinearFit;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::report::{create_dir, num, opt_num, RunMetadata, Table};
use crate::{CorpusArgs, CountArgs, SweepArgs};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CUMULDYN_THREADS";

struct TechRow {
    name: String,
    n: usize,
    id: f64,
    ipl: f64,
    /// Internal links per node squared, `E / n^2`.
    q: f64,
    /// Fitted ipl growth per node.
    p: Option<f64>,
    /// Nodes per year.
    rate: Option<f64>,
    warnings: Vec<String>,
}

fn thread_count() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

fn measure(corpus: &Corpus, query: &TechnologyQuery, args: (&CorpusArgs, &CountArgs)) -> CliResult<Option<TechRow>> {
    let (corpus_args, count) = args;
    let g = match build_graph(corpus, query, corpus_args.filters()) {
        Ok((g, _)) => g,
        Err(IngestError::EmptySelection(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let series = cumulativeness_series_with(&g, count.stride, count.count_mode())?;
    let last = *series.last().expect("nonempty graph has a checkpoint");
    let mut warnings = Vec::new();
    let p = match fit_series(&series, Quantity::Ipl) {
        Ok(f) => Some(f.slope),
        Err(e) => {
            warnings.push(format!("{}: ipl slope unavailable: {e}", query.name));
            None
        }
    };
    let rate = match invention_rate(&g) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("{}: invention rate unavailable: {e}", query.name));
            None
        }
    };
    let n = g.node_count();
    Ok(Some(TechRow {
        name: query.name.clone(),
        n,
        id: last.id,
        ipl: last.ipl,
        q: g.edge_count() as f64 / (n as f64 * n as f64),
        p,
        rate,
        warnings,
    }))
}

fn fit_row(table: &mut Table, name: &str, f: &LinearFit) -> CliResult<()> {
    table.row([
        name.to_string(),
        num(f.slope),
        num(f.intercept),
        num(f.r_squared),
        num(f.residual_se),
        num(f.f_statistic),
        f.n_obs.to_string(),
    ])
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    if args.count.stride == 0 {
        return Err(CliError::Usage("--stride must be at least 1".into()));
    }
    let threads = thread_count()?;
    let corpus = load_corpus(&args.corpus.nodes, &args.corpus.edges)?;
    let table = load_grouping_table(&args.groups)?;
    let queries = queries_from_table(&table, args.corpus.year_cutoff)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let results: Vec<CliResult<Option<TechRow>>> = pool.install(|| {
        queries.par_iter().map(|q| measure(&corpus, q, (&args.corpus, &args.count))).collect()
    });

    let mut meta = RunMetadata::new("sweep");
    meta.input(&args.corpus.nodes)
        .input(&args.corpus.edges)
        .input(&args.groups)
        .param("year_cutoff", args.corpus.year_cutoff)
        .param("filters", args.corpus.filters())
        .param("stride", args.count.stride)
        .param("mode", format!("{:?}", args.count.count_mode()));
    let mut rows = Vec::new();
    for (query, result) in queries.iter().zip(results) {
        match result? {
            Some(mut row) => {
                for w in row.warnings.drain(..) {
                    meta.warn(w);
                }
                rows.push(row);
            }
            None => meta.warn(format!("{}: no matching nodes, skipped", query.name)),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage("no technology matched any node".into()));
    }

    create_dir(&args.out)?;
    let mut tech = Table::create(args.out.join("technologies.csv"), &["tech", "n", "id", "ipl", "q", "p", "rate"])?;
    for r in &rows {
        tech.row([r.name.clone(), r.n.to_string(), num(r.id), num(r.ipl), num(r.q), opt_num(r.p), opt_num(r.rate)])?;
    }
    tech.finish()?;
    meta.output("technologies.csv");

    if rows.len() < 3 {
        meta.warn(format!("{} technologies; cross-technology fits need at least 3, skipped", rows.len()));
        return meta.write(&args.out);
    }

    let mut fits =
        Table::create(args.out.join("sweep_fits.csv"), &["fit", "slope", "intercept", "r2", "se", "f", "n_obs"])?;
    let ids: Vec<f64> = rows.iter().map(|r| r.id).collect();
    let ipls: Vec<f64> = rows.iter().map(|r| r.ipl).collect();
    match ols_fit(&ids, &ipls) {
        Ok(f) => fit_row(&mut fits, "ipl_vs_id", &f)?,
        Err(e) => meta.warn(format!("ipl_vs_id fit skipped: {e}")),
    }
    let rated: Vec<&TechRow> = rows.iter().filter(|r| r.rate.is_some() && r.q > 0.0).collect();
    let qs: Vec<f64> = rated.iter().map(|r| r.q).collect();
    let rates: Vec<f64> = rated.iter().filter_map(|r| r.rate).collect();
    match power_law_fit(&qs, &rates) {
        Ok(pl) => {
            fit_row(&mut fits, "ln_rate_vs_ln_q", &pl.log_fit)?;
            meta.diag("rate_power_law", serde_json::json!({"exponent": pl.exponent, "prefactor": pl.prefactor}));
        }
        Err(e) => meta.warn(format!("rate power law skipped: {e}")),
    }
    fits.finish()?;
    meta.output("sweep_fits.csv");

    let points: Vec<TechnologyPoint> =
        rows.iter().map(|r| TechnologyPoint { name: r.name.clone(), n: r.n as f64, id: r.id }).collect();
    match classify_relative_cumulativeness(&points) {
        Ok(c) => {
            let mut labels = Table::create(args.out.join("labels.csv"), &["tech", "n", "id", "fitted_id", "label"])?;
            for (p, (_, label)) in points.iter().zip(&c.labels) {
                let label = serde_json::to_value(label).expect("label serializes");
                labels.row([
                    p.name.clone(),
                    num(p.n),
                    num(p.id),
                    num(c.fit.predict(p.n)),
                    label.as_str().unwrap_or_default().to_string(),
                ])?;
            }
            labels.finish()?;
            meta.output("labels.csv");
            meta.diag("id_power_law", serde_json::json!({"exponent": c.fit.exponent, "prefactor": c.fit.prefactor}));
        }
        Err(e) => meta.warn(format!("relative cumulativeness labels skipped: {e}")),
    }
    meta.write(&args.out)
}
