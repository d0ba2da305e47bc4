use cumuldyn::fit::{backlink_gof, fitted_params, geometric_gof, pathlength_gof};
use cumuldyn::{DistributionFit, Family};

use crate::error::{CliError, CliResult};
use crate::input::{hist_sizes, read_backlink_hist, read_distribution, read_series};
use crate::report::{create_dir, num, RunMetadata, Table};
use crate::GofArgs;

const ALTERNATIVES: [Family; 3] = [Family::Poisson, Family::Normal, Family::Binomial];

pub fn run(args: &GofArgs) -> CliResult<()> {
    let series_path = args.input.join("series.csv");
    let hist_path = args.input.join("backlinks_hist.csv");
    let mut meta = RunMetadata::new("gof");
    meta.input(&args.input);

    let n = match args.at {
        Some(n) => n,
        None => *hist_sizes(&hist_path)?
            .last()
            .ok_or_else(|| CliError::Usage(format!("{}: no checkpoints; pass --at", hist_path.display())))?,
    };
    meta.param("n", n).param("n_prime", args.n_prime);

    let dist = read_distribution(&args.input.join("distributions").join(format!("n{n}.csv")), n)?;
    if !dist.has_paths() {
        return Err(CliError::Usage(format!("path-length distribution at n={n} is empty")));
    }
    let mut fits: Vec<(&str, DistributionFit)> = Vec::new();
    fits.push(("path_length", pathlength_gof(&dist, Family::BinomialType, args.n_prime)?));
    for family in ALTERNATIVES {
        fits.push(("path_length", pathlength_gof(&dist, family, None)?));
    }

    let hist = if hist_path.exists() { read_backlink_hist(&hist_path, n)? } else { None };
    match hist {
        Some(hist) if hist.n > 0 => {
            match read_series(&series_path).and_then(|s| Ok(fitted_params(&s)?)) {
                Ok(params) => {
                    meta.param("q", params.q()).param("m0", params.m0());
                    fits.push(("backlinks", geometric_gof(&hist, &params, n)?));
                }
                Err(e) => meta.warn(format!("geometric fit skipped: {e}")),
            }
            for family in ALTERNATIVES {
                fits.push(("backlinks", backlink_gof(&hist, family)?));
            }
        }
        _ => meta.warn(format!("no backward-link histogram at n={n}")),
    }

    create_dir(&args.out)?;
    let mut summary = Table::create(
        args.out.join("gof_summary.csv"),
        &["n", "target", "family", "params", "plot_correlation", "chi_square", "dof", "p_value", "warning"],
    )?;
    let mut points =
        Table::create(args.out.join("gof_points.csv"), &["n", "target", "family", "value", "empirical", "model"])?;
    for (target, fit) in &fits {
        let params: Vec<String> = fit.params.iter().map(|&p| num(p)).collect();
        summary.row([
            n.to_string(),
            target.to_string(),
            fit.family.to_string(),
            params.join(";"),
            num(fit.plot_correlation),
            num(fit.chi_square.statistic),
            fit.chi_square.dof.to_string(),
            num(fit.chi_square.p_value),
            fit.warning.clone().unwrap_or_default(),
        ])?;
        for (value, (empirical, model)) in fit.plot_points.iter().enumerate() {
            points.row([
                n.to_string(),
                target.to_string(),
                fit.family.to_string(),
                value.to_string(),
                num(*empirical),
                num(*model),
            ])?;
        }
        if let Some(w) = &fit.warning {
            meta.warn(format!("{target} {}: {w}", fit.family));
        }
    }
    summary.finish()?;
    points.finish()?;
    meta.output("gof_summary.csv").output("gof_points.csv");
    meta.write(&args.out)
}
