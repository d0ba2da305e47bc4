use cumuldyn::analytic::{corrected_rate_a, corrected_rate_b, ipl_slope, max_speed};
use cumuldyn::fit::{fit_series, Quantity};

use crate::error::{CliError, CliResult};
use crate::input::{read_backlinks, read_series};
use crate::report::{create_dir, num, opt_num, RunMetadata, Table};
use crate::FitArgs;

pub fn run(args: &FitArgs) -> CliResult<()> {
    let series = read_series(&args.series)?;
    let backlinks = args.backlinks.as_deref().map(read_backlinks).transpose()?;
    let n = series.last().map(|c| c.n).ok_or_else(|| CliError::Usage("series is empty".into()))?;
    let fits = Quantity::ALL.map(|which| fit_series(&series, which));
    let fits = fits.into_iter().collect::<Result<Vec<_>, _>>()?;

    create_dir(&args.out)?;
    let mut table =
        Table::create(args.out.join("fits.csv"), &["quantity", "slope", "intercept", "r2", "se", "f", "n_obs"])?;
    for (which, f) in Quantity::ALL.iter().zip(&fits) {
        table.row([
            which.name().to_string(),
            num(f.slope),
            num(f.intercept),
            num(f.r_squared),
            num(f.residual_se),
            num(f.f_statistic),
            f.n_obs.to_string(),
        ])?;
    }
    table.finish()?;

    let (q, m0) = (fits[0].slope, fits[0].intercept);
    let p = ipl_slope(q);
    let (v, delta_n) = max_speed(p);
    let (q_b, p_b) = corrected_rate_b(q, m0, n as u64);
    let corrected_a = backlinks.as_deref().map(|b| corrected_rate_a(&b[..n.min(b.len())]));
    let mut rates = Table::create(
        args.out.join("rates.csv"),
        &["n", "q", "m0", "p", "q_prime_a", "p_prime_a", "q_prime_b", "p_prime_b", "v", "delta_n"],
    )?;
    rates.row([
        n.to_string(),
        num(q),
        num(m0),
        num(p),
        opt_num(corrected_a.map(|c| c.0)),
        opt_num(corrected_a.map(|c| c.1)),
        num(q_b),
        num(p_b),
        num(v),
        num(delta_n),
    ])?;
    rates.finish()?;

    let mut meta = RunMetadata::new("fit");
    meta.input(&args.series).output("fits.csv").output("rates.csv").param("n", n);
    if let Some(path) = &args.backlinks {
        meta.input(path);
    } else {
        meta.warn("no --backlinks given; q_prime_a and p_prime_a left empty".into());
    }
    if m0 <= 0.0 {
        meta.warn(format!("fitted id intercept {m0} is not positive"));
    }
    meta.write(&args.out)
}
