//! Regression and goodness-of-fit tools for measured series and
//! distributions.
//!
//! Distribution fits are judged primarily by the probability-plot
//! correlation: the Pearson correlation between empirical and model
//! probabilities over the support. A chi-square test is reported alongside,
//! with adjacent bins pooled until every expected count reaches
//! [`MIN_EXPECTED`].

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::analytic::binomial_path_dist;
use crate::error::{Error, Result};
use crate::graph::{
    BacklinkDistribution, ChiSquare, CumulativenessSeries, DistributionFit, Family, KnowledgeGraph,
    LinearFit, ModelParams, PathLengthDistribution,
};
use crate::growth::rho;
use crate::numeric::pearson;

/// Minimum expected count per chi-square bin after pooling.
pub const MIN_EXPECTED: f64 = 5.0;

/// Probability-plot correlation a model must reach to be accepted.
pub const PLOT_CORRELATION_THRESHOLD: f64 = 0.99;

/// Ordinary least squares of `y` on `x` with an intercept.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "x and y lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 observations, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite observation".into()));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let e = yi - intercept - slope * xi;
            e * e
        })
        .sum();
    let ssr = (syy - sse).max(0.0);
    let dof = n - 2.0;
    let sigma2 = sse / dof;
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 0.0 };
    let f_statistic = if sse > 0.0 {
        ssr / sigma2
    } else if ssr > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_se: (sigma2 / sxx).sqrt(),
        intercept_se: (sigma2 * (1.0 / n + mean_x * mean_x / sxx)).sqrt(),
        r_squared,
        residual_se: sigma2.sqrt(),
        f_statistic,
        n_obs: x.len(),
    })
}

/// Series component to regress on `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Id,
    Ipl,
    Mipl,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::Id, Quantity::Ipl, Quantity::Mipl];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Id => "id",
            Quantity::Ipl => "ipl",
            Quantity::Mipl => "mipl",
        }
    }
}

/// Regresses one series component on `n` over every checkpoint. The slope is
/// the empirical `q` (id), `p` (ipl) or longest-path rate (mipl); the
/// intercept is `m0` or `k0`.
pub fn fit_series(series: &CumulativenessSeries, which: Quantity) -> Result<LinearFit> {
    let x: Vec<f64> = series.checkpoints.iter().map(|c| c.n as f64).collect();
    let y: Vec<f64> = series
        .checkpoints
        .iter()
        .map(|c| match which {
            Quantity::Id => c.id,
            Quantity::Ipl => c.ipl,
            Quantity::Mipl => c.mipl as f64,
        })
        .collect();
    ols_fit(&x, &y)
}

/// Model parameters from the id fit: slope `q`, intercept `m0`.
pub fn fitted_params(series: &CumulativenessSeries) -> Result<ModelParams> {
    let fit = fit_series(series, Quantity::Id)?;
    ModelParams::from_q_m0(fit.slope, fit.intercept)
}

/// Upper tail probability of the chi-square distribution.
pub fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 || statistic.is_nan() {
        return f64::NAN;
    }
    if statistic.is_infinite() {
        return 0.0;
    }
    if statistic <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, statistic / 2.0)
}

/// Pearson chi-square of observed probabilities against model probabilities
/// for a sample of size `total`. Bins are pooled in order until each expected
/// count reaches [`MIN_EXPECTED`]; a short remainder joins the last group.
/// Model mass not covered by `model` forms a final tail bin.
pub fn chi_square_test(observed: &[f64], model: &[f64], total: f64, fitted_params: usize) -> ChiSquare {
    let len = observed.len().max(model.len());
    let mut bins: Vec<(f64, f64)> = (0..len)
        .map(|k| {
            let o = observed.get(k).copied().unwrap_or(0.0);
            let e = model.get(k).copied().unwrap_or(0.0);
            (o, e)
        })
        .collect();
    let tail = (1.0 - model.iter().sum::<f64>()).max(0.0);
    if tail > 0.0 {
        bins.push((0.0, tail));
    }

    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (o, e) in bins {
        o_acc += o;
        e_acc += e;
        if e_acc * total >= MIN_EXPECTED {
            groups.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if o_acc > 0.0 || e_acc > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => groups.push((o_acc, e_acc)),
        }
    }

    let statistic: f64 = groups
        .iter()
        .map(|&(o, e)| {
            let d = o - e;
            if d == 0.0 {
                0.0
            } else if e > 0.0 {
                total * d * d / e
            } else {
                f64::INFINITY
            }
        })
        .sum();
    let dof = groups.len().saturating_sub(1 + fitted_params);
    ChiSquare { statistic, dof, p_value: chi_square_sf(statistic, dof) }
}

fn plot_fit(
    family: Family,
    params: Vec<f64>,
    empirical: &[f64],
    model: &[f64],
    total: f64,
    fitted_params: usize,
) -> DistributionFit {
    let len = empirical.len().max(model.len());
    let plot_points: Vec<(f64, f64)> = (0..len)
        .map(|k| {
            (
                empirical.get(k).copied().unwrap_or(0.0).clamp(0.0, 1.0),
                model.get(k).copied().unwrap_or(0.0).clamp(0.0, 1.0),
            )
        })
        .collect();
    let (plot_correlation, warning) = match pearson(&plot_points) {
        Some(r) => (r, None),
        None => {
            let on_diagonal = plot_points.iter().all(|(x, y)| (x - y).abs() <= 1e-12);
            let r = if on_diagonal { 1.0 } else { 0.0 };
            (r, Some(format!("degenerate probability plot ({} point(s)); correlation set to {r}", plot_points.len())))
        }
    };
    let chi_square = chi_square_test(empirical, model, total, fitted_params);
    DistributionFit { family, params, plot_points, plot_correlation, chi_square, warning }
}

fn geometric_pmf(rho: f64, len: usize) -> Vec<f64> {
    (0..len).map(|m| (1.0 - rho).powi(m as i32) * rho).collect()
}

fn poisson_pmf(eta: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| {
            if eta <= 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            let k = k as f64;
            (k * eta.ln() - eta - ln_gamma(k + 1.0)).exp()
        })
        .collect()
}

fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
}

/// Normal density discretized onto integers: `P(k) = Phi(k + 1/2) - Phi(k - 1/2)`,
/// with everything below `1/2` assigned to `k = 0`.
fn normal_pmf(mean: f64, sd: f64, len: usize) -> Vec<f64> {
    if sd <= 0.0 {
        return (0..len).map(|k| if (k as f64 - mean).abs() < 0.5 { 1.0 } else { 0.0 }).collect();
    }
    (0..len)
        .map(|k| {
            let upper = normal_cdf(k as f64 + 0.5, mean, sd);
            let lower = if k == 0 { 0.0 } else { normal_cdf(k as f64 - 0.5, mean, sd) };
            upper - lower
        })
        .collect()
}

fn binomial_pmf(trials: u64, p: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| {
            let k = k as u64;
            if k > trials {
                return 0.0;
            }
            if p <= 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            if p >= 1.0 {
                return if k == trials { 1.0 } else { 0.0 };
            }
            let (n, kf) = (trials as f64, k as f64);
            (ln_gamma(n + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(n - kf + 1.0)
                + kf * p.ln()
                + (n - kf) * (-p).ln_1p())
            .exp()
        })
        .collect()
}

fn moments(probs: &[f64]) -> (f64, f64) {
    let mean: f64 = probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    let var: f64 = probs.iter().enumerate().map(|(k, p)| (k as f64 - mean).powi(2) * p).sum();
    (mean, var.max(0.0))
}

/// Moment-matched model for a distribution on `0..len`. Binomial trials are
/// fixed at the largest observed value.
fn moment_model(family: Family, probs: &[f64], len: usize) -> (Vec<f64>, Vec<f64>) {
    let (mean, var) = moments(probs);
    let top = probs.iter().rposition(|p| *p > 0.0).unwrap_or(0) as u64;
    match family {
        Family::Normal => (vec![mean, var.sqrt()], normal_pmf(mean, var.sqrt(), len)),
        Family::Poisson => (vec![mean], poisson_pmf(mean, len)),
        Family::Binomial => {
            let trials = top.max(1);
            let p = (mean / trials as f64).clamp(0.0, 1.0);
            (vec![trials as f64, p], binomial_pmf(trials, p, len))
        }
        Family::Geometric => {
            let rho = 1.0 / (mean + 1.0);
            (vec![rho], geometric_pmf(rho, len))
        }
        Family::BinomialType => {
            let n_prime = top;
            (vec![n_prime as f64], binomial_type_pmf(n_prime))
        }
    }
}

fn binomial_type_pmf(n_prime: u64) -> Vec<f64> {
    if n_prime == 0 {
        vec![1.0]
    } else {
        binomial_path_dist(n_prime)
    }
}

fn histogram_probs(hist: &BacklinkDistribution) -> Result<Vec<f64>> {
    if hist.n == 0 {
        return Err(Error::InvalidInput("empty backlink histogram".into()));
    }
    Ok(hist.counts.iter().map(|&c| c as f64 / hist.n as f64).collect())
}

/// Compares a backward-link histogram with `Geometric(rho(n))` built from
/// fitted parameters.
pub fn geometric_gof(hist: &BacklinkDistribution, params: &ModelParams, n: usize) -> Result<DistributionFit> {
    let empirical = histogram_probs(hist)?;
    let rho = rho(n as u64, params);
    let model = geometric_pmf(rho, empirical.len());
    Ok(plot_fit(Family::Geometric, vec![rho], &empirical, &model, hist.n as f64, 0))
}

/// Moment-matched alternative families for a backward-link histogram.
pub fn backlink_gof(hist: &BacklinkDistribution, family: Family) -> Result<DistributionFit> {
    let empirical = histogram_probs(hist)?;
    let (params, model) = moment_model(family, &empirical, empirical.len());
    let fitted = params.len();
    Ok(plot_fit(family, params, &empirical, &model, hist.n as f64, fitted))
}

/// Compares a path-length distribution with one model family.
///
/// [`Family::BinomialType`] uses `n_prime` (default: the distribution's
/// mipl). The other families are moment-matched to the empirical law.
pub fn pathlength_gof(
    dist: &PathLengthDistribution,
    family: Family,
    n_prime: Option<u64>,
) -> Result<DistributionFit> {
    if !dist.has_paths() {
        return Err(Error::InvalidInput("path-length distribution has no paths".into()));
    }
    let empirical = &dist.normalized;
    let total = dist.counts.ln_total().exp();
    match family {
        Family::BinomialType => {
            let n_prime = n_prime.unwrap_or(dist.mipl as u64);
            let model = binomial_type_pmf(n_prime);
            Ok(plot_fit(family, vec![n_prime as f64], empirical, &model, total, 0))
        }
        Family::Geometric => Err(Error::InvalidInput("geometric family applies to backlink histograms".into())),
        _ => {
            let (params, model) = moment_model(family, empirical, empirical.len());
            let fitted = params.len();
            Ok(plot_fit(family, params, empirical, &model, total, fitted))
        }
    }
}

/// Power law `y = prefactor * x^exponent` fitted by OLS in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub log_fit: LinearFit,
}

impl PowerLawFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    if let Some(v) = x.iter().chain(y).find(|v| v.is_nan() || **v <= 0.0) {
        return Err(Error::InvalidInput(format!("power-law fit needs positive values, got {v}")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let log_fit = ols_fit(&lx, &ly)?;
    Ok(PowerLawFit { exponent: log_fit.slope, prefactor: log_fit.intercept.exp(), log_fit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cumulativeness {
    High,
    Low,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnologyPoint {
    pub name: String,
    pub n: f64,
    pub id: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub labels: Vec<(String, Cumulativeness)>,
    pub fit: PowerLawFit,
}

/// Relative tolerance under which a point counts as on the fitted line.
const ON_LINE_TOLERANCE: f64 = 1e-9;

/// Fits id against size across technologies with a power law and labels each
/// technology high when its id is at or above the fitted line (points within
/// a relative `1e-9` of the line count as on it).
pub fn classify_relative_cumulativeness(points: &[TechnologyPoint]) -> Result<Classification> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 technologies, got {}", points.len())));
    }
    let x: Vec<f64> = points.iter().map(|p| p.n).collect();
    let y: Vec<f64> = points.iter().map(|p| p.id).collect();
    let fit = power_law_fit(&x, &y)?;
    let labels = points
        .iter()
        .map(|p| {
            let line = fit.predict(p.n);
            let label = if p.id >= line * (1.0 - ON_LINE_TOLERANCE) {
                Cumulativeness::High
            } else {
                Cumulativeness::Low
            };
            (p.name.clone(), label)
        })
        .collect();
    Ok(Classification { labels, fit })
}

/// Inventions per year over the graph's year span.
pub fn invention_rate(g: &KnowledgeGraph) -> Result<f64> {
    let mut years = g.nodes().iter().map(|node| node.year);
    let (mut lo, mut hi) = (i32::MAX, i32::MIN);
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    for y in &mut years {
        let y = y.ok_or_else(|| Error::InvalidInput("invention rate needs a year on every node".into()))?;
        lo = lo.min(y);
        hi = hi.max(y);
    }
    Ok(g.node_count() as f64 / (hi - lo + 1) as f64)
}
