//! Numeric helpers: log-space arithmetic, big-integer ratios, binomial rows
//! and harmonic numbers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::graph::PathCounts;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest `n` for which [`harmonic`] sums terms exactly.
pub const HARMONIC_EXACT_LIMIT: u64 = 1_000_000;

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `a / b` as a float for arbitrarily large integers with `a <= b`-like
/// magnitudes. Both are shifted to at most 1000 significant bits first.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let shift = b.bits().max(a.bits()).saturating_sub(1000);
    let a = (a >> shift).to_f64().unwrap();
    let b = (b >> shift).to_f64().unwrap();
    a / b
}

pub(crate) fn normalize_counts(counts: &PathCounts) -> Vec<f64> {
    match counts {
        PathCounts::Exact(v) => {
            let total: BigUint = v.iter().sum();
            if total.is_zero() {
                return Vec::new();
            }
            v.iter().map(|c| big_ratio(c, &total)).collect()
        }
        PathCounts::Log(v) => {
            let total = log_sum_exp(v);
            if total == f64::NEG_INFINITY {
                return Vec::new();
            }
            v.iter().map(|l| (l - total).exp()).collect()
        }
    }
}

/// Row `C(n, 0..=n)` of Pascal's triangle, exactly.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for j in 0..n {
        c = c * (n - j) / (j + 1);
        row.push(c.clone());
    }
    row
}

/// `ln C(x, j)` for real `x` and integer `j` with `j < x + 1`.
pub fn ln_binomial(x: f64, j: u64) -> f64 {
    let j = j as f64;
    ln_gamma(x + 1.0) - ln_gamma(j + 1.0) - ln_gamma(x - j + 1.0)
}

/// `ln C(n, 0..=n)`. Exact below 1000 trials; above, the first half is
/// accumulated from term ratios and mirrored.
pub fn ln_binomial_row(n: u64) -> Vec<f64> {
    if n <= 1000 {
        return binomial_row(n).iter().map(ln_biguint).collect();
    }
    let len = n as usize + 1;
    let mut row = vec![0.0; len];
    let x = n as f64;
    let mut acc = 0.0;
    for j in 1..=len / 2 {
        acc += ((x - j as f64 + 1.0) / j as f64).ln();
        row[j] = acc;
        row[len - 1 - j] = acc;
    }
    row
}

/// The `n`-th harmonic number. Summed exactly up to
/// [`HARMONIC_EXACT_LIMIT`], asymptotic `ln n + gamma + 1/(2n)` beyond.
pub fn harmonic(n: u64) -> f64 {
    if n <= HARMONIC_EXACT_LIMIT {
        // smallest terms first
        (1..=n).rev().map(|i| 1.0 / i as f64).sum()
    } else {
        let x = n as f64;
        x.ln() + EULER_GAMMA + 0.5 / x
    }
}

/// Harmonic number of a real argument, `digamma(x + 1) + gamma`.
pub fn harmonic_real(x: f64) -> f64 {
    digamma(x + 1.0) + EULER_GAMMA
}

/// Pearson correlation. `None` when either side has zero variance.
pub fn pearson(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
