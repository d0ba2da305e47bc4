//! Closed-form predictions of the growth model.
//!
//! With `<m> = q n + m0` backward links per new invention and a fraction `r`
//! of initial inventions, the expected path counts are
//! `f_k(n) = r q^k C(n, k + 1)`, their total is `r ((1 + q)^n - 1) / q`, and
//! the mean path length grows at rate `p = q / (q + 1)`. Bounding how fast the
//! longest path may grow (`v = 2 p`) turns the normalized law into the
//! binomial-type `C(n', k + 1) / (2^n' - 1)` with `n' = v n`.

use crate::graph::{ModelParams, PathCounts, PathLengthDistribution, RatePredictions};
use crate::numeric::{harmonic, harmonic_real, ln_binomial, ln_binomial_row, log_sum_exp};

/// Expected backward links of an invention arriving at size `n`: `q n + m0`.
pub fn expected_id(n: f64, params: &ModelParams) -> f64 {
    params.q() * n + params.m0()
}

/// `f_k(n) = r q^k C(n, k + 1)` for `k = 0..n`, stored in log space.
pub fn analytic_path_counts(n: u64, params: &ModelParams) -> PathLengthDistribution {
    let ln_c = ln_binomial_row(n);
    let ln_q = params.q().ln();
    let ln_r = params.r().ln();
    let logs: Vec<f64> = (0..n as usize)
        .map(|k| ln_r + k as f64 * ln_q + ln_c[k + 1])
        .collect();
    PathLengthDistribution::from_counts(n as usize, PathCounts::Log(logs))
}

/// Total expected paths `r ((1 + q)^n - 1) / q`.
pub fn total_paths_closed(n: u64, params: &ModelParams) -> f64 {
    let q = params.q();
    params.r() * (n as f64 * q.ln_1p()).exp_m1() / q
}

/// `ln((1 + q)^n - 1)`, accurate for small `q n` and for large `n`.
fn ln_growth_minus_one(n: f64, q: f64) -> f64 {
    let a = n * q.ln_1p();
    if a > 30.0 {
        a + (-(-a).exp()).ln_1p()
    } else {
        a.exp_m1().ln()
    }
}

/// Normalized path-length law `C(n, k+1) q^(k+1) / ((1 + q)^n - 1)`,
/// indexed by `k = 0..n`.
pub fn normalized_path_dist(n: u64, q: f64) -> Vec<f64> {
    let ln_c = ln_binomial_row(n);
    let ln_q = q.ln();
    let ln_norm = ln_growth_minus_one(n as f64, q);
    (0..n as usize)
        .map(|k| (ln_c[k + 1] + (k + 1) as f64 * ln_q - ln_norm).exp())
        .collect()
}

/// Rate `p = q / (q + 1)` at which the mean path length grows.
pub fn ipl_slope(q: f64) -> f64 {
    q / (q + 1.0)
}

/// Data-based correction: `q'_a = (1/n) sum m_i / i` over 1-based ordinals.
/// Returns `(q'_a, p'_a)`.
pub fn corrected_rate_a(backlinks: &[u64]) -> (f64, f64) {
    if backlinks.is_empty() {
        return (0.0, 0.0);
    }
    let n = backlinks.len() as f64;
    let q_a = backlinks
        .iter()
        .enumerate()
        .map(|(i, &m)| m as f64 / (i + 1) as f64)
        .sum::<f64>()
        / n;
    (q_a, ipl_slope(q_a))
}

/// Parameter-based correction: `q'_b = q + m0 H(n) / n`. Returns
/// `(q'_b, p'_b)`.
pub fn corrected_rate_b(q: f64, m0: f64, n: u64) -> (f64, f64) {
    let q_b = q + m0 * harmonic(n) / n as f64;
    (q_b, ipl_slope(q_b))
}

/// Binomial-type law `C(n', k + 1) / (2^n' - 1)` for `k = 0..n'`.
pub fn binomial_path_dist(n_prime: u64) -> Vec<f64> {
    normalized_path_dist(n_prime, 1.0)
}

/// The binomial-type law with `n' = 2 p n`, i.e.
/// `C(2 p n, k + 1) / (4^(p n) - 1)`.
///
/// For a non-integral `2 p n` the binomial coefficient is taken over a real
/// upper argument through log-gamma, on the support where it is positive
/// (`k + 1 <= ceil(2 p n)`), and renormalized over that support. When
/// `2 p n` is integral this is exactly [`binomial_path_dist`].
pub fn binomial_path_dist_np(n: f64, p: f64) -> Vec<f64> {
    let x = 2.0 * p * n;
    let rounded = x.round();
    if (x - rounded).abs() < 1e-9 && rounded >= 1.0 {
        return binomial_path_dist(rounded as u64);
    }
    let top = x.ceil() as u64;
    let logs: Vec<f64> = (1..=top).map(|j| ln_binomial(x, j)).collect();
    let norm = log_sum_exp(&logs);
    logs.iter().map(|l| (l - norm).exp()).collect()
}

/// Maximum speed of the longest path, `v = 2 p`, and the matching interval
/// `delta_n = 1 / v`.
pub fn max_speed(p: f64) -> (f64, f64) {
    let v = 2.0 * p;
    (v, 1.0 / v)
}

/// Expected number of initial inventions after `n` inventions: the exact
/// harmonic-sum form and its logarithmic approximation.
pub fn expected_initial_count(n: u64, params: &ModelParams) -> (f64, f64) {
    let q = params.q();
    let a = params.m1() / q;
    let exact = (harmonic_real(n as f64 + a) - harmonic_real(a)) / q;
    let approx = (q * n as f64 / params.m1()).ln_1p() / q;
    (exact, approx)
}

/// Initial-invention fraction implied by small `q`: `1 / (m0 + 1)`.
pub fn approx_initial_fraction(m0: f64) -> f64 {
    1.0 / (m0 + 1.0)
}

/// All rate predictions for fitted `(q, m0)` and the observed link sequence.
pub fn rate_predictions(q: f64, m0: f64, backlinks: &[u64]) -> RatePredictions {
    let p = ipl_slope(q);
    let (q_prime_a, p_prime_a) = corrected_rate_a(backlinks);
    let (q_prime_b, p_prime_b) = corrected_rate_b(q, m0, backlinks.len().max(1) as u64);
    let (v, delta_n) = max_speed(p);
    RatePredictions { p, q_prime_a, p_prime_a, q_prime_b, p_prime_b, v, delta_n }
}

/// Closed form of the mean of [`normalized_path_dist`]:
/// `n q / (q + 1) / (1 - (1 + q)^-n) - 1`.
pub fn mean_path_length_closed(n: u64, q: f64) -> f64 {
    let n = n as f64;
    n * q / (q + 1.0) / -(-n * q.ln_1p()).exp_m1() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn expected_id_examples() {
        let p = ModelParams::new(0.001, 2.0).unwrap();
        assert!(close(expected_id(1000.0, &p), 2.0, 1e-12));
        assert_eq!(expected_id(0.0, &p), 1.0);
        let table = ModelParams::from_q_m0(0.0006, 0.65).unwrap();
        assert!(close(expected_id(3608.0, &table), 2.8148, 1e-4));
    }

    #[test]
    fn analytic_counts_small() {
        let p = ModelParams::new(0.1, 2.0).unwrap().with_r(0.5).unwrap();
        let d = analytic_path_counts(4, &p);
        let f = d.counts.to_f64_vec();
        for (got, want) in f.iter().zip([2.0, 0.3, 0.02, 0.0005]) {
            assert!(close(*got, want, 1e-14 * want.max(1.0)), "{got} vs {want}");
        }
        assert_eq!(f.len(), 4);
        assert!(close(f.iter().sum::<f64>(), 2.3205, 1e-12));
        assert!(close(total_paths_closed(4, &p), 2.3205, 1e-12));
        assert_eq!(total_paths_closed(0, &p), 0.0);
        // f_0 = r n
        let d = analytic_path_counts(50, &p);
        assert!(close(d.counts.get_f64(0), 25.0, 1e-12));
    }

    #[test]
    fn total_paths_small_q_limit() {
        let p = ModelParams::new(1e-12, 2.0).unwrap().with_r(0.5).unwrap();
        assert!(close(total_paths_closed(100, &p), 50.0, 1e-6));
    }

    #[test]
    fn normalized_examples() {
        let d = normalized_path_dist(2, 1.0);
        assert!(close(d[0], 2.0 / 3.0, 1e-15) && close(d[1], 1.0 / 3.0, 1e-15));
        assert_eq!(normalized_path_dist(1, 0.3), vec![1.0]);
        for (n, q) in [(10, 0.5), (500, 0.002), (5000, 0.01), (20000, 0.0005)] {
            assert!(close(normalized_path_dist(n, q).iter().sum::<f64>(), 1.0, 1e-12));
        }
    }

    #[test]
    fn slope_examples() {
        assert_eq!(ipl_slope(1.0), 0.5);
        assert!(close(ipl_slope(1e-8), 1e-8, 1e-15));
        assert!(close(ipl_slope(0.0014), 0.001398, 5e-7));
    }

    #[test]
    fn corrected_rate_a_examples() {
        // m_i = c i gives q'_a = c
        for c in [1u64, 3] {
            let seq: Vec<u64> = (1..=40).map(|i| c * i).collect();
            let (q_a, p_a) = corrected_rate_a(&seq);
            assert!(close(q_a, c as f64, 1e-14));
            assert!(close(p_a, c as f64 / (c as f64 + 1.0), 1e-14));
        }
        assert_eq!(corrected_rate_a(&[0, 0, 0]), (0.0, 0.0));
    }

    #[test]
    fn corrected_rate_b_table_rows() {
        let rows = [(0.0006, 0.65, 3608, 0.0022), (0.0005, 1.45, 9088, 0.0020), (0.0014, 2.42, 3979, 0.0067)];
        for (q, m0, n, want) in rows {
            let (_, p_b) = corrected_rate_b(q, m0, n);
            assert!(close(p_b, want, 1e-4), "{q} {m0} {n}: {p_b}");
        }
    }

    #[test]
    fn binomial_type() {
        let d = binomial_path_dist(2);
        assert!(close(d[0], 2.0 / 3.0, 1e-15) && close(d[1], 1.0 / 3.0, 1e-15));
        assert_eq!(binomial_path_dist(1), vec![1.0]);
        assert!(close(binomial_path_dist(60).iter().sum::<f64>(), 1.0, 1e-12));
        assert_eq!(binomial_path_dist_np(2.0, 0.5), binomial_path_dist(2));
        assert_eq!(binomial_path_dist_np(10.0, 0.35), binomial_path_dist(7));
        let d = binomial_path_dist_np(10.0, 0.37);
        assert_eq!(d.len(), 8);
        assert!(close(d.iter().sum::<f64>(), 1.0, 1e-12));
    }

    #[test]
    fn np_mode_matches_integer_law() {
        let argmax = |v: &[f64]| v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        let a = argmax(&binomial_path_dist_np(3000.0, 0.003));
        let b = argmax(&binomial_path_dist(18));
        assert!(a.abs_diff(b) <= 1);
        let c = argmax(&binomial_path_dist_np(3000.0, 0.00305));
        assert!(c.abs_diff(b) <= 1);
    }

    #[test]
    fn max_speed_examples() {
        assert_eq!(max_speed(0.5), (1.0, 1.0));
        assert!(close(max_speed(0.0029).0, 0.0058, 1e-15));
        let q = 1e-6;
        assert!(close(max_speed(ipl_slope(q)).1 * 2.0 * q, 1.0, 1e-5));
    }

    #[test]
    fn initial_count() {
        let p = ModelParams::new(1e-5, 2.0).unwrap();
        let (exact, approx) = expected_initial_count(1000, &p);
        assert!(close(approx, 498.75, 0.01));
        assert!((exact - approx).abs() / approx < 0.02);
        assert_eq!(approx_initial_fraction(1.0), 0.5);
    }

    #[test]
    fn initial_count_sweep() {
        // agreement within 2% whenever m1/q > 100
        for &q in &[1e-4, 1e-3, 0.01, 0.019] {
            for &m1 in &[2.0, 3.0, 5.0] {
                if m1 / q <= 100.0 {
                    continue;
                }
                let p = ModelParams::new(q, m1).unwrap();
                for n in [1, 10, 100, 1000, 10_000, 100_000] {
                    let (exact, approx) = expected_initial_count(n, &p);
                    assert!((exact - approx).abs() / exact < 0.02, "q={q} m1={m1} n={n}");
                }
            }
        }
    }

    #[test]
    fn mean_of_normalized_law() {
        for (n, q) in [(5u64, 0.5), (100, 0.01), (1000, 0.002), (200, 1.0)] {
            let d = normalized_path_dist(n, q);
            let mean: f64 = d.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
            assert!(close(mean, mean_path_length_closed(n, q), 1e-9));
        }
    }
}
