//! Influence maximization over sketches.

mod dssa;
mod greedy;

pub use dssa::{dssa, DssaConfig, DssaOutcome, GuaranteeFlag};
pub use greedy::{greedy, GreedySolution};

use statrs::function::gamma::ln_gamma;

use crate::error::{Result, SkisError};

/// `ln C(n, k)` through log-gamma.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let (n, k) = (n as f64, k as f64);
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Constant in front of the sample thresholds, from the upper tail bound.
fn tail_constant(epsilon: f64) -> f64 {
    2.0 + 2.0 * epsilon / 3.0
}

fn check_theta_args(
    n: usize,
    k: usize,
    epsilon: f64,
    delta: f64,
    opt_lower_bound: f64,
) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(SkisError::validation(format!(
            "need 1 <= k <= n (k={k}, n={n})"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(SkisError::validation("epsilon must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SkisError::validation("delta must lie in (0,1)"));
    }
    if !(opt_lower_bound >= k as f64) {
        return Err(SkisError::validation("OPT lower bound must be at least k"));
    }
    Ok(())
}

/// Plain reverse-sample threshold
/// `c · (ln C(n,k) + ln 1/δ) · n / OPT_lb · ε⁻²` with `c = 2 + 2ε/3`.
pub fn theta_ris(
    n: usize,
    k: usize,
    epsilon: f64,
    delta: f64,
    opt_lower_bound: f64,
) -> Result<u64> {
    check_theta_args(n, k, epsilon, delta, opt_lower_bound)?;
    let raw = tail_constant(epsilon)
        * (ln_binomial(n, k) + (1.0 / delta).ln())
        * (n as f64 / opt_lower_bound)
        / (epsilon * epsilon);
    Ok(raw.ceil() as u64)
}

/// Importance-sample threshold: the reverse-sample threshold scaled by
/// `(Γ + k) / n`.
pub fn theta_skis(
    n: usize,
    k: usize,
    epsilon: f64,
    delta: f64,
    gamma_total: f64,
    opt_lower_bound: f64,
) -> Result<u64> {
    check_theta_args(n, k, epsilon, delta, opt_lower_bound)?;
    if !(gamma_total >= 0.0) {
        return Err(SkisError::validation("Gamma must be nonnegative"));
    }
    let raw = (gamma_total + k as f64) / n as f64
        * tail_constant(epsilon)
        * (ln_binomial(n, k) + (1.0 / delta).ln())
        * (n as f64 / opt_lower_bound)
        / (epsilon * epsilon);
    Ok(raw.ceil() as u64)
}
