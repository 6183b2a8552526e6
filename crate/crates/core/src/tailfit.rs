//! Power-law tail exponents by maximum likelihood (Hill estimator).
//!
//! Exponents use the cumulative convention `P(X ≥ x) ∝ x^(−μ)`; the density
//! exponent is `μ + 1`.

use crate::error::{Error, Result};
use crate::metrics::lower_quantile;

pub const EXPONENT_CONVENTION: &str = "cumulative: P(X >= x) ~ x^-mu (density exponent mu+1)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub mu_hat: f64,
    pub std_error: f64,
    pub cutoff: f64,
    pub tail_count: usize,
}

impl TailFit {
    /// Whether `mu` lies within `k` standard errors of the estimate.
    pub fn covers(&self, mu: f64, k: f64) -> bool {
        (self.mu_hat - mu).abs() <= k * self.std_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffStrategy {
    /// Empirical `q`-quantile of the positive samples.
    FixedQuantile(f64),
    /// Half a unit below the empirical `q`-quantile. For integer-valued data
    /// (degrees) this places the threshold between attainable values, which
    /// removes most of the discreteness bias of the continuous estimator.
    DiscreteQuantile(f64),
    Explicit(f64),
}

impl Default for CutoffStrategy {
    fn default() -> Self {
        CutoffStrategy::FixedQuantile(0.5)
    }
}

/// Resolve a cutoff strategy against a sample.
///
/// Quantiles use the lower convention: the smallest sample with at least
/// `q·n` samples at or below it (so the median of 1..=100 is 50).
pub fn select_cutoff(values: &[f64], strategy: CutoffStrategy) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("cutoff selection on no samples"));
    }
    let quantile = |q: f64| -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid(format!("cutoff quantile must be in (0, 1), got {q}")));
        }
        let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0 && v.is_finite()).collect();
        if positive.is_empty() {
            return Err(Error::Empty("cutoff selection on no positive samples"));
        }
        Ok(lower_quantile(&positive, q))
    };
    let cutoff = match strategy {
        CutoffStrategy::Explicit(x) => x,
        CutoffStrategy::FixedQuantile(q) => quantile(q)?,
        CutoffStrategy::DiscreteQuantile(q) => quantile(q)? - 0.5,
    };
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::invalid(format!("cutoff must be positive, got {cutoff}")));
    }
    Ok(cutoff)
}

/// Hill estimate over the samples at or above `cutoff`:
/// `μ = n_tail / Σ ln(x / cutoff)`, standard error `μ / √n_tail`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn hill_fit(values: &[f64], cutoff: f64) -> Result<TailFit> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::invalid(format!("cutoff must be positive, got {cutoff}")));
    }
    if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!("tail samples must be positive, got {bad}")));
    }
    let (count, log_sum) = values
        .iter()
        .filter(|&&x| x >= cutoff)
        .fold((0usize, 0.0f64), |(n, s), &x| (n + 1, s + (x / cutoff).ln()));
    if count < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 samples at or above cutoff {cutoff}, got {count}"
        )));
    }
    if log_sum <= 0.0 {
        return Err(Error::undefined("tail samples all equal the cutoff; exponent diverges"));
    }
    let mu_hat = count as f64 / log_sum;
    Ok(TailFit {
        mu_hat,
        std_error: mu_hat / (count as f64).sqrt(),
        cutoff,
        tail_count: count,
    })
}

pub fn fit_tail(values: &[f64], strategy: CutoffStrategy) -> Result<TailFit> {
    hill_fit(values, select_cutoff(values, strategy)?)
}
