use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Significance {
    /// Two-sided p-value from a Student-t test with N−2 degrees of freedom.
    PValue(f64),
    /// Coefficient divided by its standard deviation under the no-association
    /// null (no-ties variance).
    Sigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub coefficient: f64,
    pub significance: Significance,
    pub sample_count: usize,
}

impl CorrelationResult {
    pub fn p_value(&self) -> Option<f64> {
        match self.significance {
            Significance::PValue(p) => Some(p),
            Significance::Sigma(_) => None,
        }
    }

    pub fn sigma_multiple(&self) -> Option<f64> {
        match self.significance {
            Significance::Sigma(s) => Some(s),
            Significance::PValue(_) => None,
        }
    }
}

fn check_pair(xs: &[f64], ys: &[f64], min_len: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", xs.len(), ys.len())));
    }
    if xs.len() < min_len {
        return Err(Error::invalid(format!(
            "need at least {min_len} samples, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite sample"));
    }
    Ok(())
}

struct Moments {
    mean_x: f64,
    mean_y: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

fn moments(xs: &[f64], ys: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Moments {
        mean_x,
        mean_y,
        sxx,
        syy,
        sxy,
    }
}

/// Sample Pearson coefficient with a two-sided t-test p-value.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult> {
    check_pair(xs, ys, 3)?;
    let m = moments(xs, ys);
    if m.sxx == 0.0 || m.syy == 0.0 {
        return Err(Error::undefined("correlation of a constant sample"));
    }
    let r = (m.sxy / (m.sxx.sqrt() * m.syy.sqrt())).clamp(-1.0, 1.0);
    let n = xs.len();
    let dof = (n - 2) as f64;
    let one_minus = 1.0 - r * r;
    let p = if one_minus <= 0.0 {
        0.0
    } else {
        let t = r * (dof / one_minus).sqrt();
        let dist = StudentsT::new(0.0, 1.0, dof).expect("positive degrees of freedom");
        (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
    };
    Ok(CorrelationResult {
        coefficient: r,
        significance: Significance::PValue(p),
        sample_count: n,
    })
}

/// Kendall's tau-b with a no-ties null sigma multiple.
///
/// O(n log n): sort by `(x, y)`, count tie groups, then count discordant
/// pairs as merge-sort exchanges on `y`.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult> {
    check_pair(xs, ys, 2)?;
    let n = xs.len();
    let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let tie_pairs = |len: u64| len * (len.saturating_sub(1)) / 2;
    let (mut x_ties, mut joint_ties) = (0u64, 0u64);
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            run_x += 1;
            if w[0].1 == w[1].1 {
                run_xy += 1;
            } else {
                joint_ties += tie_pairs(run_xy);
                run_xy = 1;
            }
        } else {
            x_ties += tie_pairs(run_x);
            joint_ties += tie_pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    x_ties += tie_pairs(run_x);
    joint_ties += tie_pairs(run_xy);

    let mut y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut y, &mut buf);

    let mut y_ties = 0u64;
    let mut run_y = 1u64;
    for w in y.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            y_ties += tie_pairs(run_y);
            run_y = 1;
        }
    }
    y_ties += tie_pairs(run_y);

    let total = tie_pairs(n as u64);
    if x_ties == total || y_ties == total {
        return Err(Error::undefined("rank correlation of an all-tied sample"));
    }
    // concordant − discordant = total − x_ties − y_ties + joint_ties − 2·swaps
    let numerator = total as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * swaps as f64;
    let denominator = ((total - x_ties) as f64).sqrt() * ((total - y_ties) as f64).sqrt();
    let tau = (numerator / denominator).clamp(-1.0, 1.0);

    let nf = n as f64;
    let null_sd = (2.0 * (2.0 * nf + 5.0) / (9.0 * nf * (nf - 1.0))).sqrt();
    Ok(CorrelationResult {
        coefficient: tau,
        significance: Significance::Sigma(tau / null_sd),
        sample_count: n,
    })
}

/// Stable merge sort returning the number of inversions (strictly greater
/// element placed before a smaller one).
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + (n - j)].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub correlation_r: f64,
    pub sample_count: usize,
}

/// Ordinary least squares fit `y = slope·x + intercept`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<RegressionResult> {
    check_pair(xs, ys, 3)?;
    let m = moments(xs, ys);
    if m.sxx == 0.0 {
        return Err(Error::undefined("regression on a constant regressor"));
    }
    if m.syy == 0.0 {
        return Err(Error::undefined("correlation of a constant response"));
    }
    let slope = m.sxy / m.sxx;
    Ok(RegressionResult {
        slope,
        intercept: m.mean_y - slope * m.mean_x,
        correlation_r: (m.sxy / (m.sxx.sqrt() * m.syy.sqrt())).clamp(-1.0, 1.0),
        sample_count: xs.len(),
    })
}
