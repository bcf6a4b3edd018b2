//! Wilcoxon signed-rank test.
//!
//! Differences `a − b` equal to zero are discarded and tied absolute values
//! share the average of their ranks. The two-sided p-value is
//! `P(|W⁺ − E W⁺| ≥ |w⁺ − E W⁺|)` under the null hypothesis that every sign
//! is equally likely. Up to [`EXACT_LIMIT`] nonzero differences it is computed
//! exactly from the distribution of `W⁺` over all `2^n` sign patterns; beyond
//! that a normal approximation with tie-corrected variance
//! `n(n+1)(2n+1)/24 − Σ(t³ − t)/48` and continuity correction `0.5` is used.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest number of nonzero differences handled exactly.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
}

impl fmt::Display for WilcoxonMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WilcoxonMethod::Exact => "exact",
            WilcoxonMethod::NormalApprox => "normal",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    pub w_plus: f64,
    pub w_minus: f64,
    pub n_effective: usize,
    pub p_value: f64,
    pub method: WilcoxonMethod,
    /// No nonzero differences; `p_value` is 1.
    pub degenerate: bool,
}

/// Average ranks of `|d|` (1-based) for the nonzero entries of `d`, paired
/// with the sign of each difference.
pub fn signed_ranks(d: &[f64]) -> Vec<(f64, bool)> {
    let mut nz: Vec<f64> = d.iter().copied().filter(|&v| v != 0.0).collect();
    nz.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    let mut out = Vec::with_capacity(nz.len());
    let mut i = 0;
    while i < nz.len() {
        let mut j = i;
        while j + 1 < nz.len() && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        let rank = (i + j + 2) as f64 / 2.0;
        for v in &nz[i..=j] {
            out.push((rank, *v > 0.0));
        }
        i = j + 1;
    }
    out
}

/// Exact two-sided p-value of `w_plus` given the (possibly tied) ranks.
///
/// Average ranks are multiples of one half, so doubled ranks are integers
/// and the null distribution is a subset-sum count over them.
pub fn exact_p_value(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let observed = ((2.0 * w_plus).round() as i64 * 2 - total as i64).abs();
    let extreme: f64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as i64 - total as i64).abs() >= observed)
        .map(|(_, c)| c)
        .sum();
    (extreme / 2f64.powi(ranks.len() as i32)).min(1.0)
}

/// Normal-approximation two-sided p-value of `w_plus` given the ranks.
pub fn normal_p_value(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let std = Normal::standard();
    (2.0 * (1.0 - std.cdf(z))).min(1.0)
}

/// Test on precomputed differences.
pub fn wilcoxon_differences(d: &[f64]) -> Result<WilcoxonResult> {
    if d.is_empty() {
        return Err(Error::Empty("Wilcoxon test needs at least one pair"));
    }
    if let Some(index) = d.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let sr = signed_ranks(d);
    let n = sr.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            w_plus: 0.0,
            w_minus: 0.0,
            n_effective: 0,
            p_value: 1.0,
            method: WilcoxonMethod::Exact,
            degenerate: true,
        });
    }
    let w_plus: f64 = sr.iter().filter(|(_, pos)| *pos).map(|(r, _)| r).sum();
    let w_minus: f64 = sr.iter().filter(|(_, pos)| !*pos).map(|(r, _)| r).sum();
    let ranks: Vec<f64> = sr.iter().map(|(r, _)| *r).collect();
    let (p_value, method) = if n <= EXACT_LIMIT {
        (exact_p_value(&ranks, w_plus), WilcoxonMethod::Exact)
    } else {
        (normal_p_value(&ranks, w_plus), WilcoxonMethod::NormalApprox)
    };
    Ok(WilcoxonResult {
        w_plus,
        w_minus,
        n_effective: n,
        p_value,
        method,
        degenerate: false,
    })
}

/// Test on paired observations, using differences `a − b`.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<WilcoxonResult> {
    let d: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    wilcoxon_differences(&d)
}
