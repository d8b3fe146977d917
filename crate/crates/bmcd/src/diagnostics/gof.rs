//! Chi-squared goodness-of-fit test on exit probabilities.
//!
//! Under the fitted law, the vector of empirical exit probabilities over
//! d = 1..d_max-1 is asymptotically Gaussian with covariance
//! T Sigma T^T / N, where Sigma_ij = Fbar(max(i,j)) - Fbar(i) Fbar(j) and
//! T is the (sparse, bidiagonal) delta-method Jacobian. The statistic
//!
//!   Q = N Delta^T (T Sigma T^T)^(-1) Delta
//!
//! is asymptotically chi-squared with d_max - 1 degrees of freedom.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::DurationDistribution;
use crate::linalg::{quadratic_form, Matrix};
use crate::special::chi2_survival;

use super::tail_counts;

#[derive(Debug, Error, PartialEq)]
pub enum GofError {
    #[error("insufficient data: {reason}")]
    InsufficientData { reason: String },
    #[error("T Sigma T^T is numerically singular (condition {condition:.3e})")]
    Singular { condition: f64 },
}

/// How to pick the depth cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DMaxRule {
    /// Largest d with N(d) >= min_tail_count, floored at 3.
    Auto,
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
    pub d_max: u32,
    /// Condition estimate of T Sigma T^T; the test refuses above 1e12.
    pub condition: f64,
}

pub const CONDITION_LIMIT: f64 = 1e12;

/// Run the test of `durations` against a fitted duration law.
pub fn gof_test<D: DurationDistribution>(
    durations: &[u32],
    dist: &D,
    d_max: DMaxRule,
    min_tail_count: u64,
) -> Result<GofResult, GofError> {
    let n_spells = durations.len() as u64;
    let d_max = match d_max {
        DMaxRule::Fixed(d) => {
            if d < 2 {
                return Err(GofError::InsufficientData {
                    reason: "d_max must be at least 2".into(),
                });
            }
            d
        }
        DMaxRule::Auto => {
            let mut best = 0u32;
            let far = durations.iter().copied().max().unwrap_or(0);
            let counts = tail_counts(durations, far.max(1));
            for (idx, &c) in counts.iter().enumerate() {
                if c >= min_tail_count {
                    best = idx as u32 + 1;
                }
            }
            best.max(3)
        }
    };
    if n_spells < u64::from(d_max) + 5 {
        return Err(GofError::InsufficientData {
            reason: format!("{n_spells} spells for d_max {d_max}"),
        });
    }

    let counts = tail_counts(durations, d_max);
    let k = (d_max - 1) as usize;
    if counts[k - 1] == 0 {
        return Err(GofError::InsufficientData {
            reason: format!("no spell reaches duration {}", d_max - 1),
        });
    }

    // Delta = empirical minus model exit probabilities on 1..d_max-1.
    let mut delta = vec![0.0; k];
    for d in 1..=k as u32 {
        let n_d = counts[(d - 1) as usize];
        let n_next = if (d as usize) < counts.len() {
            counts[d as usize]
        } else {
            0
        };
        let emp = (n_d - n_next) as f64 / n_d as f64;
        let surv_prev = dist.survival(d - 1);
        let model = if surv_prev > 0.0 {
            (dist.pmf(d) / surv_prev).clamp(0.0, 1.0)
        } else {
            1.0
        };
        delta[(d - 1) as usize] = emp - model;
    }

    // Sigma_ij = Fbar(max(i,j)) - Fbar(i) Fbar(j), i,j = 1..d_max-1.
    let surv: Vec<f64> = (0..=d_max).map(|d| dist.survival(d)).collect();
    let mut sigma = Matrix::zeros(k);
    for i in 1..=k {
        for j in 1..=k {
            let v = surv[i.max(j)] - surv[i] * surv[j];
            sigma.set(i - 1, j - 1, v);
        }
    }

    // T: row 1 is (-1, 0, ...); row i >= 2 has Fbar(i)/Fbar(i-1)^2 at
    // column i-1 and -1/Fbar(i-1) at column i.
    let mut t = Matrix::zeros(k);
    t.set(0, 0, -1.0);
    for i in 2..=k {
        let prev = surv[i - 1];
        t.set(i - 1, i - 2, surv[i] / (prev * prev));
        t.set(i - 1, i - 1, -1.0 / prev);
    }

    let m = t.mul(&sigma).mul_transpose(&t);
    let inv = match m.inverse() {
        Some(inv) => inv,
        None => return Err(GofError::Singular { condition: f64::INFINITY }),
    };
    let condition = m.one_norm() * inv.one_norm();
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(GofError::Singular { condition });
    }

    let statistic = (n_spells as f64 * quadratic_form(&inv, &delta)).max(0.0);
    Ok(GofResult {
        statistic,
        dof: d_max - 1,
        p_value: chi2_survival(statistic, d_max - 1),
        d_max,
        condition,
    })
}
