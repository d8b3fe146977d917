//! Model validation: exit-probability curves, the chi-squared
//! goodness-of-fit test on exit probabilities, pooled bivariate
//! spell-duration autocorrelation, and bootstrap Q-Q envelopes.

mod acf;
mod gof;
mod qq;

pub use acf::{acf_bivariate, AcfError, AcfLag, AcfMatrix};
pub use gof::{gof_test, DMaxRule, GofError, GofResult};
pub use qq::{qq_envelope, QqEnvelope, QqPoint};

use serde::{Deserialize, Serialize};

use crate::chain::{exit_probs_from_distribution, ExitSequence};
use crate::distributions::DurationDistribution;

/// Exit-probability comparison over d = 1..=d_max: the model-implied
/// curve, the empirical estimator, a binomial standard deviation per day,
/// and the spell counts N(d) = #{tau >= d} behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitCurve {
    pub d_max: u32,
    /// N(d) for d = 1..=d_max.
    pub counts: Vec<u64>,
    /// Model-implied q_d; None where the model puts no mass at depth d.
    pub q_model: Vec<Option<f64>>,
    /// Empirical q_d = (N(d) - N(d+1))/N(d); None where N(d) = 0.
    pub q_emp: Vec<Option<f64>>,
    /// Binomial band sqrt(q (1-q) / N(d)) around the model curve.
    pub band_sd: Vec<Option<f64>>,
}

/// Counts N(d) = #{tau_k >= d} for d = 1..=d_max.
pub fn tail_counts(durations: &[u32], d_max: u32) -> Vec<u64> {
    let mut counts = vec![0u64; d_max as usize];
    for &t in durations {
        let top = t.min(d_max);
        for d in 1..=top {
            counts[(d - 1) as usize] += 1;
        }
    }
    counts
}

/// Empirical exit probabilities from recorded durations.
pub fn empirical_exit_probs(durations: &[u32], d_max: u32) -> ExitCurve {
    assert!(d_max >= 1);
    let counts = tail_counts(durations, d_max);
    let n_at = |d: u32| -> u64 {
        if d <= d_max {
            counts[(d - 1) as usize]
        } else {
            durations.iter().filter(|&&t| t >= d).count() as u64
        }
    };
    let mut q_emp = Vec::with_capacity(d_max as usize);
    for d in 1..=d_max {
        let n_d = n_at(d);
        if n_d == 0 {
            q_emp.push(None);
        } else {
            let n_next = n_at(d + 1);
            q_emp.push(Some((n_d - n_next) as f64 / n_d as f64));
        }
    }
    ExitCurve {
        d_max,
        counts,
        q_model: vec![None; d_max as usize],
        q_emp,
        band_sd: vec![None; d_max as usize],
    }
}

/// Model-implied exit probabilities over d = 1..=d_max.
pub fn model_exit_probs<D: DurationDistribution + Clone>(dist: &D, d_max: u32) -> Vec<f64> {
    let q = exit_probs_from_distribution(dist.clone());
    (1..=d_max).map(|d| q.q(d)).collect()
}

/// Full exit-curve comparison: empirical + model + binomial bands.
pub fn exit_curve<D: DurationDistribution + Clone>(
    durations: &[u32],
    dist: &D,
    d_max: u32,
) -> ExitCurve {
    let mut curve = empirical_exit_probs(durations, d_max);
    let model = model_exit_probs(dist, d_max);
    for (i, q) in model.into_iter().enumerate() {
        curve.q_model[i] = Some(q);
        let n = curve.counts[i];
        if n > 0 {
            curve.band_sd[i] = Some((q * (1.0 - q) / n as f64).sqrt());
        }
    }
    curve
}
