//! Parametric-bootstrap Q-Q envelopes.
//!
//! B samples of the recorded size are simulated from the fitted law
//! (parameters held fixed), sorted, and per-rank alpha/2 and 1-alpha/2
//! empirical quantiles across replicates form a pointwise (1-alpha)
//! envelope for each order statistic.

use serde::{Deserialize, Serialize};

use crate::distributions::DurationDistribution;
use crate::seeding::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    /// 1-based rank.
    pub rank: u32,
    pub recorded: u32,
    pub lower: u32,
    pub upper: u32,
    /// Median simulated order statistic, the plotted counterpart.
    pub median: u32,
    /// Number of ranks sharing this (recorded, median) pair; rendering
    /// scales point area by its square root.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqEnvelope {
    pub points: Vec<QqPoint>,
    pub replicates: u32,
    pub alpha: f64,
}

// Lower empirical p-quantile of a sorted sample: order statistic at rank
// ceil(p B), clamped into 1..=B.
fn quantile_index(p: f64, b: usize) -> usize {
    ((p * b as f64).ceil() as usize).clamp(1, b) - 1
}

/// Build the envelope for `recorded` against the fitted `dist`.
pub fn qq_envelope<D: DurationDistribution>(
    recorded: &[u32],
    dist: &D,
    replicates: u32,
    alpha: f64,
    seed: u64,
) -> QqEnvelope {
    assert!(replicates >= 1);
    assert!(alpha > 0.0 && alpha < 1.0);
    let n = recorded.len();
    let b = replicates as usize;
    let mut sorted_recorded = recorded.to_vec();
    sorted_recorded.sort_unstable();

    // columns[k] collects the k-th order statistic across replicates
    let mut columns: Vec<Vec<u32>> = vec![Vec::with_capacity(b); n];
    let mut rng = rng_from_seed(seed);
    for _ in 0..b {
        let mut sample: Vec<u32> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        sample.sort_unstable();
        for (k, v) in sample.into_iter().enumerate() {
            columns[k].push(v);
        }
    }

    let lo_idx = quantile_index(alpha / 2.0, b);
    let hi_idx = quantile_index(1.0 - alpha / 2.0, b);
    let med_idx = quantile_index(0.5, b);
    let mut points: Vec<QqPoint> = Vec::with_capacity(n);
    for (k, col) in columns.iter_mut().enumerate() {
        col.sort_unstable();
        points.push(QqPoint {
            rank: (k + 1) as u32,
            recorded: sorted_recorded[k],
            lower: col[lo_idx],
            upper: col[hi_idx],
            median: col[med_idx],
            multiplicity: 1,
        });
    }

    // multiplicity of identical (recorded, median) pairs
    let mut k = 0;
    while k < points.len() {
        let mut j = k;
        while j < points.len()
            && points[j].recorded == points[k].recorded
            && points[j].median == points[k].median
        {
            j += 1;
        }
        let mult = (j - k) as u32;
        for p in &mut points[k..j] {
            p.multiplicity = mult;
        }
        k = j;
    }

    QqEnvelope { points, replicates, alpha }
}
