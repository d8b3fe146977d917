//! EM for the two-component geometric mixture.
//!
//! E-step responsibilities and M-step updates are in closed form; the
//! responsibilities are computed in the log domain so very long durations
//! do not underflow. Random restarts guard against local maxima, and the
//! winning components are relabelled so p1 >= p2.

use rand::RngExt;

use crate::distributions::GeomMixParams;
use crate::seeding::rng_from_seed;

use super::{EstimationError, FitDiagnostics, FitResult};

#[derive(Debug, Clone, Copy)]
pub struct EmOptions {
    pub n_restarts: usize,
    /// Stop when the relative log-likelihood increment drops below this.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self { n_restarts: 10, rel_tol: 1e-6, max_iter: 500 }
    }
}

// log pmf of geometric(p) at d, safe at p = 1.
fn geom_log_pmf(p: f64, d: u32) -> f64 {
    if d == 1 {
        p.ln()
    } else {
        p.ln() + (d - 1) as f64 * (-p).ln_1p()
    }
}

/// Observed-data log-likelihood of the mixture.
pub fn geommix_loglik(params: &GeomMixParams, data: &[u32]) -> f64 {
    let lp = params.pi.ln();
    let lq = (1.0 - params.pi).ln();
    data.iter()
        .map(|&d| {
            let a = lp + geom_log_pmf(params.p1, d);
            let b = lq + geom_log_pmf(params.p2, d);
            log_sum_exp(a, b)
        })
        .sum()
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// One EM run from a given start. Returns the final parameters (not yet
/// relabelled) and the log-likelihood trace, one entry per iteration.
pub fn em_single_run(
    data: &[u32],
    start: (f64, f64, f64),
    rel_tol: f64,
    max_iter: usize,
) -> ((f64, f64, f64), Vec<f64>) {
    let n = data.len() as f64;
    let (mut pi, mut p1, mut p2) = start;
    let mut trace = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;
    for _ in 0..max_iter {
        // E-step: w_k = P(component 1 | d_k), in the log domain.
        let l_pi = pi.ln();
        let l_qi = (1.0 - pi).ln();
        let mut sum_w = 0.0;
        let mut sum_wd = 0.0;
        let mut sum_v = 0.0;
        let mut sum_vd = 0.0;
        let mut ll = 0.0;
        for &d in data {
            let a = l_pi + geom_log_pmf(p1, d);
            let b = l_qi + geom_log_pmf(p2, d);
            let denom = log_sum_exp(a, b);
            ll += denom;
            let w = if denom == f64::NEG_INFINITY { 0.5 } else { (a - denom).exp() };
            let v = 1.0 - w;
            sum_w += w;
            sum_wd += w * d as f64;
            sum_v += v;
            sum_vd += v * d as f64;
        }
        trace.push(ll);

        // M-step closed-form updates, guarding empty components.
        pi = (sum_w / n).clamp(0.0, 1.0);
        if sum_w > 1e-12 {
            p1 = (sum_w / sum_wd).clamp(1e-12, 1.0);
        }
        if sum_v > 1e-12 {
            p2 = (sum_v / sum_vd).clamp(1e-12, 1.0);
        }
        pi = pi.clamp(1e-12, 1.0 - 1e-12);

        if prev_ll.is_finite() {
            let rel = (ll - prev_ll) / prev_ll.abs().max(1e-300);
            if rel.abs() < rel_tol {
                break;
            }
        }
        prev_ll = ll;
    }
    ((pi, p1, p2), trace)
}

/// Fit the geometric mixture by EM with random restarts; best run by final
/// log-likelihood, components relabelled so p1 >= p2.
pub fn em_fit_geommix(
    data: &[u32],
    opts: &EmOptions,
    seed: u64,
) -> Result<FitResult<GeomMixParams>, EstimationError> {
    if data.is_empty() {
        return Err(EstimationError::EmptySample);
    }
    assert!(data.iter().all(|&d| d >= 1), "durations start at 1");
    let mut rng = rng_from_seed(seed);

    let mut best: Option<(f64, (f64, f64, f64), usize, usize, bool)> = None;
    for restart in 0..opts.n_restarts.max(1) {
        let pi0: f64 = rng.random_range(0.1..0.9);
        let a: f64 = rng.random_range(0.05..0.95);
        let b: f64 = rng.random_range(0.05..0.95);
        let (p1_0, p2_0) = if a >= b { (a, b) } else { (b, a) };
        let ((pi, p1, p2), trace) =
            em_single_run(data, (pi0, p1_0, p2_0), opts.rel_tol, opts.max_iter);
        let ll = *trace.last().unwrap();
        let converged = trace.len() < opts.max_iter;
        if best.as_ref().is_none_or(|(b_ll, ..)| ll > *b_ll) {
            best = Some((ll, (pi, p1, p2), restart, trace.len(), converged));
        }
    }
    let (ll, (pi, p1, p2), restart_index, iterations, converged) = best.unwrap();

    // relabel so p1 >= p2
    let (pi, p1, p2) = if p1 >= p2 { (pi, p1, p2) } else { (1.0 - pi, p2, p1) };
    let params = GeomMixParams { pi, p1, p2 };
    Ok(FitResult {
        params,
        n_obs: data.len(),
        diagnostics: FitDiagnostics {
            converged,
            iterations,
            objective: ll,
            restart_index,
            xi_clamped: false,
        },
    })
}
