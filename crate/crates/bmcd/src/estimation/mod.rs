//! Parameter estimation for the spell-duration families.
//!
//! Dry spells: the hurdle mass is the empirical frequency of one-day
//! spells, and (kappa, sigma, xi) come from probability-weighted moments
//! on the shifted sample {tau - 2 : tau >= 2}. Wet spells: EM for the
//! geometric mixture. Both regimes also get the geometric
//! maximum-likelihood baseline p = 1/mean.

mod em;
mod pwm;

pub use em::{em_fit_geommix, em_single_run, geommix_loglik, EmOptions};
pub use pwm::{empirical_pwms, model_pwms, pwm_fit_egpd, PwmOptions};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::GeometricParams;

#[derive(Debug, Error, PartialEq)]
pub enum EstimationError {
    #[error("empty sample")]
    EmptySample,
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

/// Convergence record attached to every fit. `objective` is the PWM
/// moment-matching residual or the EM log-likelihood, depending on the
/// family; a fit that ends on the xi clamp is flagged rather than hidden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    pub restart_index: usize,
    pub xi_clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult<P> {
    pub params: P,
    pub n_obs: usize,
    pub diagnostics: FitDiagnostics,
}

/// Empirical probability of a one-day spell.
pub fn estimate_f1(durations: &[u32]) -> Result<f64, EstimationError> {
    if durations.is_empty() {
        return Err(EstimationError::EmptySample);
    }
    let ones = durations.iter().filter(|&&d| d == 1).count();
    Ok(ones as f64 / durations.len() as f64)
}

/// Maximum likelihood for the duration-valued geometric: p = 1/mean.
pub fn fit_geometric(durations: &[u32]) -> Result<GeometricParams, EstimationError> {
    if durations.is_empty() {
        return Err(EstimationError::EmptySample);
    }
    assert!(durations.iter().all(|&d| d >= 1), "durations start at 1");
    let mean = durations.iter().map(|&d| d as f64).sum::<f64>() / durations.len() as f64;
    Ok(GeometricParams { p: 1.0 / mean })
}
