//! C ABI over the bmcd library: plain-old-data parameter structs, an
//! opaque station model handle for simulation and risk metrics, and
//! integer status codes. Every entry point catches panics and returns
//! `BMCD_STATUS_INTERNAL_ERROR` instead of unwinding across the boundary.
//!
//! The generated header lives at `include/bmcd.h`.

use std::panic::{catch_unwind, AssertUnwindSafe};

use bmcd::chain::{exit_probs_from_distribution, simulate_chain, DistExit, Regime};
use bmcd::diagnostics::{gof_test, DMaxRule, GofError};
use bmcd::distributions::{
    DurationDistribution, GeomMixParams, GeometricParams, HdeGpdParams,
};
use bmcd::estimation::{
    em_fit_geommix, estimate_f1, fit_geometric, pwm_fit_egpd, EmOptions, EstimationError,
    PwmOptions,
};
use bmcd::risk::{mean_residual_hdegpd, proportion_time_long_dry, DryModel, RiskError, WetModel};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmcdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientData = 3,
    NonConverged = 4,
    Singular = 5,
    Undefined = 6,
    InternalError = 7,
}

/// Hurdle discretised eGPD dry-spell parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BmcdHdeGpd {
    pub f1: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub xi: f64,
}

/// Two-component geometric mixture wet-spell parameters (p1 >= p2).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BmcdGeomMix {
    pub pi: f64,
    pub p1: f64,
    pub p2: f64,
}

/// Certified interval for a risk metric.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BmcdRiskBound {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub u_used: u64,
}

/// Fit convergence record.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BmcdFitDiagnostics {
    /// 1 when the fit converged, 0 otherwise.
    pub converged: u8,
    pub iterations: usize,
    /// PWM squared residual or EM log-likelihood.
    pub objective: f64,
    pub restart_index: usize,
}

/// Chi-squared goodness-of-fit result.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BmcdGofResult {
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
    pub d_max: u32,
}

/// Opaque handle: a fitted station-season model (dry hdeGPD + wet
/// geometric mixture) ready for simulation and risk evaluation.
pub struct BmcdModel {
    dry: HdeGpdParams,
    wet: GeomMixParams,
    q0: DistExit<HdeGpdParams>,
    q1: DistExit<GeomMixParams>,
}

fn to_hdegpd(p: &BmcdHdeGpd) -> Result<HdeGpdParams, BmcdStatus> {
    HdeGpdParams::new(p.f1, p.kappa, p.sigma, p.xi).map_err(|_| BmcdStatus::InvalidArgument)
}

fn to_geommix(p: &BmcdGeomMix) -> Result<GeomMixParams, BmcdStatus> {
    GeomMixParams::new(p.pi, p.p1, p.p2).map_err(|_| BmcdStatus::InvalidArgument)
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize) -> Result<&'a [T], BmcdStatus> {
    if ptr.is_null() {
        return Err(BmcdStatus::NullPointer);
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn guard<F: FnOnce() -> BmcdStatus>(f: F) -> BmcdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => BmcdStatus::InternalError,
    }
}

fn estimation_status(e: &EstimationError) -> BmcdStatus {
    match e {
        EstimationError::EmptySample => BmcdStatus::InsufficientData,
        EstimationError::InsufficientData { .. } => BmcdStatus::InsufficientData,
    }
}

/// Create a model handle from dry and wet parameters. On success writes an
/// owned pointer into `out`; release it with `bmcd_model_free`.
///
/// # Safety
/// `dry`, `wet` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bmcd_model_new(
    dry: *const BmcdHdeGpd,
    wet: *const BmcdGeomMix,
    out: *mut *mut BmcdModel,
) -> BmcdStatus {
    guard(|| {
        if dry.is_null() || wet.is_null() || out.is_null() {
            return BmcdStatus::NullPointer;
        }
        let dry = match to_hdegpd(&*dry) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let wet = match to_geommix(&*wet) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let model = Box::new(BmcdModel {
            dry,
            wet,
            q0: exit_probs_from_distribution(dry),
            q1: exit_probs_from_distribution(wet),
        });
        *out = Box::into_raw(model);
        BmcdStatus::Ok
    })
}

/// Destroy a model handle. A null pointer is a no-op.
///
/// # Safety
/// `model` must have come from `bmcd_model_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bmcd_model_free(model: *mut BmcdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Simulate `n_steps` days of the chain into `out_states` (0 = dry,
/// 1 = wet), starting a fresh dry spell, reproducibly from `seed`.
///
/// # Safety
/// `out_states` must point to at least `n_steps` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bmcd_model_simulate(
    model: *const BmcdModel,
    n_steps: usize,
    seed: u64,
    out_states: *mut u8,
) -> BmcdStatus {
    guard(|| {
        if model.is_null() || out_states.is_null() {
            return BmcdStatus::NullPointer;
        }
        if n_steps == 0 {
            return BmcdStatus::InvalidArgument;
        }
        let model = &*model;
        let path = simulate_chain(&model.q0, &model.q1, n_steps, seed);
        let out = std::slice::from_raw_parts_mut(out_states, n_steps);
        for (slot, state) in out.iter_mut().zip(&path) {
            *slot = match state.regime {
                Regime::Dry => 0,
                Regime::Wet => 1,
            };
        }
        BmcdStatus::Ok
    })
}

/// Mean residual dry-spell duration after `d` days as a certified bound of
/// width below `precision`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bmcd_model_mean_residual(
    model: *const BmcdModel,
    d: u32,
    precision: f64,
    out: *mut BmcdRiskBound,
) -> BmcdStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return BmcdStatus::NullPointer;
        }
        if !(precision > 0.0) {
            return BmcdStatus::InvalidArgument;
        }
        match mean_residual_hdegpd(&(*model).dry, d, precision) {
            Ok(b) => {
                *out = BmcdRiskBound { lower: b.lower, upper: b.upper, width: b.width, u_used: b.u_used };
                BmcdStatus::Ok
            }
            Err(RiskError::Undefined { .. }) => BmcdStatus::Undefined,
            Err(RiskError::NonConverged { .. }) => BmcdStatus::NonConverged,
        }
    })
}

/// Long-run fraction of days spent in dry spells strictly older than `d`
/// days, as a certified bound.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bmcd_model_proportion_long_dry(
    model: *const BmcdModel,
    d: u32,
    precision: f64,
    out: *mut BmcdRiskBound,
) -> BmcdStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return BmcdStatus::NullPointer;
        }
        if !(precision > 0.0) {
            return BmcdStatus::InvalidArgument;
        }
        let model = &*model;
        match proportion_time_long_dry(
            &DryModel::HdeGpd(model.dry),
            &WetModel::GeomMix(model.wet),
            d,
            precision,
        ) {
            Ok(b) => {
                *out = BmcdRiskBound { lower: b.lower, upper: b.upper, width: b.width, u_used: b.u_used };
                BmcdStatus::Ok
            }
            Err(RiskError::Undefined { .. }) => BmcdStatus::Undefined,
            Err(RiskError::NonConverged { .. }) => BmcdStatus::NonConverged,
        }
    })
}

/// Fit the dry-spell law (empirical hurdle frequency + PWM tail) to
/// durations in days.
///
/// # Safety
/// `durations` must point to `len` readable u32 values; `out_params` and
/// `out_diag` (nullable) must be valid if non-null.
#[no_mangle]
pub unsafe extern "C" fn bmcd_fit_hdegpd(
    durations: *const u32,
    len: usize,
    out_params: *mut BmcdHdeGpd,
    out_diag: *mut BmcdFitDiagnostics,
) -> BmcdStatus {
    guard(|| {
        let sample = match slice_arg(durations, len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        if out_params.is_null() {
            return BmcdStatus::NullPointer;
        }
        if sample.is_empty() || sample.contains(&0) {
            return BmcdStatus::InvalidArgument;
        }
        let f1 = match estimate_f1(sample) {
            Ok(v) => v,
            Err(e) => return estimation_status(&e),
        };
        match pwm_fit_egpd(sample, &PwmOptions::default()) {
            Ok(fit) => {
                *out_params = BmcdHdeGpd {
                    f1,
                    kappa: fit.params.kappa,
                    sigma: fit.params.sigma,
                    xi: fit.params.xi,
                };
                if !out_diag.is_null() {
                    *out_diag = BmcdFitDiagnostics {
                        converged: u8::from(fit.diagnostics.converged),
                        iterations: fit.diagnostics.iterations,
                        objective: fit.diagnostics.objective,
                        restart_index: fit.diagnostics.restart_index,
                    };
                }
                if fit.diagnostics.converged {
                    BmcdStatus::Ok
                } else {
                    BmcdStatus::NonConverged
                }
            }
            Err(e) => estimation_status(&e),
        }
    })
}

/// Fit the wet-spell geometric mixture by EM with restarts.
///
/// # Safety
/// Pointer arguments as in `bmcd_fit_hdegpd`.
#[no_mangle]
pub unsafe extern "C" fn bmcd_fit_geommix(
    durations: *const u32,
    len: usize,
    seed: u64,
    out_params: *mut BmcdGeomMix,
    out_diag: *mut BmcdFitDiagnostics,
) -> BmcdStatus {
    guard(|| {
        let sample = match slice_arg(durations, len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        if out_params.is_null() {
            return BmcdStatus::NullPointer;
        }
        if sample.is_empty() || sample.contains(&0) {
            return BmcdStatus::InvalidArgument;
        }
        match em_fit_geommix(sample, &EmOptions::default(), seed) {
            Ok(fit) => {
                *out_params = BmcdGeomMix {
                    pi: fit.params.pi,
                    p1: fit.params.p1,
                    p2: fit.params.p2,
                };
                if !out_diag.is_null() {
                    *out_diag = BmcdFitDiagnostics {
                        converged: u8::from(fit.diagnostics.converged),
                        iterations: fit.diagnostics.iterations,
                        objective: fit.diagnostics.objective,
                        restart_index: fit.diagnostics.restart_index,
                    };
                }
                if fit.diagnostics.converged {
                    BmcdStatus::Ok
                } else {
                    BmcdStatus::NonConverged
                }
            }
            Err(e) => estimation_status(&e),
        }
    })
}

/// Maximum-likelihood geometric fit: p = 1/mean.
///
/// # Safety
/// `durations` must point to `len` readable values; `out_p` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bmcd_fit_geometric(
    durations: *const u32,
    len: usize,
    out_p: *mut f64,
) -> BmcdStatus {
    guard(|| {
        let sample = match slice_arg(durations, len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        if out_p.is_null() {
            return BmcdStatus::NullPointer;
        }
        if sample.is_empty() || sample.contains(&0) {
            return BmcdStatus::InvalidArgument;
        }
        match fit_geometric(sample) {
            Ok(g) => {
                *out_p = g.p;
                BmcdStatus::Ok
            }
            Err(e) => estimation_status(&e),
        }
    })
}

fn gof_status(e: &GofError) -> BmcdStatus {
    match e {
        GofError::InsufficientData { .. } => BmcdStatus::InsufficientData,
        GofError::Singular { .. } => BmcdStatus::Singular,
    }
}

/// Chi-squared goodness-of-fit of dry durations against an hdeGPD law.
/// `d_max` = 0 selects the adaptive depth cut.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn bmcd_gof_hdegpd(
    durations: *const u32,
    len: usize,
    params: *const BmcdHdeGpd,
    d_max: u32,
    min_tail_count: u64,
    out: *mut BmcdGofResult,
) -> BmcdStatus {
    guard(|| {
        let sample = match slice_arg(durations, len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        if params.is_null() || out.is_null() {
            return BmcdStatus::NullPointer;
        }
        let law = match to_hdegpd(&*params) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let rule = if d_max == 0 { DMaxRule::Auto } else { DMaxRule::Fixed(d_max) };
        match gof_test(sample, &law, rule, min_tail_count) {
            Ok(r) => {
                *out = BmcdGofResult {
                    statistic: r.statistic,
                    dof: r.dof,
                    p_value: r.p_value,
                    d_max: r.d_max,
                };
                BmcdStatus::Ok
            }
            Err(e) => gof_status(&e),
        }
    })
}

/// Chi-squared goodness-of-fit of durations against a geometric law.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn bmcd_gof_geometric(
    durations: *const u32,
    len: usize,
    p: f64,
    d_max: u32,
    min_tail_count: u64,
    out: *mut BmcdGofResult,
) -> BmcdStatus {
    guard(|| {
        let sample = match slice_arg(durations, len) {
            Ok(s) => s,
            Err(status) => return status,
        };
        if out.is_null() {
            return BmcdStatus::NullPointer;
        }
        let law = match GeometricParams::new(p) {
            Ok(g) => g,
            Err(_) => return BmcdStatus::InvalidArgument,
        };
        let rule = if d_max == 0 { DMaxRule::Auto } else { DMaxRule::Fixed(d_max) };
        match gof_test(sample, &law, rule, min_tail_count) {
            Ok(r) => {
                *out = BmcdGofResult {
                    statistic: r.statistic,
                    dof: r.dof,
                    p_value: r.p_value,
                    d_max: r.d_max,
                };
                BmcdStatus::Ok
            }
            Err(e) => gof_status(&e),
        }
    })
}

/// Probability mass of the hdeGPD law at duration `d` (days >= 1);
/// NaN on invalid parameters.
#[no_mangle]
pub extern "C" fn bmcd_hdegpd_pmf(params: BmcdHdeGpd, d: u32) -> f64 {
    match (to_hdegpd(&params), d) {
        (_, 0) => f64::NAN,
        (Ok(p), d) => p.pmf(d),
        (Err(_), _) => f64::NAN,
    }
}

/// Survival P(tau > d) of the hdeGPD law; NaN on invalid parameters.
#[no_mangle]
pub extern "C" fn bmcd_hdegpd_survival(params: BmcdHdeGpd, d: u32) -> f64 {
    match to_hdegpd(&params) {
        Ok(p) => p.survival(d),
        Err(_) => f64::NAN,
    }
}

/// Probability mass of the geometric-mixture law at duration `d`.
#[no_mangle]
pub extern "C" fn bmcd_geommix_pmf(params: BmcdGeomMix, d: u32) -> f64 {
    match (to_geommix(&params), d) {
        (_, 0) => f64::NAN,
        (Ok(p), d) => p.pmf(d),
        (Err(_), _) => f64::NAN,
    }
}

/// Survival P(tau > d) of the geometric-mixture law.
#[no_mangle]
pub extern "C" fn bmcd_geommix_survival(params: BmcdGeomMix, d: u32) -> f64 {
    match to_geommix(&params) {
        Ok(p) => p.survival(d),
        Err(_) => f64::NAN,
    }
}
