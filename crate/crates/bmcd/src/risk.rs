//! Extreme-dry-spell risk metrics with certified precision.
//!
//! Both metrics reduce to the expected ceiling E[ceil(X)] of the
//! continuous eGPD behind the dry-spell law, which is bracketed by
//!
//!   L_u <= E[ceil(X)] <= L_u + Fbar_X(u),
//!   L_u  = sum_{m<u} Fbar_X(m) + int_u^inf Fbar_X,
//!
//! with u doubling from 64 until the implied width of the reported ratio
//! beats the requested precision. For xi < 0 the sum has finitely many
//! terms and is exact (width zero). The partial sums run through
//! compensated (Kahan) accumulation: u can reach past 2^20 for heavy
//! tails.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{chain_iter, BmcdState, ExitSequence, Regime};
use crate::distributions::{
    DurationDistribution, GeomMixParams, GeometricParams, HdeGpdParams, TabulatedDuration,
};

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("metric undefined: {reason}")]
    Undefined { reason: String },
    #[error("bounds did not reach the requested width (best width {width})")]
    NonConverged { width: f64 },
}

/// Certified lower/upper interval for a risk metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskBound {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    /// Truncation point of the ceiling-sum bracket.
    pub u_used: u64,
    pub target_precision: f64,
}

impl RiskBound {
    fn new(lower: f64, upper: f64, u_used: u64, target_precision: f64) -> Self {
        Self { lower, upper, width: upper - lower, u_used, target_precision }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower - 1e-12 <= x && x <= self.upper + 1e-12
    }
}

/// Dry-spell model choice for the risk metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DryModel {
    HdeGpd(HdeGpdParams),
    Geometric(GeometricParams),
}

/// Wet-spell model choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WetModel {
    GeomMix(GeomMixParams),
    Geometric(GeometricParams),
}

impl WetModel {
    pub fn mean(&self) -> f64 {
        match self {
            WetModel::GeomMix(p) => p.pi / p.p1 + (1.0 - p.pi) / p.p2,
            WetModel::Geometric(p) => 1.0 / p.p,
        }
    }
}

const U_START: u64 = 64;
const U_CAP: u64 = 1 << 26;

// Bracket [lo, hi] for E[ceil(X)] at truncation u.
struct CeilBracket {
    lo: f64,
    hi: f64,
    u: u64,
    exact: bool,
}

fn kahan_add(sum: &mut f64, comp: &mut f64, term: f64) {
    let y = term - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

fn ceil_bracket(params: &HdeGpdParams, u: u64) -> Result<CeilBracket, RiskError> {
    let x = params.egpd();
    if x.xi >= 1.0 {
        return Err(RiskError::Undefined { reason: format!("xi = {} >= 1", x.xi) });
    }
    let bound = x.support_upper();
    let (u_eff, exact) = if bound.is_finite() {
        (bound.ceil() as u64 + 1, true)
    } else {
        (u, false)
    };
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for m in 0..u_eff {
        let term = x.survival(m as f64);
        if term == 0.0 {
            break;
        }
        kahan_add(&mut sum, &mut comp, term);
    }
    if exact {
        return Ok(CeilBracket { lo: sum, hi: sum, u: u_eff, exact });
    }
    let tail = x
        .tail_integral(u_eff as f64)
        .map_err(|_| RiskError::Undefined { reason: "tail integral".into() })?;
    let lo = sum + tail;
    Ok(CeilBracket { lo, hi: lo + x.survival(u_eff as f64), u: u_eff, exact })
}

// sum_{k=1..d} Fbar_tau(k-1), the head term shared by both metrics.
fn survival_head(dist: &impl DurationDistribution, d: u32) -> f64 {
    let mut acc = 0.0;
    let mut comp = 0.0;
    for k in 0..d {
        kahan_add(&mut acc, &mut comp, dist.survival(k));
    }
    acc
}

/// Mean residual dry-spell duration E[tau - d | tau > d] under the hdeGPD
/// law, as a certified interval of width below `precision`.
pub fn mean_residual_hdegpd(
    params: &HdeGpdParams,
    d: u32,
    precision: f64,
) -> Result<RiskBound, RiskError> {
    assert!(precision > 0.0);
    let denom = params.survival(d);
    if denom <= 0.0 {
        return Err(RiskError::Undefined {
            reason: format!("survival at {d} is zero; the condition has no mass"),
        });
    }
    let head = survival_head(params, d);
    let one_minus_f1 = 1.0 - params.f1;
    let mut u = U_START;
    loop {
        let b = ceil_bracket(params, u)?;
        let lower = (1.0 + one_minus_f1 * b.lo - head) / denom;
        let upper = (1.0 + one_minus_f1 * b.hi - head) / denom;
        let width = upper - lower;
        if width < precision || b.exact {
            return Ok(RiskBound::new(lower, upper, b.u, precision));
        }
        if u >= U_CAP {
            return Err(RiskError::NonConverged { width });
        }
        u *= 2;
    }
}

/// Mean residual duration under the geometric baseline: exactly 1/p for
/// every d (memorylessness).
pub fn mean_residual_geometric(params: &GeometricParams, _d: u32) -> f64 {
    1.0 / params.p
}

/// Mean residual duration for a tabulated law. The geometric tail rule
/// past the horizon makes the remainder closed-form, so no truncation
/// error is introduced.
pub fn mean_residual_tabulated(dist: &TabulatedDuration, d: u32) -> Result<f64, RiskError> {
    let denom = dist.survival(d);
    if denom <= 0.0 {
        // Past the horizon the tail rule still defines the conditional
        // hazard chain even when the table left no mass there: residual
        // is geometric with the tail exit rate.
        if d >= dist.horizon() && dist.tail_exit() > 0.0 {
            return Ok(1.0 / dist.tail_exit());
        }
        return Err(RiskError::Undefined { reason: format!("no mass beyond {d}") });
    }
    // E[(tau - d)^+] = sum_{j >= d} Fbar(j)
    let h = dist.horizon().max(d);
    let mut acc = 0.0;
    let mut comp = 0.0;
    for j in d..h {
        kahan_add(&mut acc, &mut comp, dist.survival(j));
    }
    let tail_mass = dist.survival(h);
    if tail_mass > 0.0 {
        if dist.tail_exit() == 0.0 {
            return Err(RiskError::Undefined { reason: "infinite tail".into() });
        }
        // sum_{j >= h} Fbar(h) (1-q)^(j-h) = Fbar(h)/q
        acc += tail_mass / dist.tail_exit();
    }
    Ok(acc / denom)
}

/// Long-run proportion of time spent in dry spells strictly older than `d`
/// days: E[(tau0 - d)^+] / E\[tau\]. The numerator and denominator brackets
/// pair off (small numerator with large denominator and vice versa), so
/// the interval is certified.
pub fn proportion_time_long_dry(
    dry: &DryModel,
    wet: &WetModel,
    d: u32,
    precision: f64,
) -> Result<RiskBound, RiskError> {
    assert!(precision > 0.0);
    let wet_mean = wet.mean();
    match dry {
        DryModel::Geometric(g) => {
            // E[(tau0 - d)^+] = (1-p)^d / p exactly.
            let excess = (1.0 - g.p).powi(d as i32) / g.p;
            let value = excess / (1.0 / g.p + wet_mean);
            Ok(RiskBound::new(value, value, 0, precision))
        }
        DryModel::HdeGpd(params) => {
            let head = survival_head(params, d);
            let one_minus_f1 = 1.0 - params.f1;
            let mut u = U_START;
            loop {
                let b = ceil_bracket(params, u)?;
                let excess_lo = (1.0 + one_minus_f1 * b.lo - head).max(0.0);
                let excess_hi = (1.0 + one_minus_f1 * b.hi - head).max(0.0);
                let lower = excess_lo / (1.0 + one_minus_f1 * b.hi + wet_mean);
                let upper = excess_hi / (1.0 + one_minus_f1 * b.lo + wet_mean);
                let width = upper - lower;
                if width < precision || b.exact {
                    return Ok(RiskBound::new(lower, upper, b.u, precision));
                }
                if u >= U_CAP {
                    return Err(RiskError::NonConverged { width });
                }
                u *= 2;
            }
        }
    }
}

/// Reward function on (regime, duration) pairs: a table per regime with a
/// default value past each table's end.
#[derive(Debug, Clone)]
pub struct RewardTable {
    pub dry: Vec<f64>,
    pub dry_default: f64,
    pub wet: Vec<f64>,
    pub wet_default: f64,
}

impl RewardTable {
    pub fn value(&self, state: BmcdState) -> f64 {
        let (table, default) = match state.regime {
            Regime::Dry => (&self.dry, self.dry_default),
            Regime::Wet => (&self.wet, self.wet_default),
        };
        table.get((state.duration - 1) as usize).copied().unwrap_or(default)
    }

    /// Indicator of (dry, duration >= d).
    pub fn long_dry_indicator(d: u32) -> Self {
        Self {
            dry: vec![0.0; (d - 1) as usize],
            dry_default: 1.0,
            wet: Vec::new(),
            wet_default: 0.0,
        }
    }
}

/// Monte Carlo long-run average (1/n) sum w(R_k, D_k) along a simulated
/// chain; the verifier for the rho/E\[tau\] limit.
pub fn asymptotic_reward_mc<Q0, Q1>(
    q0: &Q0,
    q1: &Q1,
    w: &RewardTable,
    n_steps: usize,
    seed: u64,
) -> f64
where
    Q0: ExitSequence,
    Q1: ExitSequence,
{
    assert!(n_steps >= 1);
    let mut acc = 0.0;
    for state in chain_iter(q0, q1, seed).take(n_steps) {
        acc += w.value(state);
    }
    acc / n_steps as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{exit_probs_from_distribution, TabulatedExit};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (diff {:.3e})", (a - b).abs());
    }

    #[test]
    fn degenerate_hurdle_mean_residual() {
        let p = HdeGpdParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let b = mean_residual_hdegpd(&p, 0, 1e-5).unwrap();
        close(b.lower, 1.0, 1e-12);
        close(b.upper, 1.0, 1e-12);
    }

    #[test]
    fn geometric_is_memoryless() {
        let p = GeometricParams::new(0.1).unwrap();
        for d in [0u32, 20, 40, 60] {
            assert_eq!(mean_residual_geometric(&p, d), 10.0);
        }
        assert_eq!(mean_residual_geometric(&GeometricParams::new(1.0).unwrap(), 5), 1.0);
    }

    #[test]
    fn tabulated_geometric_cross_check() {
        // The generic tabulated machinery reproduces 1/p within 1e-8.
        for &p in &[0.05, 0.1, 0.5, 1.0] {
            let geo = GeometricParams::new(p).unwrap();
            let q = exit_probs_from_distribution(geo);
            let tab = crate::chain::tabulate_to_survival_floor(&q, 1e-12, 1 << 16);
            for d in [0u32, 20, 40, 60] {
                let got = mean_residual_tabulated(&tab, d).unwrap();
                close(got, 1.0 / p, 1e-8);
            }
        }
    }

    #[test]
    fn bounds_sandwich_direct_summation() {
        let params = HdeGpdParams::new(0.2, 1.0, 10.0, 0.3).unwrap();
        for d in [0u32, 5, 20] {
            let b = mean_residual_hdegpd(&params, d, 1e-5).unwrap();
            assert!(b.width < 1e-5, "width {}", b.width);
            // oracle: truncated series with a quadrature tail remainder
            let x = params.egpd();
            let mut m = 64u32;
            while x.survival(m as f64) > 1e-10 {
                m *= 2;
            }
            let mut excess = 0.0;
            for j in d..m {
                excess += params.survival(j);
            }
            let tail =
                crate::quad::integrate_to_inf(&mut |z| x.survival(z), (m - 1) as f64, 1e-12);
            excess += (1.0 - params.f1) * tail;
            let oracle = excess / params.survival(d);
            assert!(
                b.contains(oracle),
                "oracle {oracle} outside [{}, {}] at d={d}",
                b.lower,
                b.upper
            );
            close(b.midpoint(), oracle, 1e-4);
        }
    }

    #[test]
    fn doubling_never_widens() {
        let params = HdeGpdParams::new(0.3, 1.2, 8.0, 0.4).unwrap();
        let mut prev_width = f64::INFINITY;
        for u in [64u64, 128, 256, 1024, 4096] {
            let b = ceil_bracket(&params, u).unwrap();
            let width = b.hi - b.lo;
            assert!(width <= prev_width + 1e-12);
            prev_width = width;
        }
    }

    #[test]
    fn negative_xi_is_exact() {
        let params = HdeGpdParams::new(0.2, 1.0, 30.0, -0.4).unwrap();
        let b = mean_residual_hdegpd(&params, 10, 1e-5).unwrap();
        assert_eq!(b.width, 0.0);
        // beyond the support bound the conditional is undefined
        let past = params.egpd().support_upper() as u32 + 3;
        assert!(mean_residual_hdegpd(&params, past, 1e-5).is_err());
    }

    #[test]
    fn xi_above_one_is_undefined() {
        let params = HdeGpdParams::new(0.2, 1.0, 5.0, 1.0).unwrap();
        assert!(matches!(
            mean_residual_hdegpd(&params, 0, 1e-5),
            Err(RiskError::Undefined { .. })
        ));
    }

    #[test]
    fn proportion_geometric_example() {
        // dry p=0.5, wet p=0.5, d=1: (E[tau0]-1)/E[tau] = 1/4 exactly.
        let dry = DryModel::Geometric(GeometricParams::new(0.5).unwrap());
        let wet = WetModel::Geometric(GeometricParams::new(0.5).unwrap());
        let b = proportion_time_long_dry(&dry, &wet, 1, 1e-5).unwrap();
        close(b.lower, 0.25, 1e-12);
        assert_eq!(b.width, 0.0);
        // chain simulation cross-check: days in dry spells older than one
        // day carry duration >= 2.
        let q = TabulatedExit::constant(0.5);
        let w = RewardTable::long_dry_indicator(2);
        let frac = asymptotic_reward_mc(&q, &q, &w, 1_000_000, 53);
        close(frac, 0.25, 0.005);
    }

    #[test]
    fn proportion_d_zero_is_dry_fraction() {
        let dry = DryModel::Geometric(GeometricParams::new(0.5).unwrap());
        let wet = WetModel::Geometric(GeometricParams::new(0.5).unwrap());
        let b = proportion_time_long_dry(&dry, &wet, 0, 1e-5).unwrap();
        close(b.midpoint(), 0.5, 1e-12);
        let q = TabulatedExit::constant(0.5);
        let w = RewardTable::long_dry_indicator(1);
        let frac = asymptotic_reward_mc(&q, &q, &w, 1_000_000, 97);
        close(frac, 0.5, 0.005);
    }

    #[test]
    fn proportion_hdegpd_certified_and_simulated() {
        let dry_params = HdeGpdParams::new(0.25, 1.0, 6.0, 0.2).unwrap();
        let wet_params = GeomMixParams::new(0.4, 0.7, 0.2).unwrap();
        let dry = DryModel::HdeGpd(dry_params);
        let wet = WetModel::GeomMix(wet_params);
        let d = 5u32;
        let b = proportion_time_long_dry(&dry, &wet, d, 1e-5).unwrap();
        assert!(b.width < 1e-5);
        let q0 = exit_probs_from_distribution(dry_params);
        let q1 = exit_probs_from_distribution(wet_params);
        let w = RewardTable::long_dry_indicator(d + 1);
        let frac = asymptotic_reward_mc(&q0, &q1, &w, 2_000_000, 4242);
        close(frac, b.midpoint(), 0.005);
    }

    #[test]
    fn proportion_beyond_bounded_support_is_zero() {
        let dry = DryModel::HdeGpd(HdeGpdParams::new(0.2, 1.0, 10.0, -0.5).unwrap());
        let wet = WetModel::Geometric(GeometricParams::new(0.4).unwrap());
        let b = proportion_time_long_dry(&dry, &wet, 60, 1e-5).unwrap();
        assert_eq!(b.lower, 0.0);
        assert_eq!(b.upper, 0.0);
    }

    #[test]
    fn reward_mc_constant_is_one() {
        let q = TabulatedExit::constant(0.3);
        let w = RewardTable { dry: vec![], dry_default: 1.0, wet: vec![], wet_default: 1.0 };
        let mean = asymptotic_reward_mc(&q, &q, &w, 10_000, 4);
        assert_eq!(mean, 1.0);
    }

    #[test]
    fn reward_mc_dry_indicator_symmetric() {
        let q = TabulatedExit::constant(0.5);
        let w = RewardTable::long_dry_indicator(1);
        let frac = asymptotic_reward_mc(&q, &q, &w, 1_000_000, 8);
        close(frac, 0.5, 0.005);
    }
}
