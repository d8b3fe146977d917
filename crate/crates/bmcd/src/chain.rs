//! The binary Markov chain with duration and its renewal-chain view.
//!
//! The chain lives on {dry, wet} x {1, 2, ...}: at each step it either
//! flips regime and resets the elapsed duration to one (with the current
//! exit probability) or stays and increments the duration. Exit
//! probabilities and spell-duration distributions carry the same
//! information; both directions of that mapping live here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DurationDistribution, TabulatedDuration};
use crate::seeding::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Dry = 0,
    Wet = 1,
}

impl Regime {
    pub fn flip(self) -> Self {
        match self {
            Regime::Dry => Regime::Wet,
            Regime::Wet => Regime::Dry,
        }
    }
}

/// One chain state: current regime and elapsed duration (>= 1) in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmcdState {
    pub regime: Regime,
    pub duration: u32,
}

/// A sequence of exit probabilities q_d, d = 1, 2, ...
pub trait ExitSequence {
    fn q(&self, d: u32) -> f64;
}

/// Finite vector of exit probabilities with an explicit tail rule: beyond
/// the table, q is `tail` forever.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedExit {
    q: Vec<f64>,
    tail: f64,
}

impl TabulatedExit {
    pub fn new(q: Vec<f64>, tail: f64) -> Self {
        assert!(q.iter().all(|v| (0.0..=1.0).contains(v)), "q out of [0,1]");
        assert!((0.0..=1.0).contains(&tail), "tail out of [0,1]");
        Self { q, tail }
    }

    pub fn constant(q: f64) -> Self {
        Self::new(Vec::new(), q)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }
}

impl ExitSequence for TabulatedExit {
    fn q(&self, d: u32) -> f64 {
        assert!(d >= 1);
        self.q.get((d - 1) as usize).copied().unwrap_or(self.tail)
    }
}

/// Exit probabilities implied by a duration distribution:
/// q_d = pmf(d) / survival(d-1), and 1 once the support is exhausted.
#[derive(Debug, Clone)]
pub struct DistExit<D: DurationDistribution> {
    dist: D,
}

impl<D: DurationDistribution> DistExit<D> {
    pub fn inner(&self) -> &D {
        &self.dist
    }
}

impl<D: DurationDistribution> ExitSequence for DistExit<D> {
    fn q(&self, d: u32) -> f64 {
        assert!(d >= 1);
        let denom = self.dist.survival(d - 1);
        if denom > 0.0 {
            (self.dist.pmf(d) / denom).clamp(0.0, 1.0)
        } else {
            1.0
        }
    }
}

impl<Q: ExitSequence + ?Sized> ExitSequence for &Q {
    fn q(&self, d: u32) -> f64 {
        (**self).q(d)
    }
}

impl ExitSequence for Box<dyn ExitSequence + '_> {
    fn q(&self, d: u32) -> f64 {
        (**self).q(d)
    }
}

/// Wrap a duration distribution as its exit-probability sequence.
pub fn exit_probs_from_distribution<D: DurationDistribution>(dist: D) -> DistExit<D> {
    DistExit { dist }
}

/// Tabulate the duration distribution implied by an exit sequence up to
/// `horizon`: pmf(d) = q_d prod_{k<d}(1 - q_k). The residual survival mass
/// prod_{k<=horizon}(1 - q_k) is carried explicitly, with the tail ruled by
/// q at horizon + 1.
pub fn distribution_from_exit_probs<Q: ExitSequence>(
    q: &Q,
    horizon: u32,
) -> TabulatedDuration {
    assert!(horizon >= 1);
    let mut pmf = Vec::with_capacity(horizon as usize);
    let mut surv = 1.0_f64;
    for d in 1..=horizon {
        let qd = q.q(d).clamp(0.0, 1.0);
        pmf.push(surv * qd);
        surv *= 1.0 - qd;
    }
    let tail_exit = q.q(horizon + 1).clamp(0.0, 1.0);
    TabulatedDuration::from_pmf(pmf, tail_exit).expect("exit probs always yield a valid pmf")
}

/// Tabulate an exit sequence out to the duration where the implied
/// survival drops below `floor` (or `max_horizon`, whichever comes
/// first). This is how simulation tables are built: the tail rule keeps
/// q at its last value, so the bias sits below the survival floor.
pub fn tabulate_to_survival_floor<Q: ExitSequence>(
    q: &Q,
    floor: f64,
    max_horizon: u32,
) -> TabulatedDuration {
    let mut surv = 1.0_f64;
    let mut horizon = 1u32;
    for d in 1..=max_horizon {
        surv *= 1.0 - q.q(d).clamp(0.0, 1.0);
        horizon = d;
        if surv < floor {
            break;
        }
    }
    distribution_from_exit_probs(q, horizon)
}

/// Render an exit sequence as two-column CSV (d, q_d) over 1..=d_max.
pub fn exit_probs_csv<Q: ExitSequence>(q: &Q, d_max: u32) -> String {
    let mut out = String::from("d,q\n");
    for d in 1..=d_max {
        out.push_str(&format!("{d},{}\n", q.q(d)));
    }
    out
}

/// Render a simulated path as CSV (step, regime, duration), regime coded
/// 0 = dry, 1 = wet.
pub fn path_csv(path: &[BmcdState]) -> String {
    let mut out = String::from("step,regime,duration\n");
    for (k, s) in path.iter().enumerate() {
        let r = match s.regime {
            Regime::Dry => 0,
            Regime::Wet => 1,
        };
        out.push_str(&format!("{k},{r},{}\n", s.duration));
    }
    out
}

/// Outcome of the spell-finiteness certification.
///
/// Spell durations are a.s. finite iff sum_d q_d diverges; partial sums
/// larger than `s_cert` leave residual survival below exp(-s_cert), which
/// we accept as a numerical certificate. The check is conservative: it
/// never certifies infiniteness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finiteness {
    CertifiedFinite { terms_used: u32 },
    Inconclusive,
}

pub const DEFAULT_CERT_BOUND: f64 = 50.0;

pub fn check_finiteness<Q: ExitSequence>(q: &Q, budget: u32) -> Finiteness {
    check_finiteness_with_bound(q, budget, DEFAULT_CERT_BOUND)
}

pub fn check_finiteness_with_bound<Q: ExitSequence>(
    q: &Q,
    budget: u32,
    s_cert: f64,
) -> Finiteness {
    assert!(budget >= 1);
    let mut partial = 0.0_f64;
    for d in 1..=budget {
        partial += q.q(d);
        if partial > s_cert {
            return Finiteness::CertifiedFinite { terms_used: d };
        }
    }
    Finiteness::Inconclusive
}

/// Iterator over BMCD states. The first item is always (dry, 1).
pub struct ChainIter<'a, Q0: ExitSequence, Q1: ExitSequence> {
    q0: &'a Q0,
    q1: &'a Q1,
    state: BmcdState,
    rng: rand_chacha::ChaCha8Rng,
    started: bool,
}

impl<Q0: ExitSequence, Q1: ExitSequence> Iterator for ChainIter<'_, Q0, Q1> {
    type Item = BmcdState;

    fn next(&mut self) -> Option<BmcdState> {
        if !self.started {
            self.started = true;
            return Some(self.state);
        }
        let q = match self.state.regime {
            Regime::Dry => self.q0.q(self.state.duration),
            Regime::Wet => self.q1.q(self.state.duration),
        };
        let u: f64 = rand::RngExt::random(&mut self.rng);
        self.state = if u < q {
            BmcdState { regime: self.state.regime.flip(), duration: 1 }
        } else {
            BmcdState { regime: self.state.regime, duration: self.state.duration + 1 }
        };
        Some(self.state)
    }
}

/// Stream the chain from (dry, 1) under the two exit sequences.
pub fn chain_iter<'a, Q0: ExitSequence, Q1: ExitSequence>(
    q0: &'a Q0,
    q1: &'a Q1,
    seed: u64,
) -> ChainIter<'a, Q0, Q1> {
    ChainIter {
        q0,
        q1,
        state: BmcdState { regime: Regime::Dry, duration: 1 },
        rng: rng_from_seed(seed),
        started: false,
    }
}

/// Simulate `n_steps` states (the initial (dry, 1) state included).
pub fn simulate_chain<Q0: ExitSequence, Q1: ExitSequence>(
    q0: &Q0,
    q1: &Q1,
    n_steps: usize,
    seed: u64,
) -> Vec<BmcdState> {
    assert!(n_steps >= 1);
    chain_iter(q0, q1, seed).take(n_steps).collect()
}

/// Run-length encode a path into completed (dry, wet) spell duration lists.
/// The trailing spell is censored by the end of the path and dropped; the
/// leading spell is complete by construction (the chain starts a fresh
/// spell) and kept.
pub fn spells_from_path(path: &[BmcdState]) -> (Vec<u32>, Vec<u32>) {
    let mut dry = Vec::new();
    let mut wet = Vec::new();
    if path.is_empty() {
        return (dry, wet);
    }
    let mut run_regime = path[0].regime;
    let mut run_len = 0u32;
    for s in path {
        if s.regime == run_regime {
            run_len += 1;
        } else {
            match run_regime {
                Regime::Dry => dry.push(run_len),
                Regime::Wet => wet.push(run_len),
            }
            run_regime = s.regime;
            run_len = 1;
        }
    }
    // trailing run is censored: dropped
    (dry, wet)
}

#[derive(Debug, Error, PartialEq)]
pub enum RenewalError {
    #[error("dry and wet lists must pair up ({dry} dry vs {wet} wet)")]
    LengthMismatch { dry: usize, wet: usize },
}

/// Alternating-renewal view of paired (dry, wet) cycles: cycle start times
/// T_k and the counting sequence N_n = max{k : T_k <= n}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenewalView {
    times: Vec<u64>,
}

impl RenewalView {
    pub fn new(dry: &[u32], wet: &[u32]) -> Result<Self, RenewalError> {
        if dry.len() != wet.len() {
            return Err(RenewalError::LengthMismatch { dry: dry.len(), wet: wet.len() });
        }
        let mut times = Vec::with_capacity(dry.len() + 1);
        let mut t = 0u64;
        times.push(0);
        for (d, w) in dry.iter().zip(wet) {
            t += u64::from(*d) + u64::from(*w);
            times.push(t);
        }
        Ok(Self { times })
    }

    /// Renewal times (T_0 = 0, T_1, ..., T_K).
    pub fn times(&self) -> &[u64] {
        &self.times
    }

    /// N_n: completed cycles by time n.
    pub fn count_at(&self, n: u64) -> usize {
        // times is strictly increasing; first index with T_k > n, minus one.
        self.times.partition_point(|&t| t <= n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{GeometricParams, HdeGpdParams};

    #[test]
    fn exit_probs_geometric_is_constant() {
        let q = exit_probs_from_distribution(GeometricParams::new(0.5).unwrap());
        for d in 1..100 {
            assert!((q.q(d) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn exit_probs_point_mass() {
        // point mass at 3: q = (0, 0, 1, 1, ...)
        let t = TabulatedDuration::from_pmf(vec![0.0, 0.0, 1.0], 1.0).unwrap();
        let q = exit_probs_from_distribution(t);
        assert_eq!(q.q(1), 0.0);
        assert_eq!(q.q(2), 0.0);
        assert_eq!(q.q(3), 1.0);
        assert_eq!(q.q(4), 1.0);
        assert_eq!(q.q(17), 1.0);
    }

    #[test]
    fn exit_probs_hdegpd_first_entry_is_hurdle() {
        let d = HdeGpdParams::new(0.25, 1.0, 5.0, 0.0).unwrap();
        let q = exit_probs_from_distribution(d);
        assert!((q.q(1) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn tabulation_geometric() {
        let q = TabulatedExit::constant(0.5);
        let t = distribution_from_exit_probs(&q, 3);
        assert_eq!(t.pmf_slice(), &[0.5, 0.25, 0.125]);
        assert!((t.residual_tail_mass() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn tabulation_immediate_exit() {
        let q = TabulatedExit::constant(1.0);
        let t = distribution_from_exit_probs(&q, 4);
        assert_eq!(t.pmf_slice(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.residual_tail_mass(), 0.0);
    }

    #[test]
    fn tabulation_round_trips_point_mass() {
        let t = TabulatedDuration::from_pmf(vec![0.0, 0.0, 1.0], 1.0).unwrap();
        let q = exit_probs_from_distribution(t);
        let back = distribution_from_exit_probs(&q, 3);
        assert_eq!(back.pmf_slice(), &[0.0, 0.0, 1.0]);
        assert_eq!(back.residual_tail_mass(), 0.0);
    }

    #[test]
    fn round_trip_is_exact_on_tabulated_supports() {
        let original =
            TabulatedDuration::from_pmf(vec![0.1, 0.0, 0.3, 0.25, 0.05, 0.3], 1.0).unwrap();
        let q = exit_probs_from_distribution(original.clone());
        let back = distribution_from_exit_probs(&q, 6);
        for d in 1..=6 {
            assert!((back.pmf(d) - original.pmf(d)).abs() < 1e-12);
        }
    }

    #[test]
    fn finiteness_constant_q() {
        let q = TabulatedExit::constant(0.1);
        match check_finiteness(&q, 1000) {
            // partial sums cross 50 after ~500 terms (modulo fp rounding)
            Finiteness::CertifiedFinite { terms_used } => {
                assert!((500..=501).contains(&terms_used), "terms {terms_used}")
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn finiteness_convergent_series_is_inconclusive() {
        // q_d = 2^-d sums to 1 < infinity: never certified.
        struct Halving;
        impl ExitSequence for Halving {
            fn q(&self, d: u32) -> f64 {
                0.5f64.powi(d.min(1_000) as i32)
            }
        }
        assert_eq!(check_finiteness(&Halving, 100_000), Finiteness::Inconclusive);
    }

    #[test]
    fn finiteness_heavy_tail_hdegpd() {
        // Pareto-type hazard decays like 1/(xi d): the q-sum diverges
        // logarithmically, so certification is reached (slowly).
        let d = HdeGpdParams::new(0.25, 1.0, 5.0, 0.1).unwrap();
        let q = exit_probs_from_distribution(d);
        match check_finiteness(&q, 1 << 20) {
            Finiteness::CertifiedFinite { .. } => {}
            other => panic!("expected certificate, got {other:?}"),
        }
        // for xi = 0.3 the default bound of 50 needs ~10^7 terms; a lower
        // certification bound (residual survival < e^-20) suffices here
        let d = HdeGpdParams::new(0.25, 1.0, 5.0, 0.3).unwrap();
        let q = exit_probs_from_distribution(d);
        match check_finiteness_with_bound(&q, 1 << 20, 20.0) {
            Finiteness::CertifiedFinite { .. } => {}
            other => panic!("expected certificate, got {other:?}"),
        }
        // cross-check the certificate against the survival itself
        let surv = d.egpd().survival((1 << 20) as f64);
        assert!(surv < 1e-5, "survival should vanish numerically: {surv}");
    }

    #[test]
    fn simulate_forced_alternation() {
        let q = TabulatedExit::constant(1.0);
        let path = simulate_chain(&q, &q, 6, 9);
        for (i, s) in path.iter().enumerate() {
            assert_eq!(s.duration, 1);
            let expected = if i % 2 == 0 { Regime::Dry } else { Regime::Wet };
            assert_eq!(s.regime, expected);
        }
    }

    #[test]
    fn simulate_no_exit() {
        let q = TabulatedExit::constant(0.0);
        let path = simulate_chain(&q, &q, 5, 11);
        let expect: Vec<u32> = (1..=5).collect();
        assert!(path.iter().all(|s| s.regime == Regime::Dry));
        assert_eq!(path.iter().map(|s| s.duration).collect::<Vec<_>>(), expect);
    }

    #[test]
    fn simulate_symmetric_wet_fraction() {
        let q = TabulatedExit::constant(0.5);
        let n = 1_000_000;
        let path = simulate_chain(&q, &q, n, 2024);
        let wet = path.iter().filter(|s| s.regime == Regime::Wet).count();
        let frac = wet as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.002, "wet fraction {frac}");
    }

    #[test]
    fn spells_drop_censored_tail() {
        let mk = |regimes: &[Regime]| -> Vec<BmcdState> {
            let mut out = Vec::new();
            let mut dur = 0;
            let mut last = None;
            for &r in regimes {
                dur = if last == Some(r) { dur + 1 } else { 1 };
                last = Some(r);
                out.push(BmcdState { regime: r, duration: dur });
            }
            out
        };
        use Regime::{Dry as D, Wet as W};
        let (dry, wet) = spells_from_path(&mk(&[D, D, W, D]));
        assert_eq!(dry, vec![2]);
        assert_eq!(wet, vec![1]);

        let (dry, wet) = spells_from_path(&mk(&[D, W, D, W, D, W]));
        assert_eq!(dry, vec![1, 1, 1]);
        assert_eq!(wet, vec![1, 1]);
    }

    #[test]
    fn spell_survival_matches_generating_law() {
        // dry durations from a geometric(0.3) chain: empirical survival of
        // extracted spells within 0.01 of (0.7)^d.
        let q = TabulatedExit::constant(0.3);
        let path = simulate_chain(&q, &q, 1_000_000, 31);
        let (dry, _) = spells_from_path(&path);
        let m = dry.len() as f64;
        for d in 1..=10u32 {
            let emp = dry.iter().filter(|&&x| x > d).count() as f64 / m;
            let theo = 0.7f64.powi(d as i32);
            assert!((emp - theo).abs() < 0.01, "d={d}: {emp} vs {theo}");
        }
    }

    #[test]
    fn renewal_times_and_counts() {
        let v = RenewalView::new(&[2, 1], &[1, 3]).unwrap();
        assert_eq!(v.times(), &[0, 3, 7]);
        assert_eq!(v.count_at(2), 0);
        assert_eq!(v.count_at(3), 1);
        assert_eq!(v.count_at(6), 1);
        assert_eq!(v.count_at(7), 2);
        assert_eq!(v.count_at(100), 2);
    }

    #[test]
    fn renewal_empty() {
        let v = RenewalView::new(&[], &[]).unwrap();
        assert_eq!(v.times(), &[0]);
        for n in [0u64, 1, 50] {
            assert_eq!(v.count_at(n), 0);
        }
    }

    #[test]
    fn renewal_requires_pairs() {
        assert!(RenewalView::new(&[1, 2], &[1]).is_err());
    }

    #[test]
    fn csv_exports() {
        let q = TabulatedExit::new(vec![0.25, 0.5], 1.0);
        assert_eq!(exit_probs_csv(&q, 3), "d,q\n1,0.25\n2,0.5\n3,1\n");
        let path = simulate_chain(&TabulatedExit::constant(0.0), &TabulatedExit::constant(0.0), 2, 1);
        assert_eq!(path_csv(&path), "step,regime,duration\n0,0,1\n1,0,2\n");
    }

    #[test]
    fn renewal_increments_exactly_at_cycle_ends() {
        // 15-day synthetic path: dry 3, wet 2, dry 4, wet 1, dry 2, wet 3.
        let dry = [3u32, 4, 2];
        let wet = [2u32, 1, 3];
        let v = RenewalView::new(&dry, &wet).unwrap();
        let times = v.times().to_vec();
        assert_eq!(times, vec![0, 5, 10, 15]);
        // brute force the counting sequence over the 15 days
        for n in 0..=15u64 {
            let brute = times[1..].iter().filter(|&&t| t <= n).count();
            assert_eq!(v.count_at(n), brute, "n={n}");
        }
    }
}
