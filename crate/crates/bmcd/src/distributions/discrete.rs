//! Discrete duration laws on {1, 2, ...}.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::egpd::Egpd1Params;
use super::{geometric_inverse, open_unit, DistError, DurationDistribution};

/// Hurdle discretised eGPD: mass f1 at one day, then 1 + ceil(X) with X
/// continuous type-1 eGPD. The workhorse dry-spell law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdeGpdParams {
    pub f1: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub xi: f64,
}

impl HdeGpdParams {
    pub fn new(f1: f64, kappa: f64, sigma: f64, xi: f64) -> Result<Self, DistError> {
        if !(0.0..=1.0).contains(&f1) {
            return Err(DistError::InvalidParam { name: "f1", value: f1 });
        }
        Egpd1Params::new(kappa, sigma, xi)?;
        Ok(Self { f1, kappa, sigma, xi })
    }

    /// The continuous eGPD behind the d >= 2 part.
    pub fn egpd(&self) -> Egpd1Params {
        Egpd1Params { kappa: self.kappa, sigma: self.sigma, xi: self.xi }
    }
}

impl DurationDistribution for HdeGpdParams {
    fn pmf(&self, d: u32) -> f64 {
        assert!(d >= 1, "pmf domain starts at 1");
        if d == 1 {
            return self.f1;
        }
        // (1-f1) [F(d-1) - F(d-2)], written as a survival difference;
        // F(0) = 0 so pmf(2) = (1-f1) F(1).
        let x = self.egpd();
        (1.0 - self.f1) * (x.survival((d - 2) as f64) - x.survival((d - 1) as f64))
    }

    fn survival(&self, d: u32) -> f64 {
        match d {
            0 => 1.0,
            1 => 1.0 - self.f1,
            _ => (1.0 - self.f1) * self.egpd().survival((d - 1) as f64),
        }
    }

    fn sample(&self, rng: &mut dyn Rng) -> u32 {
        if open_unit(rng) <= self.f1 {
            return 1;
        }
        let x = self.egpd().quantile(open_unit(rng));
        let steps = x.ceil().max(1.0);
        if steps >= (u32::MAX - 1) as f64 {
            u32::MAX
        } else {
            1 + steps as u32
        }
    }

    fn mean(&self) -> Option<f64> {
        // E[tau] = 1 + (1-f1) E[ceil(X)]; bracket the ceiling sum between
        // consecutive refinements until it stabilises to ~1e-11.
        let x = self.egpd();
        if self.xi >= 1.0 {
            return None;
        }
        if self.f1 >= 1.0 {
            return Some(1.0);
        }
        let mut partial = 0.0;
        let mut m = 0u64;
        let bound = x.support_upper();
        loop {
            let s = x.survival(m as f64);
            if s < 1e-12 || (m as f64) > bound {
                let tail = x.tail_integral(m as f64).ok()?;
                // E[ceil X] in [partial + tail, partial + tail + s]
                return Some(1.0 + (1.0 - self.f1) * (partial + tail + 0.5 * s));
            }
            partial += s;
            m += 1;
            if m > 1 << 26 {
                let tail = x.tail_integral(m as f64).ok()?;
                return Some(1.0 + (1.0 - self.f1) * (partial + tail));
            }
        }
    }
}

/// Mixture of two geometric distributions (wet-spell law). Identifiable
/// under p1 >= p2; equality degenerates to a single geometric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomMixParams {
    pub pi: f64,
    pub p1: f64,
    pub p2: f64,
}

impl GeomMixParams {
    pub fn new(pi: f64, p1: f64, p2: f64) -> Result<Self, DistError> {
        if !(0.0..=1.0).contains(&pi) {
            return Err(DistError::InvalidParam { name: "pi", value: pi });
        }
        if !(p1 > 0.0 && p1 <= 1.0) {
            return Err(DistError::InvalidParam { name: "p1", value: p1 });
        }
        if !(p2 > 0.0 && p2 <= 1.0) {
            return Err(DistError::InvalidParam { name: "p2", value: p2 });
        }
        if p1 < p2 {
            return Err(DistError::InvalidParam { name: "p1", value: p1 });
        }
        Ok(Self { pi, p1, p2 })
    }
}

impl DurationDistribution for GeomMixParams {
    fn pmf(&self, d: u32) -> f64 {
        assert!(d >= 1);
        let k = (d - 1) as f64;
        self.pi * self.p1 * (1.0 - self.p1).powf(k)
            + (1.0 - self.pi) * self.p2 * (1.0 - self.p2).powf(k)
    }

    fn survival(&self, d: u32) -> f64 {
        let k = d as f64;
        self.pi * (1.0 - self.p1).powf(k) + (1.0 - self.pi) * (1.0 - self.p2).powf(k)
    }

    fn sample(&self, rng: &mut dyn Rng) -> u32 {
        let p = if open_unit(rng) <= self.pi { self.p1 } else { self.p2 };
        geometric_inverse(open_unit(rng), p)
    }

    fn mean(&self) -> Option<f64> {
        Some(self.pi / self.p1 + (1.0 - self.pi) / self.p2)
    }
}

/// Plain geometric on {1, 2, ...}: the spell law of a two-state
/// first-order Markov chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricParams {
    pub p: f64,
}

impl GeometricParams {
    pub fn new(p: f64) -> Result<Self, DistError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(DistError::InvalidParam { name: "p", value: p });
        }
        Ok(Self { p })
    }
}

impl DurationDistribution for GeometricParams {
    fn pmf(&self, d: u32) -> f64 {
        assert!(d >= 1);
        self.p * (1.0 - self.p).powf((d - 1) as f64)
    }

    fn survival(&self, d: u32) -> f64 {
        (1.0 - self.p).powf(d as f64)
    }

    fn sample(&self, rng: &mut dyn Rng) -> u32 {
        geometric_inverse(open_unit(rng), self.p)
    }

    fn mean(&self) -> Option<f64> {
        Some(1.0 / self.p)
    }
}

/// A duration law tabulated on 1..=horizon with an explicit geometric tail
/// rule: beyond the horizon the exit probability is `tail_exit` per day, so
/// nothing is silently truncated and the residual mass is reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedDuration {
    pmf: Vec<f64>,
    /// survival[d] = P(tau > d) for d = 0..=horizon; survival[0] = 1.
    survival: Vec<f64>,
    tail_exit: f64,
}

impl TabulatedDuration {
    /// Build from a pmf over d = 1..=len. `tail_exit` governs the law past
    /// the table (1.0 = bounded support at len + 1 effectively collapses
    /// residual mass onto the next day).
    pub fn from_pmf(pmf: Vec<f64>, tail_exit: f64) -> Result<Self, DistError> {
        if !(0.0..=1.0).contains(&tail_exit) {
            return Err(DistError::InvalidParam { name: "tail_exit", value: tail_exit });
        }
        let mut survival = Vec::with_capacity(pmf.len() + 1);
        let mut s = 1.0_f64;
        survival.push(s);
        for (i, &m) in pmf.iter().enumerate() {
            if !(0.0..=1.0 + 1e-12).contains(&m) {
                return Err(DistError::InvalidParam { name: "pmf", value: m });
            }
            s -= m;
            if s < -1e-9 {
                return Err(DistError::InvalidParam { name: "pmf_sum", value: 1.0 - s });
            }
            let _ = i;
            survival.push(s.max(0.0));
        }
        Ok(Self { pmf, survival, tail_exit })
    }

    pub fn horizon(&self) -> u32 {
        self.pmf.len() as u32
    }

    /// Mass not covered by the table, P(tau > horizon).
    pub fn residual_tail_mass(&self) -> f64 {
        *self.survival.last().unwrap()
    }

    pub fn tail_exit(&self) -> f64 {
        self.tail_exit
    }

    pub fn pmf_slice(&self) -> &[f64] {
        &self.pmf
    }
}

impl DurationDistribution for TabulatedDuration {
    fn pmf(&self, d: u32) -> f64 {
        assert!(d >= 1);
        let h = self.pmf.len() as u32;
        if d <= h {
            self.pmf[(d - 1) as usize]
        } else {
            let extra = (d - h - 1) as f64;
            self.residual_tail_mass() * (1.0 - self.tail_exit).powf(extra) * self.tail_exit
        }
    }

    fn survival(&self, d: u32) -> f64 {
        let h = self.pmf.len() as u32;
        if d <= h {
            self.survival[d as usize]
        } else {
            self.residual_tail_mass() * (1.0 - self.tail_exit).powf((d - h) as f64)
        }
    }

    fn sample(&self, rng: &mut dyn Rng) -> u32 {
        let u = open_unit(rng);
        // smallest d >= 1 with survival[d] <= 1 - u
        let target = 1.0 - u;
        let idx = self.survival.partition_point(|&s| s > target);
        if idx < self.survival.len() {
            return idx.max(1) as u32;
        }
        let tail = self.residual_tail_mass();
        assert!(
            self.tail_exit > 0.0,
            "sampling a table with dead tail mass {tail}"
        );
        let rel = (target / tail).clamp(f64::MIN_POSITIVE, 1.0 - 1e-16);
        self.horizon() + geometric_inverse(rel, self.tail_exit)
    }

    fn mean(&self) -> Option<f64> {
        // E[tau] = sum_{d>=0} survival(d)
        let head: f64 = self.survival[..self.survival.len() - 1].iter().sum();
        let tail = self.residual_tail_mass();
        if tail == 0.0 {
            return Some(head);
        }
        if self.tail_exit == 0.0 {
            return None;
        }
        Some(head + tail / self.tail_exit)
    }
}
