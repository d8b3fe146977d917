//! Parametric spell-duration distributions.
//!
//! Three families are used throughout the crate: the hurdle discretised
//! extended GPD for dry spells (point mass at one day, Pareto-flexible
//! upper tail), a two-component geometric mixture for wet spells, and the
//! plain geometric baseline that a two-state first-order Markov chain
//! implies. A tabulated form backs the exit-probability round trip.

mod discrete;
mod egpd;

pub use discrete::{GeomMixParams, GeometricParams, HdeGpdParams, TabulatedDuration};
pub use egpd::Egpd1Params;

use rand::{Rng, RngExt};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("invalid parameter {name}: {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("mean is undefined (requires xi < 1, got {xi})")]
    MeanUndefined { xi: f64 },
}

/// Common capability of all duration laws on {1, 2, ...}.
///
/// `survival(d)` is P(tau > d), so `survival(0) == 1` and
/// `pmf(d) == survival(d-1) - survival(d)` holds analytically for every
/// implementor (the expressions are shared, not subtracted).
pub trait DurationDistribution {
    fn pmf(&self, d: u32) -> f64;
    fn survival(&self, d: u32) -> f64;
    fn sample(&self, rng: &mut dyn Rng) -> u32;
    /// First moment, when it exists (finite).
    fn mean(&self) -> Option<f64>;
}

/// Uniform draw in the open interval (0, 1).
pub(crate) fn open_unit(rng: &mut (impl Rng + ?Sized)) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Inverse-cdf geometric draw on {1, 2, ...} with success probability p.
pub(crate) fn geometric_inverse(u: f64, p: f64) -> u32 {
    debug_assert!(u > 0.0 && u < 1.0);
    if p >= 1.0 {
        return 1;
    }
    let raw = (u.ln() / (-p).ln_1p()).ceil();
    if raw < 1.0 {
        1
    } else if raw >= u32::MAX as f64 {
        u32::MAX
    } else {
        raw as u32
    }
}
