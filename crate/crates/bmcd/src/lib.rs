//! Duration-augmented binary Markov chains for daily rainfall occurrence.
//!
//! A binary Markov chain with duration (BMCD) tracks the pair
//! (regime, elapsed spell duration) and flips regime with a probability
//! that depends on how long the current dry or wet spell has lasted.
//! Constant exit probabilities recover the classical two-state first-order
//! Markov chain; duration-dependent ones give exact control over the spell
//! duration distribution, which is what this crate exploits:
//!
//! - [`distributions`]: hurdle discretised extended-GPD dry-spell law,
//!   geometric-mixture wet-spell law, geometric baseline, tabulated laws.
//! - [`chain`]: the state machine, simulation, the exact mapping between
//!   duration distributions and exit-probability sequences, and the
//!   alternating-renewal view (cycle times, counting sequence).
//! - [`estimation`]: empirical hurdle frequency + probability-weighted
//!   moments for dry spells, EM for the wet-spell mixture, and the
//!   geometric maximum-likelihood baseline.
//! - [`diagnostics`]: exit-probability curves with binomial bands, a
//!   chi-squared goodness-of-fit test on exit probabilities, pooled
//!   bivariate spell-duration autocorrelation, bootstrap Q-Q envelopes.
//! - [`risk`]: mean residual dry-spell duration and the long-run
//!   proportion of time in long dry spells, with certified lower/upper
//!   bounds of requested width.
//! - [`ingest`]: station file parsing, gap handling, wet/dry thresholding
//!   and spell extraction for building per-season estimation samples.
//!
//! All randomness is ChaCha8 seeded through [`seeding`], so every run is
//! reproducible from a single master seed.

pub mod chain;
pub mod diagnostics;
pub mod distributions;
pub mod estimation;
pub mod ingest;
pub mod quad;
pub mod risk;
pub mod seeding;
pub mod special;

mod linalg;
mod optim;

pub use chain::{BmcdState, ExitSequence, Regime};
pub use distributions::{
    DurationDistribution, Egpd1Params, GeomMixParams, GeometricParams, HdeGpdParams,
    TabulatedDuration,
};
