//! Simulation core for the two-photon polarization (Bell–Aspect) experiment.
//!
//! The crate covers five areas:
//!
//! * [`quantum`]: closed-form single and joint outcome probabilities, the
//!   correlation function and the exact CHSH value.
//! * [`lhv`]: a framework for hidden-variable models with factorized
//!   samplers, Monte Carlo estimation of outcome distributions, and checkers
//!   for the locality, surface-coincidence and detector-independence
//!   conditions.
//! * [`chsh`]: CHSH statistics and the Bell-bound verdict for any source of
//!   correlations.
//! * [`strategies`]: the constructive Bell bound (deterministic strategies,
//!   convex mixtures, parametric local families).
//! * [`experiment`]: trial-by-trial seeded simulation with CHSH estimation.
//! * [`relativity`]: boosts along the flight axis, detection-order reversal
//!   and interval invariance.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled.
//! The `parallel` feature spreads Monte Carlo chunks over a rayon pool;
//! results are bit-identical with and without it.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod chsh;
pub mod distribution;
mod error;
pub mod experiment;
pub mod lhv;
mod math;
pub mod quantum;
pub mod relativity;
pub mod rng;
pub mod strategies;

pub use chsh::{ChshResult, ChshSettings, Correlation, SettingPair, Verdict};
pub use distribution::JointDistribution;
pub use error::{Error, Result};
pub use experiment::{ExperimentSummary, Source, TrialRecord};
pub use lhv::{CheckReport, LambdaSample, LhvModel, Locality};
pub use quantum::{Angle, Outcome, Side};
pub use relativity::{ExperimentGeometry, FrameVelocity, SpacetimeEvent};
