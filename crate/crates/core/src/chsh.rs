//! CHSH statistics for any source of correlations.

use core::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::distribution::JointDistribution;
use crate::error::{invalid, Result};
use crate::math;
use crate::quantum::Angle;

/// The local bound on `|S|`.
pub const BELL_BOUND: f64 = 2.0;
/// Slack for deciding an exact `|S|` exceeds the bound.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Significance (in standard errors) required to call a statistical violation.
pub const VIOLATION_SIGMAS: f64 = 3.0;
/// Largest accepted `|E|` in [`chsh_from_correlations`].
pub const CORRELATION_SLACK: f64 = 1e-9;

/// The four detector angles `(θ_a, θ_a', θ_b, θ_b')` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub theta_a: Angle,
    pub theta_a_prime: Angle,
    pub theta_b: Angle,
    pub theta_b_prime: Angle,
}

impl ChshSettings {
    pub fn new(theta_a: Angle, theta_a_prime: Angle, theta_b: Angle, theta_b_prime: Angle) -> Self {
        ChshSettings {
            theta_a,
            theta_a_prime,
            theta_b,
            theta_b_prime,
        }
    }

    pub fn from_radians(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<Self> {
        Ok(ChshSettings::new(
            Angle::from_radians(a)?,
            Angle::from_radians(a_prime)?,
            Angle::from_radians(b)?,
            Angle::from_radians(b_prime)?,
        ))
    }

    /// `a − b = b − a' = a' − b' = π/8`, the configuration of maximal
    /// quantum violation: `(π/4, 0, π/8, −π/8)`.
    pub fn maximal_violation() -> Self {
        ChshSettings::from_radians(FRAC_PI_4, 0.0, FRAC_PI_8, -FRAC_PI_8).expect("finite constants")
    }

    pub fn angles(&self, pair: SettingPair) -> (Angle, Angle) {
        match pair {
            SettingPair::Ab => (self.theta_a, self.theta_b),
            SettingPair::Abp => (self.theta_a, self.theta_b_prime),
            SettingPair::Apb => (self.theta_a_prime, self.theta_b),
            SettingPair::Apbp => (self.theta_a_prime, self.theta_b_prime),
        }
    }

    /// `(θ_L, θ_R)` for each pair, in [`SettingPair::ALL`] order.
    pub fn pairs(&self) -> [(Angle, Angle); 4] {
        SettingPair::ALL.map(|p| self.angles(p))
    }
}

/// Which of the four correlations a trial feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingPair {
    Ab,
    Abp,
    Apb,
    Apbp,
}

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [
        SettingPair::Ab,
        SettingPair::Abp,
        SettingPair::Apb,
        SettingPair::Apbp,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        SettingPair::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SettingPair::Ab => "ab",
            SettingPair::Abp => "abp",
            SettingPair::Apb => "apb",
            SettingPair::Apbp => "apbp",
        }
    }

    /// Coefficient of this pair's correlation in `S`.
    pub fn sign(self) -> f64 {
        match self {
            SettingPair::Abp => -1.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for SettingPair {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        SettingPair::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| invalid!("unknown setting pair {s:?}"))
    }
}

/// A correlation value with an optional standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub value: f64,
    pub standard_error: Option<f64>,
}

impl Correlation {
    pub fn exact(value: f64) -> Self {
        Correlation {
            value,
            standard_error: None,
        }
    }

    pub fn estimated(value: f64, standard_error: f64) -> Self {
        Correlation {
            value,
            standard_error: Some(standard_error),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledCorrelation {
    pub pair: SettingPair,
    pub value: f64,
    pub standard_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SatisfiesBound,
    ViolatesBound,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub s_value: f64,
    pub standard_error: Option<f64>,
    pub correlations: [LabeledCorrelation; 4],
    pub verdict: Verdict,
}

impl ChshResult {
    pub fn abs_s(&self) -> f64 {
        math::abs(self.s_value)
    }
}

/// `E = P++ + P−− − P+− − P−+`.
///
/// For a sampled distribution the standard error is that of a mean of `n`
/// outcome products in `{−1, +1}`: `sqrt((1 − E²)/n)`. Exact distributions
/// carry no error.
pub fn correlation_from_distribution(dist: &JointDistribution) -> Result<Correlation> {
    dist.validate()?;
    let e = dist.correlation();
    Ok(match dist.n_samples {
        Some(n) => Correlation::estimated(e, product_standard_error(e, n)),
        None => Correlation::exact(e),
    })
}

pub(crate) fn product_standard_error(e: f64, n: u64) -> f64 {
    let var = (1.0 - e * e).max(0.0);
    math::sqrt(var / n as f64)
}

/// `S = E(a,b) − E(a,b') + E(a',b) + E(a',b')` with the verdict against
/// `|S| ≤ 2`.
///
/// The four estimates are treated as independent, so
/// `se_S = sqrt(Σ se_i²)`; it is present only when every term has an error.
/// An `|S|` beyond 4 is still returned as computed.
pub fn chsh_from_correlations(correlations: [Correlation; 4]) -> Result<ChshResult> {
    for (c, pair) in correlations.iter().zip(SettingPair::ALL) {
        if !c.value.is_finite() || math::abs(c.value) > 1.0 + CORRELATION_SLACK {
            return Err(invalid!(
                "correlation {} for pair {pair} outside [-1, 1]",
                c.value
            ));
        }
        if let Some(se) = c.standard_error {
            if se.is_nan() || se < 0.0 {
                return Err(invalid!("standard error {se} for pair {pair} is negative"));
            }
        }
    }
    let s_value = SettingPair::ALL
        .iter()
        .zip(&correlations)
        .fold(0.0, |acc, (p, c)| acc + p.sign() * c.value);
    let standard_error = correlations
        .iter()
        .try_fold(0.0, |acc, c| c.standard_error.map(|se| acc + se * se))
        .map(math::sqrt);
    let correlations = core::array::from_fn(|i| LabeledCorrelation {
        pair: SettingPair::ALL[i],
        value: correlations[i].value,
        standard_error: correlations[i].standard_error,
    });
    Ok(ChshResult {
        s_value,
        standard_error,
        correlations,
        verdict: verdict(s_value, standard_error),
    })
}

fn verdict(s_value: f64, standard_error: Option<f64>) -> Verdict {
    let excess = math::abs(s_value) - BELL_BOUND;
    match standard_error {
        None if excess > EXACT_TOLERANCE => Verdict::ViolatesBound,
        None => Verdict::SatisfiesBound,
        Some(se) if excess > VIOLATION_SIGMAS * se => Verdict::ViolatesBound,
        Some(_) if excess <= 0.0 => Verdict::SatisfiesBound,
        Some(_) => Verdict::Inconclusive,
    }
}

/// `(|S| − 2) / se`; negative when the bound holds.
pub fn violation_sigmas(s_value: f64, standard_error: f64) -> Result<f64> {
    if !standard_error.is_finite() || standard_error <= 0.0 {
        return Err(invalid!(
            "standard error must be positive, got {standard_error}"
        ));
    }
    Ok((math::abs(s_value) - BELL_BOUND) / standard_error)
}
