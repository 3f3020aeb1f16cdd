//! Closed-form quantum predictions for the polarization-entangled photon
//! pair. Everything depends on the detector angles only through
//! `theta_l - theta_r`.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::chsh::ChshSettings;
use crate::distribution::JointDistribution;
use crate::error::{invalid, Error, Result};
use crate::math;

/// A detector rotation in radians. Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn from_radians(radians: f64) -> Result<Self> {
        if radians.is_finite() {
            Ok(Angle(radians))
        } else {
            Err(invalid!("angle must be finite, got {radians}"))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Angle::from_radians(value)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A detector reading, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    /// `+1` for non-negative arguments. The zero boundary has measure zero
    /// under every continuous hidden-variable density, so any fixed choice
    /// there is harmless.
    pub fn from_sign_of(x: f64) -> Self {
        if x >= 0.0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

impl core::ops::Neg for Outcome {
    type Output = Outcome;

    fn neg(self) -> Outcome {
        self.flipped()
    }
}

impl TryFrom<i8> for Outcome {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            other => Err(invalid!("outcome must be +1 or -1, got {other}")),
        }
    }
}

impl From<Outcome> for i8 {
    fn from(o: Outcome) -> i8 {
        o.sign()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Single-photon probability of either outcome on either side: always 1/2.
pub fn singles_probability(_side: Side, _outcome: Outcome, _theta: Angle) -> f64 {
    0.5
}

/// `sin²(Δ)/2` for equal outcomes and `cos²(Δ)/2` for opposite outcomes,
/// with `Δ = θ_L − θ_R`.
pub fn joint_probability(out_l: Outcome, out_r: Outcome, theta_l: Angle, theta_r: Angle) -> f64 {
    let delta = theta_l.0 - theta_r.0;
    if out_l == out_r {
        let s = math::sin(delta);
        s * s / 2.0
    } else {
        let c = math::cos(delta);
        c * c / 2.0
    }
}

pub fn exact_distribution(theta_l: Angle, theta_r: Angle) -> JointDistribution {
    use Outcome::{Minus, Plus};
    JointDistribution::exact(
        joint_probability(Plus, Plus, theta_l, theta_r),
        joint_probability(Plus, Minus, theta_l, theta_r),
        joint_probability(Minus, Plus, theta_l, theta_r),
        joint_probability(Minus, Minus, theta_l, theta_r),
    )
}

/// `E = P++ + P−− − P+− − P−+` summed from the four joint probabilities.
pub fn correlation(theta_l: Angle, theta_r: Angle) -> f64 {
    exact_distribution(theta_l, theta_r).correlation()
}

/// The same correlation in closed form, `−cos 2(θ_L − θ_R)`.
pub fn correlation_closed_form(theta_l: Angle, theta_r: Angle) -> f64 {
    -math::cos(2.0 * (theta_l.0 - theta_r.0))
}

/// Exact `S = E(a,b) − E(a,b') + E(a',b) + E(a',b')`.
pub fn chsh_value(settings: &ChshSettings) -> f64 {
    let [ab, abp, apb, apbp] = settings.pairs().map(|(l, r)| correlation(l, r));
    ab - abp + apb + apbp
}
