use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::math;
use crate::quantum::Outcome;

/// Normalization slack accepted for exact and frequency-based distributions.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardErrors {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

/// Outcome probabilities for one `(θ_L, θ_R)` pair, indexed left outcome
/// first. Estimated distributions also carry per-cell standard errors and
/// the sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub p_pp: f64,
    pub p_pm: f64,
    pub p_mp: f64,
    pub p_mm: f64,
    pub se: Option<StandardErrors>,
    pub n_samples: Option<u64>,
}

/// Joint outcome counts in `[++, +−, −+, −−]` order.
pub type Tally = [u64; 4];

pub(crate) fn tally_index(l: Outcome, r: Outcome) -> usize {
    2 * l.index() + r.index()
}

pub(crate) fn add_tally(acc: &mut Tally, t: &Tally) {
    for (a, b) in acc.iter_mut().zip(t) {
        *a += b;
    }
}

impl JointDistribution {
    pub fn exact(p_pp: f64, p_pm: f64, p_mp: f64, p_mm: f64) -> Self {
        JointDistribution {
            p_pp,
            p_pm,
            p_mp,
            p_mm,
            se: None,
            n_samples: None,
        }
    }

    /// Relative frequencies with `se = sqrt(p(1−p)/n)` per cell.
    pub fn from_counts(counts: &Tally) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(invalid!("cannot build a distribution from zero samples"));
        }
        let nf = n as f64;
        let p = counts.map(|c| c as f64 / nf);
        let se = p.map(|q| math::sqrt(q * (1.0 - q) / nf));
        Ok(JointDistribution {
            p_pp: p[0],
            p_pm: p[1],
            p_mp: p[2],
            p_mm: p[3],
            se: Some(StandardErrors {
                pp: se[0],
                pm: se[1],
                mp: se[2],
                mm: se[3],
            }),
            n_samples: Some(n),
        })
    }

    pub fn probabilities(&self) -> [f64; 4] {
        [self.p_pp, self.p_pm, self.p_mp, self.p_mm]
    }

    pub fn get(&self, l: Outcome, r: Outcome) -> f64 {
        self.probabilities()[tally_index(l, r)]
    }

    pub fn total(&self) -> f64 {
        self.p_pp + self.p_pm + self.p_mp + self.p_mm
    }

    pub fn left_marginal(&self, o: Outcome) -> f64 {
        self.get(o, Outcome::Plus) + self.get(o, Outcome::Minus)
    }

    pub fn right_marginal(&self, o: Outcome) -> f64 {
        self.get(Outcome::Plus, o) + self.get(Outcome::Minus, o)
    }

    /// Rejects entries outside `[0, 1]` or a total off by more than
    /// [`NORMALIZATION_TOLERANCE`].
    pub fn validate(&self) -> Result<()> {
        for p in self.probabilities() {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid!("probability {p} outside [0, 1]"));
            }
        }
        let total = self.total();
        if math::abs(total - 1.0) > NORMALIZATION_TOLERANCE {
            return Err(invalid!("distribution sums to {total}, not 1"));
        }
        Ok(())
    }

    pub(crate) fn correlation(&self) -> f64 {
        self.p_pp + self.p_mm - self.p_pm - self.p_mp
    }
}
