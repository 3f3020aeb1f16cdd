//! The local bound `|S| ≤ 2`, established constructively.
//!
//! A local model fixes, for each `λ`, one outcome per detector setting, so
//! every local model is a mixture of the 16 deterministic strategies below.
//! Enumerating them gives the extreme points; convexity does the rest.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chsh::{
    chsh_from_correlations, correlation_from_distribution, ChshResult, ChshSettings, Correlation,
    BELL_BOUND,
};
use crate::error::{invalid, Error, Result};
use crate::lhv::{bell_sign_offset, estimate_distribution, threshold_cutoff, LhvModel};
use crate::math;
use crate::quantum::Outcome;
use crate::rng::{self, derive_seed, map_chunks, map_items, Lane};

/// Fixed outcomes at each of the four settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub a_at_theta_a: Outcome,
    pub a_at_theta_a_prime: Outcome,
    pub b_at_theta_b: Outcome,
    pub b_at_theta_b_prime: Outcome,
}

impl DeterministicStrategy {
    /// All 16 strategies; bit `3 − k` of the index set means entry `k` is `−1`.
    pub fn all() -> [DeterministicStrategy; 16] {
        core::array::from_fn(|i| {
            let o = |bit: usize| {
                if i >> bit & 1 == 0 {
                    Outcome::Plus
                } else {
                    Outcome::Minus
                }
            };
            DeterministicStrategy {
                a_at_theta_a: o(3),
                a_at_theta_a_prime: o(2),
                b_at_theta_b: o(1),
                b_at_theta_b_prime: o(0),
            }
        })
    }

    /// Outcome products for `(ab, ab', a'b, a'b')`.
    pub fn correlations(&self) -> [f64; 4] {
        let p = |x: Outcome, y: Outcome| f64::from(x.sign() * y.sign());
        [
            p(self.a_at_theta_a, self.b_at_theta_b),
            p(self.a_at_theta_a, self.b_at_theta_b_prime),
            p(self.a_at_theta_a_prime, self.b_at_theta_b),
            p(self.a_at_theta_a_prime, self.b_at_theta_b_prime),
        ]
    }

    pub fn chsh(&self) -> f64 {
        let [ab, abp, apb, apbp] = self.correlations();
        ab - abp + apb + apbp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: DeterministicStrategy,
    pub s_value: f64,
}

/// `S` of every deterministic strategy. The outcomes are fixed per setting,
/// so the values do not depend on the angles themselves.
pub fn enumerate_deterministic(_settings: &ChshSettings) -> Vec<StrategyReport> {
    DeterministicStrategy::all()
        .iter()
        .map(|s| StrategyReport {
            strategy: *s,
            s_value: s.chsh(),
        })
        .collect()
}

/// `S` of a convex combination of the 16 strategies (in [`DeterministicStrategy::all`] order).
pub fn mixture_chsh(weights: &[f64; 16]) -> Result<f64> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(invalid!("mixture weights must be finite and non-negative"));
    }
    let total: f64 = weights.iter().sum();
    if math::abs(total - 1.0) > 1e-9 {
        return Err(invalid!("mixture weights sum to {total}, not 1"));
    }
    Ok(DeterministicStrategy::all()
        .iter()
        .zip(weights)
        .map(|(s, w)| w * s.chsh())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureReport {
    pub n_mixtures: u64,
    pub max_abs_s: f64,
    pub vertex_max_abs_s: f64,
}

/// Largest `|S|` over `n_random_mixtures` flat-Dirichlet weight vectors.
pub fn max_mixture_chsh(
    settings: &ChshSettings,
    n_random_mixtures: u64,
    seed: u64,
) -> Result<MixtureReport> {
    if n_random_mixtures == 0 {
        return Err(invalid!("need at least one random mixture"));
    }
    let vertex_max_abs_s = enumerate_deterministic(settings)
        .iter()
        .map(|r| math::abs(r.s_value))
        .fold(0.0, f64::max);
    let partial = map_chunks(n_random_mixtures, |chunk, range| {
        let mut rng = rng::stream(seed, chunk, Lane::Mixture);
        let mut best: f64 = 0.0;
        for _ in range {
            let mut w = [0.0; 16];
            for x in &mut w {
                // 1 − u lies in (0, 1]
                *x = -math::ln(1.0 - rng.random::<f64>());
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
            let s = mixture_chsh(&w).expect("normalized weights");
            best = best.max(math::abs(s));
        }
        best
    });
    Ok(MixtureReport {
        n_mixtures: n_random_mixtures,
        max_abs_s: partial.into_iter().fold(0.0, f64::max),
        vertex_max_abs_s,
    })
}

/// Monte Carlo CHSH of a model: each of the four correlations is estimated
/// from its own `n` draws, so the terms are independent.
pub fn estimate_model_chsh(
    model: &LhvModel,
    settings: &ChshSettings,
    n: u64,
    seed: u64,
) -> Result<ChshResult> {
    let mut correlations = [Correlation::exact(0.0); 4];
    for (i, (l, r)) in settings.pairs().into_iter().enumerate() {
        let d = estimate_distribution(model, l, r, n, derive_seed(seed, i as u64))?;
        correlations[i] = correlation_from_distribution(&d)?;
    }
    chsh_from_correlations(correlations)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub lower: f64,
    pub upper: f64,
}

/// A named local model family with a bounded parameter box.
#[derive(Clone, Copy)]
pub struct ParametricFamily {
    pub name: &'static str,
    pub params: &'static [ParamSpec],
    build: fn(&[f64]) -> LhvModel,
}

impl ParametricFamily {
    pub fn build(&self, params: &[f64]) -> Result<LhvModel> {
        if params.len() != self.params.len() {
            return Err(invalid!(
                "family {} takes {} parameters, got {}",
                self.name,
                self.params.len(),
                params.len()
            ));
        }
        Ok((self.build)(params))
    }
}

pub const FAMILIES: [ParametricFamily; 2] = [
    ParametricFamily {
        name: "bell_sign_offset",
        params: &[ParamSpec {
            name: "offset",
            lower: -FRAC_PI_2,
            upper: FRAC_PI_2,
        }],
        build: |p| bell_sign_offset(p[0]),
    },
    ParametricFamily {
        name: "threshold_cutoff",
        params: &[
            ParamSpec {
                name: "cutoff",
                lower: 0.0,
                upper: 1.0,
            },
            ParamSpec {
                name: "offset",
                lower: -FRAC_PI_2,
                upper: FRAC_PI_2,
            },
        ],
        build: |p| threshold_cutoff(p[0], p[1]),
    },
];

pub fn family(name: &str) -> Result<&'static ParametricFamily> {
    FAMILIES.iter().find(|f| f.name == name).ok_or_else(|| {
        let known: Vec<&str> = FAMILIES.iter().map(|f| f.name).collect();
        Error::NotFound(format!(
            "no model family named {name:?} (known: {})",
            known.join(", ")
        ))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedParam {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub family: String,
    pub parameters: Vec<NamedParam>,
    pub best_abs_s: f64,
    pub standard_error: f64,
    pub evaluations: u64,
    pub grid_points_per_dim: u64,
}

impl OptimizeResult {
    /// `|S| − 2` in units of the estimate's standard error.
    pub fn excess_sigmas(&self) -> f64 {
        (self.best_abs_s - BELL_BOUND) / self.standard_error
    }
}

/// Largest `k` with `k^dim ≤ budget`.
fn points_per_dim(budget: u64, dim: u32) -> u64 {
    let mut k = math::floor(math::powf(budget as f64, 1.0 / f64::from(dim))) as u64;
    while k > 1 && k.checked_pow(dim).is_none_or(|p| p > budget) {
        k -= 1;
    }
    while (k + 1).checked_pow(dim).is_some_and(|p| p <= budget) {
        k += 1;
    }
    k.max(1)
}

fn grid_value(spec: &ParamSpec, i: u64, k: u64) -> f64 {
    if k == 1 {
        0.5 * (spec.lower + spec.upper)
    } else {
        spec.lower + (spec.upper - spec.lower) * i as f64 / (k - 1) as f64
    }
}

/// Grid search over a family's parameter box. `iterations` is the total
/// evaluation budget, spread as an even grid with `⌊iterations^(1/dim)⌋`
/// points per parameter (endpoints included). Every candidate is scored by
/// [`estimate_model_chsh`] with the same seed; the first best `|S|` wins.
pub fn optimize_parametric(
    family_name: &str,
    settings: &ChshSettings,
    iterations: u64,
    n_samples_per_eval: u64,
    seed: u64,
) -> Result<OptimizeResult> {
    let fam = family(family_name)?;
    if iterations == 0 {
        return Err(invalid!("optimizer needs at least one iteration"));
    }
    if n_samples_per_eval == 0 {
        return Err(invalid!(
            "optimizer needs at least one sample per evaluation"
        ));
    }
    let dim = fam.params.len() as u32;
    let k = points_per_dim(iterations, dim);
    let total = k.pow(dim);
    let candidates: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            fam.params
                .iter()
                .map(|spec| {
                    let i = idx % k;
                    idx /= k;
                    grid_value(spec, i, k)
                })
                .collect()
        })
        .collect();
    let scores = map_items(&candidates, |p| {
        let model = fam.build(p)?;
        estimate_model_chsh(&model, settings, n_samples_per_eval, seed)
    });
    let mut best: Option<(usize, ChshResult)> = None;
    for (i, r) in scores.into_iter().enumerate() {
        let r = r?;
        if best.as_ref().is_none_or(|(_, b)| r.abs_s() > b.abs_s()) {
            best = Some((i, r));
        }
    }
    let (i, r) = best.expect("at least one candidate");
    Ok(OptimizeResult {
        family: fam.name.into(),
        parameters: fam
            .params
            .iter()
            .zip(&candidates[i])
            .map(|(s, v)| NamedParam {
                name: s.name.into(),
                value: *v,
            })
            .collect(),
        best_abs_s: r.abs_s(),
        standard_error: r.standard_error.unwrap_or(0.0),
        evaluations: total,
        grid_points_per_dim: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strategy_examples() {
        let s = ChshSettings::maximal_violation();
        let reports = enumerate_deterministic(&s);
        assert_eq!(reports.len(), 16);
        assert_eq!(reports[0].strategy.b_at_theta_b_prime, Outcome::Plus);
        assert_eq!(reports[0].s_value, 2.0);
        assert_eq!(reports[1].strategy.b_at_theta_b_prime, Outcome::Minus);
        assert_eq!(reports[1].s_value, 2.0);
        let distinct: std::collections::HashSet<_> = reports.iter().map(|r| r.strategy).collect();
        assert_eq!(distinct.len(), 16);
    }

    #[test]
    fn every_vertex_sits_on_the_bound() {
        for s in DeterministicStrategy::all() {
            let [a, ap, b, bp] = [
                s.a_at_theta_a,
                s.a_at_theta_a_prime,
                s.b_at_theta_b,
                s.b_at_theta_b_prime,
            ]
            .map(|o| f64::from(o.sign()));
            // S = a(b − b') + a'(b + b'): one bracket is 0, the other ±2
            let factored = a * (b - bp) + ap * (b + bp);
            assert_eq!(s.chsh(), factored);
            assert_eq!(s.chsh().abs(), 2.0);
        }
    }

    #[test]
    fn mixture_examples() {
        assert_eq!(mixture_chsh(&[1.0 / 16.0; 16]).unwrap(), 0.0);
        for i in 0..16 {
            let mut w = [0.0; 16];
            w[i] = 1.0;
            assert_eq!(mixture_chsh(&w).unwrap().abs(), 2.0);
        }
        assert!(mixture_chsh(&[0.1; 16]).is_err());
        let mut neg = [0.0; 16];
        neg[0] = 1.5;
        neg[1] = -0.5;
        assert!(mixture_chsh(&neg).is_err());
    }

    #[test]
    fn random_mixtures_respect_bound() {
        let s = ChshSettings::maximal_violation();
        let r = max_mixture_chsh(&s, 10_000, 3).unwrap();
        assert!(r.max_abs_s <= 2.0 + 1e-12);
        assert!(r.max_abs_s > 0.5);
        assert_eq!(r.vertex_max_abs_s, 2.0);
        assert!(max_mixture_chsh(&s, 0, 3).is_err());
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(points_per_dim(10, 1), 10);
        assert_eq!(points_per_dim(10, 2), 3);
        assert_eq!(points_per_dim(9, 2), 3);
        assert_eq!(points_per_dim(8, 3), 2);
        assert_eq!(points_per_dim(1, 2), 1);
        assert_eq!(points_per_dim(u64::MAX, 2), 4_294_967_295);
    }

    #[test]
    fn optimizer_errors() {
        let s = ChshSettings::maximal_violation();
        assert!(matches!(
            optimize_parametric("nope", &s, 5, 100, 1),
            Err(Error::NotFound(_))
        ));
        assert!(optimize_parametric("bell_sign_offset", &s, 0, 100, 1).is_err());
        assert!(optimize_parametric("bell_sign_offset", &s, 5, 0, 1).is_err());
        assert!(family("threshold_cutoff").unwrap().build(&[0.5]).is_err());
    }

    #[test]
    fn optimizer_stays_within_bound() {
        let s = ChshSettings::maximal_violation();
        for name in ["bell_sign_offset", "threshold_cutoff"] {
            let r = optimize_parametric(name, &s, 25, 20_000, 7).unwrap();
            assert!(r.best_abs_s <= 2.0 + 5.0 * r.standard_error, "{r:?}");
            assert!(r.best_abs_s >= 2.0 - 5.0 * r.standard_error, "{r:?}");
            assert_eq!(r.parameters.len(), family(name).unwrap().params.len());
        }
    }

    proptest! {
        #[test]
        fn mixture_is_weighted_vertex_sum(raw in prop::array::uniform16(0.0f64..1.0)) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let w = raw.map(|x| x / total);
            let s = mixture_chsh(&w).unwrap();
            prop_assert!(s.abs() <= 2.0 + 1e-12);
            let manual: f64 = DeterministicStrategy::all().iter().zip(&w).map(|(v, x)| x * v.chsh()).sum();
            prop_assert_eq!(s, manual);
        }
    }
}
