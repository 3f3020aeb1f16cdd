//! Checkers for the conditions a hidden-variable model must meet to stand
//! in for the quantum predictions.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::distribution::tally_index;
use crate::error::{invalid, Result};
use crate::math;
use crate::quantum::{Angle, Outcome};
use crate::relativity::FrameVelocity;
use crate::rng::map_chunks;

use super::estimate::estimate_tally;
use super::model::{LhvModel, Locality};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub n_samples: u64,
    pub passed: bool,
    pub details: String,
}

impl CheckReport {
    fn new(
        check_name: &str,
        statistic: f64,
        threshold: f64,
        n_samples: u64,
        details: String,
    ) -> Self {
        CheckReport {
            check_name: check_name.into(),
            statistic,
            threshold,
            n_samples,
            passed: statistic <= threshold,
            details,
        }
    }
}

fn require_samples(n: u64) -> Result<()> {
    if n == 0 {
        Err(invalid!("sample count must be at least 1"))
    } else {
        Ok(())
    }
}

/// Estimates `P_R+(θ_R)` under each left angle from the same seed and reports
/// the largest pairwise difference in units of its pooled standard error.
pub fn check_no_signaling(
    model: &LhvModel,
    theta_r: Angle,
    theta_l_list: &[Angle],
    n: u64,
    seed: u64,
    sigma_threshold: f64,
) -> Result<CheckReport> {
    if theta_l_list.len() < 2 {
        return Err(invalid!(
            "no-signaling check needs at least two left angles"
        ));
    }
    require_samples(n)?;
    if sigma_threshold.is_nan() || sigma_threshold < 0.0 {
        return Err(invalid!(
            "sigma threshold must be non-negative, got {sigma_threshold}"
        ));
    }
    let nf = n as f64;
    let marginals = theta_l_list
        .iter()
        .map(|&tl| estimate_tally(model, tl, theta_r, n, seed).map(|t| (t[0] + t[2]) as f64 / nf))
        .collect::<Result<Vec<f64>>>()?;

    let mut statistic: f64 = 0.0;
    for (i, &p) in marginals.iter().enumerate() {
        for &q in &marginals[i + 1..] {
            let diff = math::abs(p - q);
            let pooled = math::sqrt(p * (1.0 - p) / nf + q * (1.0 - q) / nf);
            let z = if diff == 0.0 {
                0.0
            } else if pooled == 0.0 {
                f64::INFINITY
            } else {
                diff / pooled
            };
            statistic = statistic.max(z);
        }
    }
    let (lo, hi) = marginals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    let caveat = match model.locality() {
        Locality::Local => "the model is local by construction",
        Locality::Nonlocal => "the model is NONLOCAL: its right outcomes read the left angle",
    };
    let details = format!(
        "P_R+ ranged over [{lo}, {hi}] across {} left angles; {caveat}. \
         Passing no-signaling does not certify locality.",
        marginals.len()
    );
    Ok(CheckReport::new(
        "no_signaling",
        statistic,
        sigma_threshold,
        n,
        details,
    ))
}

/// Fraction of draws with equal outcomes at `θ_L = θ_R = θ`, i.e. the mass of
/// `Ω++ ∪ Ω−−`. The two outcome surfaces coincide only if this is zero.
pub fn check_surface_coincidence(
    model: &LhvModel,
    theta: Angle,
    n: u64,
    seed: u64,
) -> Result<CheckReport> {
    require_samples(n)?;
    let t = estimate_tally(model, theta, theta, n, seed)?;
    let equal = t[tally_index(Outcome::Plus, Outcome::Plus)]
        + t[tally_index(Outcome::Minus, Outcome::Minus)];
    let statistic = equal as f64 / n as f64;
    let details = format!("{equal} of {n} draws gave equal outcomes at equal angles {theta}");
    Ok(CheckReport::new(
        "surface_coincidence",
        statistic,
        0.0,
        n,
        details,
    ))
}

/// Holds each photon draw fixed, redraws the detector variables `resamples`
/// times, and reports the fraction of photon draws whose left or right
/// outcome changed.
pub fn check_detector_independence(
    model: &LhvModel,
    theta_l: Angle,
    theta_r: Angle,
    n: u64,
    resamples: u64,
    seed: u64,
) -> Result<CheckReport> {
    require_samples(n)?;
    if resamples < 2 {
        return Err(invalid!(
            "need at least 2 detector resamples, got {resamples}"
        ));
    }
    let changed: u64 = map_chunks(n, |chunk, range| {
        let mut drawer = model.drawer(seed, chunk);
        let mut changed = 0u64;
        for _ in range {
            drawer.draw(theta_l, theta_r);
            let first = drawer.respond(theta_l, theta_r);
            let mut differs = false;
            for _ in 1..resamples {
                drawer.redraw_detectors(theta_l, theta_r);
                differs |= drawer.respond(theta_l, theta_r) != first;
            }
            changed += u64::from(differs);
        }
        changed
    })
    .into_iter()
    .sum();
    let statistic = changed as f64 / n as f64;
    let details = if model.has_detector_vars() {
        format!("{changed} of {n} photon draws changed outcome over {resamples} detector redraws")
    } else {
        format!("model has no detector variables; {changed} of {n} photon draws changed")
    };
    Ok(CheckReport::new(
        "detector_independence",
        statistic,
        0.0,
        n,
        details,
    ))
}

/// Runs a frame-tagged model family through the equal-angle coincidence check
/// for every pair `(v_A, v_B)` of observer velocities, and separately
/// compares each side's outcome partition across velocities on common draws
/// of `λ`. Coincidence for all velocity pairs forces identical partitions;
/// the statistic is the larger of the worst coincidence mass and the worst
/// partition mismatch.
pub fn check_velocity_independence<F>(
    family: F,
    theta: Angle,
    velocities: &[FrameVelocity],
    n: u64,
    seed: u64,
) -> Result<CheckReport>
where
    F: Fn(FrameVelocity, FrameVelocity) -> LhvModel,
{
    if velocities.len() < 2 {
        return Err(invalid!(
            "velocity check needs at least two frame velocities"
        ));
    }
    require_samples(n)?;
    let mut worst_coincidence: f64 = 0.0;
    for &va in velocities {
        for &vb in velocities {
            let r = check_surface_coincidence(&family(va, vb), theta, n, seed)?;
            worst_coincidence = worst_coincidence.max(r.statistic);
        }
    }

    let v0 = velocities[0];
    let reference = family(v0, v0);
    let mut worst_partition: f64 = 0.0;
    for &v in &velocities[1..] {
        // v_A moves the right surface, v_B the left one.
        for (model, side) in [(family(v, v0), 1usize), (family(v0, v), 0usize)] {
            let mismatched = partition_mismatch(&reference, &model, side, theta, n, seed);
            worst_partition = worst_partition.max(mismatched as f64 / n as f64);
        }
    }
    let statistic = worst_coincidence.max(worst_partition);
    let details = format!(
        "max equal-angle coincidence mass {worst_coincidence} over {} velocity pairs; \
         max outcome-partition mismatch across velocities {worst_partition}",
        velocities.len() * velocities.len()
    );
    Ok(CheckReport::new(
        "velocity_independence",
        statistic,
        0.0,
        n,
        details,
    ))
}

fn partition_mismatch(
    reference: &LhvModel,
    other: &LhvModel,
    side: usize,
    theta: Angle,
    n: u64,
    seed: u64,
) -> u64 {
    let pick = |o: (Outcome, Outcome)| if side == 0 { o.0 } else { o.1 };
    map_chunks(n, |chunk, range| {
        let mut d_ref = reference.drawer(seed, chunk);
        let mut d_other = other.drawer(seed, chunk);
        let mut mismatched = 0u64;
        for _ in range {
            d_ref.draw(theta, theta);
            d_other.draw(theta, theta);
            let same = pick(d_ref.respond(theta, theta)) == pick(d_other.respond(theta, theta));
            mismatched += u64::from(!same);
        }
        mismatched
    })
    .into_iter()
    .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lhv::{
        bell_sign, bell_sign_detector_noise, frame_skewed_bell_sign, qm_mimic_nonlocal,
    };
    use core::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn a(x: f64) -> Angle {
        Angle::from_radians(x).unwrap()
    }

    fn left_angles() -> [Angle; 3] {
        [a(0.0), a(FRAC_PI_8), a(FRAC_PI_4)]
    }

    #[test]
    fn no_signaling_passes_for_local_and_mimic() {
        let r = check_no_signaling(&bell_sign(), a(0.0), &left_angles(), 100_000, 1, 4.0).unwrap();
        assert!(r.passed);
        assert_eq!(r.statistic, 0.0);
        assert!(r.details.contains("does not certify locality"));

        let r = check_no_signaling(
            &qm_mimic_nonlocal(),
            a(0.0),
            &left_angles(),
            100_000,
            1,
            4.0,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.details.contains("NONLOCAL"));
        assert!(r.details.contains("does not certify locality"));
    }

    #[test]
    fn no_signaling_flags_a_signaling_model() {
        // right outcome copies the sign of θ_L: a blatant signal
        let m = LhvModel::builder("signal").nonlocal(|_, tl, _| {
            let o = Outcome::from_sign_of(tl.radians() - 0.1);
            (o, o)
        });
        let r = check_no_signaling(&m, a(0.0), &[a(0.0), a(1.0)], 1_000, 1, 4.0).unwrap();
        assert!(!r.passed);
        assert!(r.statistic.is_infinite());
    }

    #[test]
    fn no_signaling_input_errors() {
        assert!(check_no_signaling(&bell_sign(), a(0.0), &[a(0.0)], 10, 1, 4.0).is_err());
        assert!(check_no_signaling(&bell_sign(), a(0.0), &left_angles(), 0, 1, 4.0).is_err());
        assert!(check_no_signaling(&bell_sign(), a(0.0), &left_angles(), 10, 1, f64::NAN).is_err());
    }

    #[test]
    fn surface_coincidence() {
        for theta in [0.0, 0.3, -1.7] {
            let r = check_surface_coincidence(&bell_sign(), a(theta), 100_000, 2).unwrap();
            assert!(r.passed);
            assert_eq!(r.statistic, 0.0);
            let r = check_surface_coincidence(&qm_mimic_nonlocal(), a(theta), 100_000, 2).unwrap();
            assert!(r.passed);
        }
        let n = 100_000;
        let eps = 0.1;
        let r = check_surface_coincidence(&bell_sign_detector_noise(eps).unwrap(), a(0.2), n, 2)
            .unwrap();
        assert!(!r.passed);
        let tol = 3.0 * (eps * (1.0 - eps) / n as f64).sqrt();
        assert!((r.statistic - eps).abs() <= tol, "{}", r.statistic);
        assert!(check_surface_coincidence(&bell_sign(), a(0.0), 0, 2).is_err());
    }

    #[test]
    fn detector_independence() {
        let r = check_detector_independence(&bell_sign(), a(0.1), a(0.5), 10_000, 8, 4).unwrap();
        assert!(r.passed);
        assert_eq!(r.statistic, 0.0);
        let noisy = bell_sign_detector_noise(0.1).unwrap();
        let r = check_detector_independence(&noisy, a(0.1), a(0.5), 10_000, 8, 4).unwrap();
        assert!(!r.passed);
        // P(not all 8 redraws land on the same side of ε) = 1 − 0.9⁸ − 0.1⁸
        let expected = 1.0 - 0.9f64.powi(8) - 0.1f64.powi(8);
        assert!((r.statistic - expected).abs() < 5.0 * (expected * (1.0 - expected) / 1e4).sqrt());
        assert!(check_detector_independence(&bell_sign(), a(0.0), a(0.0), 10, 1, 4).is_err());
        assert!(check_detector_independence(&bell_sign(), a(0.0), a(0.0), 0, 4, 4).is_err());
    }

    #[test]
    fn velocity_independence() {
        let vs = [0.0, 0.6, -0.9].map(|b| FrameVelocity::new(b).unwrap());
        let r = check_velocity_independence(frame_skewed_bell_sign(0.0), a(0.3), &vs, 20_000, 5)
            .unwrap();
        assert!(r.passed, "{r:?}");
        let r = check_velocity_independence(frame_skewed_bell_sign(0.5), a(0.3), &vs, 20_000, 5)
            .unwrap();
        assert!(!r.passed);
        assert!(r.statistic > 0.1);
        assert!(
            check_velocity_independence(frame_skewed_bell_sign(0.0), a(0.3), &vs[..1], 10, 5)
                .is_err()
        );
    }
}
