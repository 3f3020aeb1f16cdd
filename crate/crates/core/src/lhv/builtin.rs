use alloc::format;
use core::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::math;
use crate::quantum::{Angle, Outcome};
use crate::relativity::FrameVelocity;

use super::model::LhvModel;

pub const BUILTIN_MODELS: [&str; 3] =
    ["bell_sign", "bell_sign_detector_noise", "qm_mimic_nonlocal"];

/// Default flip rate of `bell_sign_detector_noise`.
pub const DEFAULT_NOISE_RATE: f64 = 0.1;

/// Tunable knobs of the built-in models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Right-detector flip rate for `bell_sign_detector_noise`.
    pub epsilon: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            epsilon: DEFAULT_NOISE_RATE,
        }
    }
}

pub fn builtin_model(name: &str) -> Result<LhvModel> {
    builtin_model_with(name, &ModelParams::default())
}

pub fn builtin_model_with(name: &str, params: &ModelParams) -> Result<LhvModel> {
    match name {
        "bell_sign" => Ok(bell_sign()),
        "bell_sign_detector_noise" => bell_sign_detector_noise(params.epsilon),
        "qm_mimic_nonlocal" => Ok(qm_mimic_nonlocal()),
        other => Err(Error::NotFound(format!(
            "no built-in model named {other:?} (known: {})",
            BUILTIN_MODELS.join(", ")
        ))),
    }
}

fn sign_response(phi: f64, theta: f64) -> Outcome {
    Outcome::from_sign_of(math::cos(2.0 * (phi - theta)))
}

fn uniform_angle(rng: &mut crate::rng::StreamRng, out: &mut [f64]) {
    out[0] = rng.random::<f64>() * TAU;
}

/// `φ ~ U[0, 2π)`, `A = sign cos 2(φ − θ_L)`, `B = −sign cos 2(φ − θ_R)`.
///
/// Perfectly anticorrelated at equal angles; the correlation is the
/// triangle wave `E(Δ) = 4|Δ|/π − 1` on `|Δ| ≤ π/2`.
pub fn bell_sign() -> LhvModel {
    bell_sign_offset_named("bell_sign", 0.0)
}

/// `bell_sign` whose right detector is rotated by an extra `offset`.
pub fn bell_sign_offset(offset: f64) -> LhvModel {
    bell_sign_offset_named("bell_sign_offset", offset)
}

fn bell_sign_offset_named(name: &str, offset: f64) -> LhvModel {
    LhvModel::builder(name).photon(1, uniform_angle).local(
        |ph, _, theta_l| sign_response(ph[0], theta_l.radians()),
        move |ph, _, theta_r| -sign_response(ph[0], theta_r.radians() + offset),
    )
}

/// `bell_sign` with one uniform right-detector variable `u`; the right
/// outcome is flipped when `u < epsilon`.
pub fn bell_sign_detector_noise(epsilon: f64) -> Result<LhvModel> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid!("noise rate must lie in [0, 1], got {epsilon}"));
    }
    Ok(LhvModel::builder("bell_sign_detector_noise")
        .photon(1, uniform_angle)
        .detector_right(1, |rng, _, out| out[0] = rng.random::<f64>())
        .local(
            |ph, _, theta_l| sign_response(ph[0], theta_l.radians()),
            move |ph, det, theta_r| {
                let b = -sign_response(ph[0], theta_r.radians());
                if det[0] < epsilon {
                    -b
                } else {
                    b
                }
            },
        ))
}

/// Reproduces the quantum joint distribution by letting the right side read
/// `θ_L`: with `u ~ U[0, 1)` the right outcome is `−A` when
/// `u < cos²(θ_L − θ_R)` and `+A` otherwise.
pub fn qm_mimic_nonlocal() -> LhvModel {
    LhvModel::builder("qm_mimic_nonlocal")
        .photon(2, |rng, out| {
            out[0] = rng.random::<f64>() * TAU;
            out[1] = rng.random::<f64>();
        })
        .nonlocal(|lambda, theta_l, theta_r| {
            let phi = lambda.photon_vars[0];
            let u = lambda.photon_vars[1];
            let a = sign_response(phi, theta_l.radians());
            let c = math::cos(theta_l.radians() - theta_r.radians());
            let b = if u < c * c { -a } else { a };
            (a, b)
        })
}

/// `λ ~ U[0, 1)`. Each side reads `+1` when `frac(λ + θ/π) < cutoff`, the
/// right side with an extra rotation `offset` and a global sign flip.
pub fn threshold_cutoff(cutoff: f64, offset: f64) -> LhvModel {
    let side = move |lambda: f64, theta: f64| {
        let x = lambda + theta / PI;
        if x - math::floor(x) < cutoff {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    };
    LhvModel::builder("threshold_cutoff")
        .photon(1, |rng, out| out[0] = rng.random::<f64>())
        .local(
            move |ph, _, theta_l| side(ph[0], theta_l.radians()),
            move |ph, _, theta_r| -side(ph[0], theta_r.radians() + offset),
        )
}

/// A `bell_sign` variant whose outcome surfaces may move with the observer:
/// the right surface is rotated by `skew·β_A` (frame A sees the right
/// detection first) and the left one by `skew·β_B`. With `skew = 0` the
/// surfaces are frame independent.
pub fn frame_skewed_bell_sign(
    skew: f64,
) -> impl Fn(FrameVelocity, FrameVelocity) -> LhvModel + Send + Sync {
    move |v_a: FrameVelocity, v_b: FrameVelocity| {
        let left_shift = skew * v_b.beta();
        let right_shift = skew * v_a.beta();
        LhvModel::builder("frame_skewed_bell_sign")
            .photon(1, uniform_angle)
            .local(
                move |ph, _, theta_l: Angle| sign_response(ph[0], theta_l.radians() + left_shift),
                move |ph, _, theta_r: Angle| -sign_response(ph[0], theta_r.radians() + right_shift),
            )
    }
}
