use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quantum::{Angle, Outcome};
use crate::rng::{self, Lane, StreamRng};

/// Fills the photon variables.
pub type PhotonSampler = Arc<dyn Fn(&mut StreamRng, &mut [f64]) + Send + Sync>;
/// Fills one detector's variables; receives that detector's angle only.
pub type DetectorSampler = Arc<dyn Fn(&mut StreamRng, Angle, &mut [f64]) + Send + Sync>;
/// `(λ_ph, λ_D, θ) -> outcome` for one side.
pub type LocalResponse = Arc<dyn Fn(&[f64], &[f64], Angle) -> Outcome + Send + Sync>;
/// Full-information response used by nonlocal models.
pub type JointResponse =
    Arc<dyn Fn(&LambdaSample, Angle, Angle) -> (Outcome, Outcome) + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locality {
    Local,
    Nonlocal,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LambdaSample {
    pub photon_vars: Vec<f64>,
    pub detector_l_vars: Vec<f64>,
    pub detector_r_vars: Vec<f64>,
}

#[derive(Clone)]
enum Response {
    Local {
        left: LocalResponse,
        right: LocalResponse,
    },
    Nonlocal(JointResponse),
}

#[derive(Clone)]
pub struct LhvModel {
    name: String,
    photon_dim: usize,
    detector_l_dim: usize,
    detector_r_dim: usize,
    photon: Option<PhotonSampler>,
    detector_l: Option<DetectorSampler>,
    detector_r: Option<DetectorSampler>,
    response: Response,
}

impl fmt::Debug for LhvModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LhvModel")
            .field("name", &self.name)
            .field("photon_dim", &self.photon_dim)
            .field("detector_l_dim", &self.detector_l_dim)
            .field("detector_r_dim", &self.detector_r_dim)
            .field("locality", &self.locality())
            .finish()
    }
}

pub struct ModelBuilder {
    name: String,
    photon_dim: usize,
    detector_l_dim: usize,
    detector_r_dim: usize,
    photon: Option<PhotonSampler>,
    detector_l: Option<DetectorSampler>,
    detector_r: Option<DetectorSampler>,
}

impl ModelBuilder {
    pub fn photon<F>(mut self, dim: usize, sampler: F) -> Self
    where
        F: Fn(&mut StreamRng, &mut [f64]) + Send + Sync + 'static,
    {
        self.photon_dim = dim;
        self.photon = Some(Arc::new(sampler));
        self
    }

    pub fn detector_left<F>(mut self, dim: usize, sampler: F) -> Self
    where
        F: Fn(&mut StreamRng, Angle, &mut [f64]) + Send + Sync + 'static,
    {
        self.detector_l_dim = dim;
        self.detector_l = Some(Arc::new(sampler));
        self
    }

    pub fn detector_right<F>(mut self, dim: usize, sampler: F) -> Self
    where
        F: Fn(&mut StreamRng, Angle, &mut [f64]) + Send + Sync + 'static,
    {
        self.detector_r_dim = dim;
        self.detector_r = Some(Arc::new(sampler));
        self
    }

    pub fn local<L, R>(self, left: L, right: R) -> LhvModel
    where
        L: Fn(&[f64], &[f64], Angle) -> Outcome + Send + Sync + 'static,
        R: Fn(&[f64], &[f64], Angle) -> Outcome + Send + Sync + 'static,
    {
        self.finish(Response::Local {
            left: Arc::new(left),
            right: Arc::new(right),
        })
    }

    pub fn nonlocal<J>(self, joint: J) -> LhvModel
    where
        J: Fn(&LambdaSample, Angle, Angle) -> (Outcome, Outcome) + Send + Sync + 'static,
    {
        self.finish(Response::Nonlocal(Arc::new(joint)))
    }

    fn finish(self, response: Response) -> LhvModel {
        LhvModel {
            name: self.name,
            photon_dim: self.photon_dim,
            detector_l_dim: self.detector_l_dim,
            detector_r_dim: self.detector_r_dim,
            photon: self.photon,
            detector_l: self.detector_l,
            detector_r: self.detector_r,
            response,
        }
    }
}

impl LhvModel {
    pub fn builder(name: impl ToString) -> ModelBuilder {
        ModelBuilder {
            name: name.to_string(),
            photon_dim: 0,
            detector_l_dim: 0,
            detector_r_dim: 0,
            photon: None,
            detector_l: None,
            detector_r: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn photon_dim(&self) -> usize {
        self.photon_dim
    }

    pub fn detector_l_dim(&self) -> usize {
        self.detector_l_dim
    }

    pub fn detector_r_dim(&self) -> usize {
        self.detector_r_dim
    }

    pub fn has_detector_vars(&self) -> bool {
        self.detector_l_dim + self.detector_r_dim > 0
    }

    pub fn locality(&self) -> Locality {
        match self.response {
            Response::Local { .. } => Locality::Local,
            Response::Nonlocal(_) => Locality::Nonlocal,
        }
    }

    pub fn empty_sample(&self) -> LambdaSample {
        LambdaSample {
            photon_vars: vec![0.0; self.photon_dim],
            detector_l_vars: vec![0.0; self.detector_l_dim],
            detector_r_vars: vec![0.0; self.detector_r_dim],
        }
    }

    /// Outcome pair for a given `λ`. Checks dimensions and finiteness.
    pub fn respond(
        &self,
        lambda: &LambdaSample,
        theta_l: Angle,
        theta_r: Angle,
    ) -> Result<(Outcome, Outcome)> {
        let dims = [
            ("photon", lambda.photon_vars.len(), self.photon_dim),
            (
                "left detector",
                lambda.detector_l_vars.len(),
                self.detector_l_dim,
            ),
            (
                "right detector",
                lambda.detector_r_vars.len(),
                self.detector_r_dim,
            ),
        ];
        for (what, got, want) in dims {
            if got != want {
                return Err(invalid!(
                    "model {} expects {want} {what} variables, got {got}",
                    self.name
                ));
            }
        }
        let all = lambda
            .photon_vars
            .iter()
            .chain(&lambda.detector_l_vars)
            .chain(&lambda.detector_r_vars);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(invalid!("hidden variables must be finite"));
        }
        Ok(self.respond_unchecked(lambda, theta_l, theta_r))
    }

    pub(crate) fn respond_unchecked(
        &self,
        lambda: &LambdaSample,
        theta_l: Angle,
        theta_r: Angle,
    ) -> (Outcome, Outcome) {
        match &self.response {
            Response::Local { left, right } => (
                left(&lambda.photon_vars, &lambda.detector_l_vars, theta_l),
                right(&lambda.photon_vars, &lambda.detector_r_vars, theta_r),
            ),
            Response::Nonlocal(joint) => joint(lambda, theta_l, theta_r),
        }
    }

    /// A sampler over the chunk `chunk` of the seeded stream family.
    pub fn drawer(&self, seed: u64, chunk: u64) -> LambdaDrawer<'_> {
        LambdaDrawer {
            model: self,
            photon_rng: rng::stream(seed, chunk, Lane::Photon),
            left_rng: rng::stream(seed, chunk, Lane::DetectorLeft),
            right_rng: rng::stream(seed, chunk, Lane::DetectorRight),
            sample: self.empty_sample(),
        }
    }
}

/// Draws successive `λ` values into a reused buffer. Each factor of the
/// density reads its own random stream, so the right-hand variables of the
/// `k`-th draw never depend on what the left side consumed.
pub struct LambdaDrawer<'m> {
    model: &'m LhvModel,
    photon_rng: StreamRng,
    left_rng: StreamRng,
    right_rng: StreamRng,
    sample: LambdaSample,
}

impl LambdaDrawer<'_> {
    pub fn draw(&mut self, theta_l: Angle, theta_r: Angle) -> &LambdaSample {
        if let Some(f) = &self.model.photon {
            f(&mut self.photon_rng, &mut self.sample.photon_vars);
        }
        self.redraw_detectors(theta_l, theta_r)
    }

    /// Redraws only the detector variables, keeping `λ_ph`.
    pub fn redraw_detectors(&mut self, theta_l: Angle, theta_r: Angle) -> &LambdaSample {
        if let Some(f) = &self.model.detector_l {
            f(
                &mut self.left_rng,
                theta_l,
                &mut self.sample.detector_l_vars,
            );
        }
        if let Some(f) = &self.model.detector_r {
            f(
                &mut self.right_rng,
                theta_r,
                &mut self.sample.detector_r_vars,
            );
        }
        &self.sample
    }

    pub fn sample(&self) -> &LambdaSample {
        &self.sample
    }

    pub fn respond(&self, theta_l: Angle, theta_r: Angle) -> (Outcome, Outcome) {
        self.model.respond_unchecked(&self.sample, theta_l, theta_r)
    }
}
