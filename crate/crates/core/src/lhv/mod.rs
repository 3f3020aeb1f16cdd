//! Hidden-variable models.
//!
//! A model draws `λ = (λ_ph, λ_DL, λ_DR)` from a factorized density and maps
//! it to a pair of `±1` outcomes. Local models hand each response function
//! only the photon variables, its own detector's variables and its own angle,
//! so a local model cannot consult the far side even by accident.

mod builtin;
mod checks;
mod estimate;
mod model;

pub use builtin::{
    bell_sign, bell_sign_detector_noise, bell_sign_offset, builtin_model, builtin_model_with,
    frame_skewed_bell_sign, qm_mimic_nonlocal, threshold_cutoff, ModelParams, BUILTIN_MODELS,
    DEFAULT_NOISE_RATE,
};
pub use checks::{
    check_detector_independence, check_no_signaling, check_surface_coincidence,
    check_velocity_independence, CheckReport,
};
pub use estimate::{estimate_distribution, estimate_tally};
pub use model::{
    DetectorSampler, JointResponse, LambdaDrawer, LambdaSample, LhvModel, LocalResponse, Locality,
    ModelBuilder, PhotonSampler,
};
