use crate::distribution::{add_tally, tally_index, JointDistribution, Tally};
use crate::error::{invalid, Result};
use crate::quantum::Angle;
use crate::rng::map_chunks;

use super::model::LhvModel;

/// Joint outcome counts over `n` independent draws of `λ`.
pub fn estimate_tally(
    model: &LhvModel,
    theta_l: Angle,
    theta_r: Angle,
    n: u64,
    seed: u64,
) -> Result<Tally> {
    if n == 0 {
        return Err(invalid!("sample count must be at least 1"));
    }
    let parts = map_chunks(n, |chunk, range| {
        let mut drawer = model.drawer(seed, chunk);
        let mut tally = [0u64; 4];
        for _ in range {
            drawer.draw(theta_l, theta_r);
            let (l, r) = drawer.respond(theta_l, theta_r);
            tally[tally_index(l, r)] += 1;
        }
        tally
    });
    let mut total = [0u64; 4];
    for t in &parts {
        add_tally(&mut total, t);
    }
    Ok(total)
}

/// Monte Carlo estimate of the joint distribution: relative frequencies of
/// the four outcome regions with `se = sqrt(p(1−p)/n)`.
pub fn estimate_distribution(
    model: &LhvModel,
    theta_l: Angle,
    theta_r: Angle,
    n: u64,
    seed: u64,
) -> Result<JointDistribution> {
    JointDistribution::from_counts(&estimate_tally(model, theta_l, theta_r, n, seed)?)
}
