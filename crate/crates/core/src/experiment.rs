//! Trial-by-trial simulation of the two-photon experiment.
//!
//! Each block of four consecutive trials uses the four setting pairs in a
//! random order, so every trial's pair is uniformly distributed, each
//! correlation is estimated from its own trials, and any run of at least
//! four trials populates all four correlations.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chsh::{
    chsh_from_correlations, correlation_from_distribution, violation_sigmas, ChshResult,
    ChshSettings, Correlation, SettingPair,
};
use crate::distribution::{add_tally, tally_index, JointDistribution, Tally};
use crate::error::{invalid, Result};
use crate::lhv::LhvModel;
use crate::quantum::{exact_distribution, Outcome};
use crate::rng::{self, map_chunks, Lane};

/// How setting pairs are assigned to trials; echoed in every summary.
pub const SETTING_CHOICE: &str = "uniform per trial, random order within each block of 4 trials";

pub const MIN_TRIALS: u64 = 4;

#[derive(Debug, Clone)]
pub enum Source {
    /// Sample outcome pairs from the exact quantum distribution.
    Quantum,
    Model(LhvModel),
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Quantum => "qm".to_string(),
            Source::Model(m) => m.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub setting_pair: SettingPair,
    pub outcome_l: Outcome,
    pub outcome_r: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub source: String,
    pub seed: Option<u64>,
    pub settings: ChshSettings,
    pub setting_choice: String,
    pub n_trials: u64,
    /// Trials per pair in `ab, abp, apb, apbp` order.
    pub pair_counts: [u64; 4],
    /// Joint outcome counts `[++, +−, −+, −−]` per pair.
    pub pair_tallies: [Tally; 4],
    pub chsh: ChshResult,
    /// `None` when the CHSH standard error is zero.
    pub violation_sigmas: Option<f64>,
}

impl ExperimentSummary {
    pub fn with_provenance(mut self, source: impl Into<String>, seed: Option<u64>) -> Self {
        self.source = source.into();
        self.seed = seed;
        self
    }

    pub fn pair_distribution(&self, pair: SettingPair) -> Result<JointDistribution> {
        JointDistribution::from_counts(&self.pair_tallies[pair.index()])
    }
}

struct ChunkOutput {
    tallies: [Tally; 4],
    records: Vec<TrialRecord>,
}

fn simulate(
    source: &Source,
    settings: &ChshSettings,
    n_trials: u64,
    seed: u64,
    keep_records: bool,
) -> Result<Vec<ChunkOutput>> {
    if n_trials < MIN_TRIALS {
        return Err(invalid!(
            "at least {MIN_TRIALS} trials are needed to populate all four correlations, got {n_trials}"
        ));
    }
    let pairs = settings.pairs();
    // cumulative P(++), P(++)+P(+−), ... per setting pair
    let cumulative = pairs.map(|(l, r)| {
        let p = exact_distribution(l, r).probabilities();
        [p[0], p[0] + p[1], p[0] + p[1] + p[2]]
    });
    let outcomes = [
        (Outcome::Plus, Outcome::Plus),
        (Outcome::Plus, Outcome::Minus),
        (Outcome::Minus, Outcome::Plus),
        (Outcome::Minus, Outcome::Minus),
    ];

    Ok(map_chunks(n_trials, |chunk, range| {
        let mut trial_rng = rng::stream(seed, chunk, Lane::Trial);
        let mut drawer = match source {
            Source::Model(m) => Some(m.drawer(seed, chunk)),
            Source::Quantum => None,
        };
        let mut out = ChunkOutput {
            tallies: [[0; 4]; 4],
            records: if keep_records {
                Vec::with_capacity((range.end - range.start) as usize)
            } else {
                Vec::new()
            },
        };
        let mut block = SettingPair::ALL;
        for trial in range {
            if trial % 4 == 0 {
                block.shuffle(&mut trial_rng);
            }
            let pair = block[(trial % 4) as usize];
            let (l, r) = match &mut drawer {
                None => {
                    let u: f64 = trial_rng.random();
                    let k = cumulative[pair.index()]
                        .iter()
                        .take_while(|&&c| u >= c)
                        .count();
                    outcomes[k]
                }
                Some(d) => {
                    let (tl, tr) = pairs[pair.index()];
                    d.draw(tl, tr);
                    d.respond(tl, tr)
                }
            };
            out.tallies[pair.index()][tally_index(l, r)] += 1;
            if keep_records {
                out.records.push(TrialRecord {
                    trial_index: trial,
                    setting_pair: pair,
                    outcome_l: l,
                    outcome_r: r,
                });
            }
        }
        out
    }))
}

fn summarize(
    tallies: [Tally; 4],
    settings: &ChshSettings,
    source: String,
    seed: Option<u64>,
) -> Result<ExperimentSummary> {
    let mut correlations = [Correlation::exact(0.0); 4];
    for pair in SettingPair::ALL {
        let t = &tallies[pair.index()];
        if t.iter().sum::<u64>() == 0 {
            return Err(invalid!("no trials for setting pair {pair}"));
        }
        correlations[pair.index()] =
            correlation_from_distribution(&JointDistribution::from_counts(t)?)?;
    }
    let chsh = chsh_from_correlations(correlations)?;
    let sigmas = match chsh.standard_error {
        Some(se) if se > 0.0 => Some(violation_sigmas(chsh.s_value, se)?),
        _ => None,
    };
    let pair_counts = tallies.map(|t| t.iter().sum());
    Ok(ExperimentSummary {
        source,
        seed,
        settings: *settings,
        setting_choice: SETTING_CHOICE.to_string(),
        n_trials: pair_counts.iter().sum(),
        pair_counts,
        pair_tallies: tallies,
        chsh,
        violation_sigmas: sigmas,
    })
}

pub fn run_experiment(
    source: &Source,
    settings: &ChshSettings,
    n_trials: u64,
    seed: u64,
) -> Result<ExperimentSummary> {
    let chunks = simulate(source, settings, n_trials, seed, false)?;
    let mut tallies = [[0u64; 4]; 4];
    for c in &chunks {
        for (acc, t) in tallies.iter_mut().zip(&c.tallies) {
            add_tally(acc, t);
        }
    }
    summarize(tallies, settings, source.label(), Some(seed))
}

/// Like [`run_experiment`] but also returns every trial in index order.
pub fn run_experiment_with_records(
    source: &Source,
    settings: &ChshSettings,
    n_trials: u64,
    seed: u64,
) -> Result<(ExperimentSummary, Vec<TrialRecord>)> {
    let chunks = simulate(source, settings, n_trials, seed, true)?;
    let mut tallies = [[0u64; 4]; 4];
    let mut records = Vec::with_capacity(n_trials as usize);
    for c in chunks {
        for (acc, t) in tallies.iter_mut().zip(&c.tallies) {
            add_tally(acc, t);
        }
        records.extend(c.records);
    }
    let summary = summarize(tallies, settings, source.label(), Some(seed))?;
    Ok((summary, records))
}

/// Recomputes the summary from stored trials. The result carries source
/// `"records"` and no seed; see [`ExperimentSummary::with_provenance`].
pub fn estimate_from_records(
    records: &[TrialRecord],
    settings: &ChshSettings,
) -> Result<ExperimentSummary> {
    let mut tallies = [[0u64; 4]; 4];
    for r in records {
        tallies[r.setting_pair.index()][tally_index(r.outcome_l, r.outcome_r)] += 1;
    }
    summarize(tallies, settings, "records".to_string(), None)
}
