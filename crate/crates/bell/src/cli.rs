//! `bell` command-line interface.
//!
//! Exit codes: 0 on success, 1 for invalid input or usage, 2 for internal
//! failures such as an unwritable output file.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use bell_core::chsh::{chsh_from_correlations, Correlation};
use bell_core::experiment::{
    estimate_from_records, run_experiment, run_experiment_with_records, Source,
};
use bell_core::lhv::{
    builtin_model_with, check_detector_independence, check_no_signaling, check_surface_coincidence,
    check_velocity_independence, frame_skewed_bell_sign, ModelParams, DEFAULT_NOISE_RATE,
};
use bell_core::quantum::{correlation, exact_distribution};
use bell_core::relativity::{
    detection_order, event_times, gamma, invariant_interval, time_gap, DetectionOrder, EventTimes,
    Frame,
};
use bell_core::strategies::{enumerate_deterministic, max_mixture_chsh, optimize_parametric};
use bell_core::{Angle, ChshSettings, ExperimentGeometry, FrameVelocity};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::output::{self, envelope_json, Format};
use crate::trials;

const DEFAULT_SEED: u64 = 1;
const DEFAULT_TRIALS: u64 = 100_000;
const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "bell", version, about = "Bell–Aspect experiment simulator")]
struct Cli {
    /// `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// json or csv (availability depends on the command).
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact joint outcome distribution for one angle pair.
    Predict {
        #[arg(long, allow_hyphen_values = true)]
        theta_l: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        theta_r: Option<String>,
    },
    /// Quantum correlation E(Δ) sampled over [0, π].
    Curve {
        #[arg(long)]
        points: Option<usize>,
    },
    /// Exact CHSH value for four angles a,a',b,b'.
    Chsh {
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
    },
    /// Trial-by-trial Monte Carlo run of the experiment.
    Simulate(SimulateArgs),
    /// Recompute a summary from an exported trial CSV.
    Estimate {
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
        /// Source label to attach to the recomputed summary.
        #[arg(long)]
        source: Option<String>,
        /// Seed to attach to the recomputed summary.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Local hidden-variable bound tools.
    Lhv {
        #[command(subcommand)]
        command: LhvCommand,
    },
    /// Locality condition checks for a hidden-variable model.
    Check(CheckArgs),
    /// Detection times and ordering in the source frame and two boosted frames.
    Frames {
        #[arg(long)]
        distance: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// `qm` or a built-in model name.
    #[arg(long)]
    source: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    angles: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    export_trials: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum LhvCommand {
    /// S for each of the 16 deterministic local strategies.
    Enumerate {
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
        /// Also sample this many random mixtures (JSON output only).
        #[arg(long)]
        mixtures: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Grid search for the largest |S| in a local model family.
    Optimize {
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CheckKind {
    NoSignaling,
    Coincidence,
    DetectorIndependence,
    Velocity,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(value_enum)]
    kind: CheckKind,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Common angle for the coincidence and velocity checks.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta_r: Option<String>,
    /// Left angles compared by the no-signaling check.
    #[arg(long, allow_hyphen_values = true)]
    theta_l_list: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sigma threshold for the no-signaling check.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    resamples: Option<u64>,
    /// Surface rotation per unit of frame velocity (velocity check).
    #[arg(long, allow_hyphen_values = true)]
    skew: Option<f64>,
    /// Frame velocities for the velocity check.
    #[arg(long, allow_hyphen_values = true)]
    betas: Option<String>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    match execute(cli) {
        Ok(Some((text, path))) => match emit(&text, path.as_deref(), stdout) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                e.exit_code()
            }
        },
        Ok(None) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn model_params(cfg: &Config, epsilon: Option<f64>) -> Result<ModelParams> {
    Ok(ModelParams {
        epsilon: cfg.pick_or(epsilon, "epsilon", DEFAULT_NOISE_RATE)?,
    })
}

fn require_json(format: Format, command: &str) -> Result<()> {
    if format != Format::Json {
        return Err(CliError::Input(format!(
            "`{command}` only supports --format json"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct PredictInputs {
    theta_l: Angle,
    theta_r: Angle,
}

#[derive(Serialize)]
struct ChshInputs {
    angles: ChshSettings,
}

#[derive(Serialize)]
struct SimulateInputs<'a> {
    source: &'a str,
    angles: ChshSettings,
    trials: u64,
    epsilon: Option<f64>,
    export_trials: Option<String>,
}

#[derive(Serialize)]
struct FramesResult {
    gamma: f64,
    event_times: EventTimes,
    time_gap: f64,
    order_source: DetectionOrder,
    order_a: DetectionOrder,
    order_b: DetectionOrder,
    detection_interval: f64,
}

fn execute(cli: Cli) -> Result<Option<(String, Option<PathBuf>)>> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let format: Option<Format> =
        cfg.pick(cli.format.as_deref().map(str::parse).transpose()?, "format")?;
    let out_path = cli
        .output
        .clone()
        .or_else(|| cfg.raw("output").map(PathBuf::from));

    let text = match cli.command {
        Command::Predict { theta_l, theta_r } => {
            require_json(format.unwrap_or(Format::Json), "predict")?;
            let theta_l = cfg.angle(theta_l.as_deref(), "theta_l", Angle::ZERO)?;
            let theta_r = cfg.angle(theta_r.as_deref(), "theta_r", Angle::ZERO)?;
            envelope_json(
                "predict",
                None,
                PredictInputs { theta_l, theta_r },
                exact_distribution(theta_l, theta_r),
            )?
        }
        Command::Curve { points } => {
            let points: usize = cfg.pick_or(points, "points", 65)?;
            if points < 2 {
                return Err(CliError::Input("--points must be at least 2".into()));
            }
            let rows: Vec<(f64, f64)> = (0..points)
                .map(|i| {
                    let delta = std::f64::consts::PI * i as f64 / (points - 1) as f64;
                    let d = Angle::from_radians(delta).expect("finite");
                    (delta, correlation(d, Angle::ZERO))
                })
                .collect();
            match format.unwrap_or(Format::Csv) {
                Format::Csv => output::curve_csv(&rows),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Point {
                        delta: f64,
                        e: f64,
                    }
                    let pts: Vec<Point> =
                        rows.iter().map(|&(delta, e)| Point { delta, e }).collect();
                    envelope_json("curve", None, serde_json::json!({ "points": points }), pts)?
                }
            }
        }
        Command::Chsh { angles } => {
            require_json(format.unwrap_or(Format::Json), "chsh")?;
            let settings = cfg.settings(angles.as_deref())?;
            let result = chsh_from_correlations(
                settings
                    .pairs()
                    .map(|(l, r)| Correlation::exact(correlation(l, r))),
            )?;
            envelope_json("chsh", None, ChshInputs { angles: settings }, result)?
        }
        Command::Simulate(args) => {
            let source_name = cfg.pick_or(args.source, "source", "qm".to_string())?;
            let settings = cfg.settings(args.angles.as_deref())?;
            let n = cfg.pick_or(args.trials, "trials", DEFAULT_TRIALS)?;
            let seed = cfg.pick_or(args.seed, "seed", DEFAULT_SEED)?;
            let export: Option<PathBuf> = cfg.pick(args.export_trials, "export_trials")?;
            let format = format.unwrap_or(Format::Json);
            let (source, epsilon) = if source_name == "qm" {
                (Source::Quantum, None)
            } else {
                let params = model_params(&cfg, args.epsilon)?;
                let eps = (source_name == "bell_sign_detector_noise").then_some(params.epsilon);
                (
                    Source::Model(builtin_model_with(&source_name, &params)?),
                    eps,
                )
            };
            let summary = match &export {
                Some(path) => {
                    let (summary, records) =
                        run_experiment_with_records(&source, &settings, n, seed)?;
                    let file = File::create(path)?;
                    trials::write_trials_csv(BufWriter::new(file), &records)?;
                    summary
                }
                None => run_experiment(&source, &settings, n, seed)?,
            };
            match format {
                Format::Csv => output::serialize_summary(&summary, Format::Csv)?,
                Format::Json => envelope_json(
                    "simulate",
                    Some(seed),
                    SimulateInputs {
                        source: &source_name,
                        angles: settings,
                        trials: n,
                        epsilon,
                        export_trials: export.map(|p| p.display().to_string()),
                    },
                    summary,
                )?,
            }
        }
        Command::Estimate {
            records,
            angles,
            source,
            seed,
        } => {
            let path: PathBuf = cfg
                .pick(records, "records")?
                .ok_or_else(|| CliError::Input("--records <path> is required".into()))?;
            let settings = cfg.settings(angles.as_deref())?;
            let file = File::open(&path)
                .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
            let recs = trials::read_trials_csv(BufReader::new(file))?;
            let mut summary = estimate_from_records(&recs, &settings)?;
            let seed = cfg.pick(seed, "seed")?;
            if let Some(label) = cfg.pick(source, "source")? {
                summary = summary.with_provenance(label, seed);
            } else if seed.is_some() {
                summary.seed = seed;
            }
            match format.unwrap_or(Format::Json) {
                Format::Csv => output::serialize_summary(&summary, Format::Csv)?,
                Format::Json => envelope_json(
                    "estimate",
                    seed,
                    serde_json::json!({ "records": path.display().to_string(), "angles": settings }),
                    summary,
                )?,
            }
        }
        Command::Lhv {
            command:
                LhvCommand::Enumerate {
                    angles,
                    mixtures,
                    seed,
                },
        } => {
            let settings = cfg.settings(angles.as_deref())?;
            let rows = enumerate_deterministic(&settings);
            match format.unwrap_or(Format::Csv) {
                Format::Csv => output::strategies_csv(&rows),
                Format::Json => {
                    let mixtures = cfg.pick_or(mixtures, "mixtures", 10_000)?;
                    let seed = cfg.pick_or(seed, "seed", DEFAULT_SEED)?;
                    let mix = max_mixture_chsh(&settings, mixtures, seed)?;
                    envelope_json(
                        "lhv enumerate",
                        Some(seed),
                        serde_json::json!({ "angles": settings, "mixtures": mixtures }),
                        serde_json::json!({ "strategies": rows, "mixtures": mix }),
                    )?
                }
            }
        }
        Command::Lhv {
            command:
                LhvCommand::Optimize {
                    family,
                    angles,
                    iterations,
                    samples,
                    seed,
                },
        } => {
            require_json(format.unwrap_or(Format::Json), "lhv optimize")?;
            let family = cfg.pick_or(family, "family", "bell_sign_offset".to_string())?;
            let settings = cfg.settings(angles.as_deref())?;
            let iterations = cfg.pick_or(iterations, "iterations", 25)?;
            let samples = cfg.pick_or(samples, "samples", 20_000)?;
            let seed = cfg.pick_or(seed, "seed", DEFAULT_SEED)?;
            let result = optimize_parametric(&family, &settings, iterations, samples, seed)?;
            envelope_json(
                "lhv optimize",
                Some(seed),
                serde_json::json!({
                    "family": family,
                    "angles": settings,
                    "iterations": iterations,
                    "samples": samples,
                }),
                result,
            )?
        }
        Command::Check(args) => {
            require_json(format.unwrap_or(Format::Json), "check")?;
            run_check(&cfg, args)?
        }
        Command::Frames { distance, beta } => {
            require_json(format.unwrap_or(Format::Json), "frames")?;
            let geometry = ExperimentGeometry::new(cfg.pick_or(distance, "distance", 1.0)?)?;
            let beta = FrameVelocity::new(cfg.pick_or(beta, "beta", 0.0)?)?;
            let result = FramesResult {
                gamma: gamma(beta),
                event_times: event_times(geometry, beta),
                time_gap: time_gap(geometry, beta),
                order_source: detection_order(geometry, beta, Frame::Source),
                order_a: detection_order(geometry, beta, Frame::A),
                order_b: detection_order(geometry, beta, Frame::B),
                detection_interval: invariant_interval(
                    &geometry.detect_right(),
                    &geometry.detect_left(),
                ),
            };
            envelope_json(
                "frames",
                None,
                serde_json::json!({ "distance": geometry, "beta": beta }),
                result,
            )?
        }
    };
    Ok(Some((text, out_path)))
}

fn run_check(cfg: &Config, args: CheckArgs) -> Result<String> {
    let n = cfg.pick_or(args.samples, "samples", DEFAULT_SAMPLES)?;
    let seed = cfg.pick_or(args.seed, "seed", DEFAULT_SEED)?;
    let command = format!(
        "check {}",
        args.kind.to_possible_value().expect("value").get_name()
    );

    if args.kind == CheckKind::Velocity {
        let skew = cfg.pick_or(args.skew, "skew", 0.0)?;
        let theta = cfg.angle(args.theta.as_deref(), "theta", Angle::ZERO)?;
        let betas_text = args.betas.or_else(|| cfg.raw("betas").map(String::from));
        let betas = betas_text
            .as_deref()
            .unwrap_or("0,0.6,-0.6")
            .split(',')
            .map(|t| {
                let b: f64 = t
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad beta {t:?}")))?;
                Ok(FrameVelocity::new(b)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let report =
            check_velocity_independence(frame_skewed_bell_sign(skew), theta, &betas, n, seed)?;
        return envelope_json(
            &command,
            Some(seed),
            serde_json::json!({
                "model": "frame_skewed_bell_sign",
                "skew": skew,
                "theta": theta,
                "betas": betas,
                "samples": n,
            }),
            report,
        );
    }

    let model_name = cfg
        .pick(args.model, "model")?
        .ok_or_else(|| CliError::Input("--model <name> is required".into()))?;
    let params = model_params(cfg, args.epsilon)?;
    let model = builtin_model_with(&model_name, &params)?;
    let mut inputs = serde_json::json!({
        "model": model_name,
        "epsilon": params.epsilon,
        "samples": n,
    });
    let report = match args.kind {
        CheckKind::NoSignaling => {
            let theta_r = cfg.angle(args.theta_r.as_deref(), "theta_r", Angle::ZERO)?;
            let lefts =
                cfg.angle_list(args.theta_l_list.as_deref(), "theta_l_list", "0,pi/8,pi/4")?;
            let threshold = cfg.pick_or(args.threshold, "threshold", 4.0)?;
            inputs["theta_r"] = serde_json::to_value(theta_r)?;
            inputs["theta_l_list"] = serde_json::to_value(&lefts)?;
            inputs["threshold"] = serde_json::to_value(threshold)?;
            check_no_signaling(&model, theta_r, &lefts, n, seed, threshold)?
        }
        CheckKind::Coincidence => {
            let theta = cfg.angle(args.theta.as_deref(), "theta", Angle::ZERO)?;
            inputs["theta"] = serde_json::to_value(theta)?;
            check_surface_coincidence(&model, theta, n, seed)?
        }
        CheckKind::DetectorIndependence => {
            let theta_l = cfg.angle(args.theta_l.as_deref(), "theta_l", Angle::ZERO)?;
            let theta_r = cfg.angle(args.theta_r.as_deref(), "theta_r", Angle::ZERO)?;
            let resamples = cfg.pick_or(args.resamples, "resamples", 8)?;
            inputs["theta_l"] = serde_json::to_value(theta_l)?;
            inputs["theta_r"] = serde_json::to_value(theta_r)?;
            inputs["resamples"] = serde_json::to_value(resamples)?;
            check_detector_independence(&model, theta_l, theta_r, n, resamples, seed)?
        }
        CheckKind::Velocity => unreachable!("handled above"),
    };
    envelope_json(&command, Some(seed), inputs, report)
}
