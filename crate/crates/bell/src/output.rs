//! Output documents.
//!
//! Every JSON document has the shape
//! `{"command", "version", "seed", "inputs", "result"}`; `seed` is `null`
//! for commands that draw no random numbers.

use std::fmt::Write as _;
use std::str::FromStr;

use bell_core::experiment::ExperimentSummary;
use bell_core::strategies::StrategyReport;
use bell_core::SettingPair;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::json::{self, format_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Input(format!(
                "unsupported output format {other:?} (json or csv)"
            ))),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, I: Serialize, R: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub seed: Option<u64>,
    pub inputs: I,
    pub result: R,
}

pub fn envelope_json<I: Serialize, R: Serialize>(
    command: &str,
    seed: Option<u64>,
    inputs: I,
    result: R,
) -> Result<String> {
    Ok(json::to_string(&Envelope {
        command,
        version: crate::VERSION,
        seed,
        inputs,
        result,
    })?)
}

/// Summary as JSON (bare, without the envelope) or as a per-pair CSV table
/// `pair,theta_l,theta_r,n,E,se`.
pub fn serialize_summary(summary: &ExperimentSummary, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(json::to_string(summary)?),
        Format::Csv => Ok(summary_csv(summary)),
    }
}

pub fn summary_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from("pair,theta_l,theta_r,n,E,se\n");
    for pair in SettingPair::ALL {
        let (l, r) = summary.settings.angles(pair);
        let c = &summary.chsh.correlations[pair.index()];
        let se = c.standard_error.map(format_f64).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            pair,
            format_f64(l.radians()),
            format_f64(r.radians()),
            summary.pair_counts[pair.index()],
            format_f64(c.value),
            se
        )
        .expect("writing to a String");
    }
    out
}

pub fn curve_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("delta,E\n");
    for (d, e) in rows {
        writeln!(out, "{},{}", format_f64(*d), format_f64(*e)).expect("writing to a String");
    }
    out
}

pub fn strategies_csv(rows: &[StrategyReport]) -> String {
    let mut out =
        String::from("a_at_theta_a,a_at_theta_a_prime,b_at_theta_b,b_at_theta_b_prime,s_value\n");
    for r in rows {
        let s = &r.strategy;
        writeln!(
            out,
            "{},{},{},{},{}",
            s.a_at_theta_a,
            s.a_at_theta_a_prime,
            s.b_at_theta_b,
            s.b_at_theta_b_prime,
            format_f64(r.s_value)
        )
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use bell_core::experiment::{run_experiment, Source};
    use bell_core::ChshSettings;

    #[test]
    fn formats() {
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }

    #[test]
    fn summary_json_round_trips() {
        let s = run_experiment(
            &Source::Quantum,
            &ChshSettings::maximal_violation(),
            5_000,
            3,
        )
        .unwrap();
        let text = serialize_summary(&s, Format::Json).unwrap();
        let back: ExperimentSummary = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let csv = serialize_summary(&s, Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("pair,theta_l,theta_r,n,E,se\nab,"));
    }
}
