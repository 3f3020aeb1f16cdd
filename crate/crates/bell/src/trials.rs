//! Trial stream CSV: header `trial,pair,out_l,out_r`, pairs `ab`, `abp`,
//! `apb`, `apbp`, outcomes `+1` / `-1`.

use std::io::{Read, Write};

use bell_core::{Outcome, SettingPair, TrialRecord};

use crate::error::{CliError, Result};

pub const HEADER: [&str; 4] = ["trial", "pair", "out_l", "out_r"];

pub fn write_trials_csv<W: Write>(writer: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.trial_index.to_string().as_str(),
            r.setting_pair.as_str(),
            &r.outcome_l.to_string(),
            &r.outcome_r.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_outcome(field: &str, line: u64) -> Result<Outcome> {
    match field {
        "+1" | "1" => Ok(Outcome::Plus),
        "-1" => Ok(Outcome::Minus),
        other => Err(CliError::Input(format!(
            "line {line}: bad outcome {other:?}"
        ))),
    }
}

pub fn read_trials_csv<R: Read>(reader: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("trial csv: {e}")))?;
    if header.iter().ne(HEADER) {
        return Err(CliError::Input(format!(
            "trial csv header must be `{}`, got `{}`",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| CliError::Input(format!("trial csv: {e}")))?;
        let line = row.position().map_or(0, |p| p.line());
        let trial_index = row[0]
            .parse()
            .map_err(|_| CliError::Input(format!("line {line}: bad trial index {:?}", &row[0])))?;
        let setting_pair: SettingPair = row[1]
            .parse()
            .map_err(|_| CliError::Input(format!("line {line}: bad pair {:?}", &row[1])))?;
        out.push(TrialRecord {
            trial_index,
            setting_pair,
            outcome_l: parse_outcome(&row[2], line)?,
            outcome_r: parse_outcome(&row[3], line)?,
        });
    }
    Ok(out)
}
