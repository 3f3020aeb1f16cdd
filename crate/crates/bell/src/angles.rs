//! Angle tokens: decimal radians or fractions of π such as `pi/8`, `-3pi/8`,
//! `3*pi/4`, `π/2`, `2pi`.

use std::f64::consts::PI;

use bell_core::{Angle, ChshSettings};

use crate::error::{CliError, Result};

pub fn parse_angle(token: &str) -> Result<Angle> {
    let t = token.trim();
    let radians = parse_pi_fraction(t)
        .or_else(|| t.parse::<f64>().ok())
        .ok_or_else(|| CliError::Input(format!("cannot parse angle {token:?}")))?;
    Ok(Angle::from_radians(radians)?)
}

fn parse_pi_fraction(t: &str) -> Option<f64> {
    let lower = t.to_ascii_lowercase().replace('π', "pi");
    let (sign, rest) = match lower.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, lower.strip_prefix('+').unwrap_or(&lower)),
    };
    let pos = rest.find("pi")?;
    let coeff = rest[..pos].trim_end_matches('*').trim();
    let coeff = if coeff.is_empty() {
        1.0
    } else {
        coeff.parse::<f64>().ok()?
    };
    let tail = rest[pos + 2..].trim();
    let denom = if tail.is_empty() {
        1.0
    } else {
        tail.strip_prefix('/')?.trim().parse::<f64>().ok()?
    };
    if denom == 0.0 {
        return None;
    }
    Some(sign * coeff * PI / denom)
}

pub fn parse_angle_list(list: &str) -> Result<Vec<Angle>> {
    list.split(',').map(parse_angle).collect()
}

/// Four comma-separated angles in the order `a, a', b, b'`.
pub fn parse_settings(list: &str) -> Result<ChshSettings> {
    match parse_angle_list(list)?.as_slice() {
        &[a, ap, b, bp] => Ok(ChshSettings::new(a, ap, b, bp)),
        other => Err(CliError::Input(format!(
            "--angles takes exactly 4 angles (a,a',b,b'), got {}",
            other.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn rad(t: &str) -> f64 {
        parse_angle(t).unwrap().radians()
    }

    #[test]
    fn pi_fractions() {
        assert_eq!(rad("pi/8"), FRAC_PI_8);
        assert_eq!(rad("-pi/8"), -FRAC_PI_8);
        assert_eq!(rad("pi"), PI);
        assert_eq!(rad("2pi"), 2.0 * PI);
        assert_eq!(rad("3*pi/8"), 3.0 * PI / 8.0);
        assert_eq!(rad("3pi/8"), 3.0 * PI / 8.0);
        assert_eq!(rad("π/4"), FRAC_PI_4);
        assert_eq!(rad(" PI/4 "), FRAC_PI_4);
        assert_eq!(rad("0.25"), 0.25);
        assert_eq!(rad("-1e-3"), -1e-3);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "pie", "pi/", "pi/0", "abc", "nan", "inf", "pi/8x"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn settings() {
        let s = parse_settings("pi/4,0,pi/8,-pi/8").unwrap();
        assert_eq!(s, ChshSettings::maximal_violation());
        assert!(parse_settings("0,0,0").is_err());
    }
}
