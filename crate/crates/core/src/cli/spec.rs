//! Ensemble descriptors and angle literals on the command line.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde_json::{json, Value};

use crate::ensembles::{
    computational, four_state, four_state_general, load_ensemble, nine_state, nine_state_general,
    ProductEnsemble,
};
use crate::error::{Error, Result};

/// A named ensemble family with its parameters, or a file.
#[derive(Clone, Debug, PartialEq)]
pub enum EnsembleSpec {
    Four,
    FourGeneral { theta: f64 },
    Nine,
    NineGeneral { eta: f64, xi: f64, theta: f64, gamma: f64 },
    Computational { d_a: usize, d_b: usize },
    File(PathBuf),
}

/// Parses `0.4`, `pi`, `pi/8`, `3pi/8`, `3*pi/8`, `-pi/4`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad angle literal '{text}'"));
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let lower = t.to_ascii_lowercase();
    let Some(pos) = lower.find("pi") else {
        return Err(bad());
    };
    let coef = lower[..pos].trim_end_matches('*');
    let coef = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &lower[pos + 2..];
    let den = match rest.strip_prefix('/') {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(coef * PI / den)
}

fn parse_angles<const N: usize>(args: &str, family: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = args.split(',').collect();
    if parts.len() != N {
        return Err(Error::Parse(format!("{family} takes {N} angle(s), got {}", parts.len())));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_angle(p)?;
    }
    Ok(out)
}

impl EnsembleSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let (name, args) = match text.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (text, None),
        };
        match (name, args) {
            ("four", None) => Ok(EnsembleSpec::Four),
            ("nine", None) => Ok(EnsembleSpec::Nine),
            ("four-general", Some(a)) => {
                let [theta] = parse_angles::<1>(a, name)?;
                Ok(EnsembleSpec::FourGeneral { theta })
            }
            ("nine-general", Some(a)) => {
                let [eta, xi, theta, gamma] = parse_angles::<4>(a, name)?;
                Ok(EnsembleSpec::NineGeneral { eta, xi, theta, gamma })
            }
            ("computational", Some(a)) => {
                let dims: Vec<usize> = a
                    .split(',')
                    .map(|d| d.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse(format!("bad dimensions '{a}'")))?;
                match dims[..] {
                    [d_a, d_b] => Ok(EnsembleSpec::Computational { d_a, d_b }),
                    _ => Err(Error::Parse("computational takes two dimensions".into())),
                }
            }
            _ => {
                let path = PathBuf::from(text);
                if path.is_file() {
                    Ok(EnsembleSpec::File(path))
                } else {
                    Err(Error::Parse(format!("unknown ensemble '{text}'")))
                }
            }
        }
    }

    pub fn build(&self) -> Result<ProductEnsemble> {
        match self {
            EnsembleSpec::Four => Ok(four_state()),
            EnsembleSpec::FourGeneral { theta } => four_state_general(*theta),
            EnsembleSpec::Nine => Ok(nine_state()),
            EnsembleSpec::NineGeneral { eta, xi, theta, gamma } => nine_state_general(*eta, *xi, *theta, *gamma),
            EnsembleSpec::Computational { d_a, d_b } => computational(*d_a, *d_b),
            EnsembleSpec::File(p) => load_ensemble(p),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            EnsembleSpec::Four => "four",
            EnsembleSpec::FourGeneral { .. } => "four-general",
            EnsembleSpec::Nine => "nine",
            EnsembleSpec::NineGeneral { .. } => "nine-general",
            EnsembleSpec::Computational { .. } => "computational",
            EnsembleSpec::File(_) => "file",
        }
    }

    pub fn parameters(&self) -> Value {
        match self {
            EnsembleSpec::Four | EnsembleSpec::Nine => json!({}),
            EnsembleSpec::FourGeneral { theta } => json!({ "theta": theta }),
            EnsembleSpec::NineGeneral { eta, xi, theta, gamma } => {
                json!({ "eta": eta, "xi": xi, "theta": theta, "gamma": gamma })
            }
            EnsembleSpec::Computational { d_a, d_b } => json!({ "d_a": d_a, "d_b": d_b }),
            EnsembleSpec::File(p) => json!({ "path": p.display().to_string() }),
        }
    }

    /// Expected verdict (`true` = no progress) for the acting party, where known.
    pub fn expected_no_progress(&self, party: crate::ensembles::Party) -> Option<bool> {
        use crate::ensembles::Party;
        match (self, party) {
            (EnsembleSpec::Four, Party::Alice) => Some(true),
            (EnsembleSpec::Four, Party::Bob) => Some(false),
            (EnsembleSpec::FourGeneral { .. }, Party::Alice) => Some(true),
            (EnsembleSpec::FourGeneral { .. }, Party::Bob) => Some(false),
            (EnsembleSpec::Nine | EnsembleSpec::NineGeneral { .. }, _) => Some(true),
            (EnsembleSpec::Computational { .. }, _) => Some(false),
            (EnsembleSpec::File(_), _) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_8;

    #[test]
    fn angle_literals() {
        assert_eq!(parse_angle("pi/8").unwrap(), FRAC_PI_8);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!((parse_angle("3pi/8").unwrap() - 3.0 * FRAC_PI_8).abs() < 1e-15);
        assert!((parse_angle("3*pi/8").unwrap() - 3.0 * FRAC_PI_8).abs() < 1e-15);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("pi8").is_err());
    }

    #[test]
    fn names() {
        assert_eq!(EnsembleSpec::parse("four").unwrap(), EnsembleSpec::Four);
        assert_eq!(
            EnsembleSpec::parse("computational:2,3").unwrap(),
            EnsembleSpec::Computational { d_a: 2, d_b: 3 }
        );
        let g = EnsembleSpec::parse("nine-general:pi/4,pi/4,0.3,0.4").unwrap();
        assert_eq!(g.family(), "nine-general");
        assert!(g.build().is_ok());
        assert!(EnsembleSpec::parse("nine-general:0.1,0.2").is_err());
        assert!(EnsembleSpec::parse("five").is_err());
        assert!(EnsembleSpec::parse("computational:2").is_err());
    }

    #[test]
    fn out_of_range_angle_fails_at_build() {
        let s = EnsembleSpec::parse("four-general:2.0").unwrap();
        assert!(s.build().is_err());
    }
}
