//! Ensemble files.
//!
//! An ensemble file is a UTF-8 JSON document with fields in this order:
//!
//! ```json
//! {
//!   "format": "locc-ensemble/1",
//!   "d_a": 2,
//!   "d_b": 2,
//!   "states": [
//!     { "label": 1, "alice": [[1.0, 0.0], [0.0, 0.0]], "bob": [[1.0, 0.0], [0.0, 0.0]] }
//!   ]
//! }
//! ```
//!
//! Each amplitude is a `[re, im]` pair. Labels run `1..=n` in order. Loading
//! checks normalization (per label) and joint orthogonality (per pair).

use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BipartiteProductState, ProductEnsemble};
use crate::error::{Error, Result};
use crate::quantum::Ket;

pub const FORMAT_TAG: &str = "locc-ensemble/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub format: String,
    pub d_a: usize,
    pub d_b: usize,
    pub states: Vec<StateRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub label: usize,
    pub alice: Vec<[f64; 2]>,
    pub bob: Vec<[f64; 2]>,
}

fn amps_to_pairs(k: &Ket) -> Vec<[f64; 2]> {
    k.iter().map(|a| [a.re, a.im]).collect()
}

fn pairs_to_ket(pairs: &[[f64; 2]]) -> Ket {
    Ket::unnormalized(DVector::from_iterator(
        pairs.len(),
        pairs.iter().map(|&[re, im]| Complex64::new(re, im)),
    ))
}

impl From<&ProductEnsemble> for EnsembleFile {
    fn from(e: &ProductEnsemble) -> Self {
        EnsembleFile {
            format: FORMAT_TAG.to_string(),
            d_a: e.d_a(),
            d_b: e.d_b(),
            states: e
                .states()
                .iter()
                .map(|s| StateRecord {
                    label: s.label,
                    alice: amps_to_pairs(&s.alice),
                    bob: amps_to_pairs(&s.bob),
                })
                .collect(),
        }
    }
}

impl TryFrom<EnsembleFile> for ProductEnsemble {
    type Error = Error;

    fn try_from(f: EnsembleFile) -> Result<Self> {
        if f.format != FORMAT_TAG {
            return Err(Error::Parse(format!(
                "unsupported format tag '{}' (expected '{FORMAT_TAG}')",
                f.format
            )));
        }
        let mut states = Vec::with_capacity(f.states.len());
        for rec in f.states {
            for (part, dim, name) in [(&rec.alice, f.d_a, "alice"), (&rec.bob, f.d_b, "bob")] {
                if part.len() != dim {
                    return Err(Error::Parse(format!(
                        "state {}: {name} has {} amplitudes, expected {dim}",
                        rec.label,
                        part.len()
                    )));
                }
            }
            states.push(BipartiteProductState {
                label: rec.label,
                alice: pairs_to_ket(&rec.alice),
                bob: pairs_to_ket(&rec.bob),
            });
        }
        ProductEnsemble::from_states(states)
    }
}

pub fn to_file_string(e: &ProductEnsemble) -> String {
    let mut s = serde_json::to_string_pretty(&EnsembleFile::from(e)).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_ensemble(text: &str) -> Result<ProductEnsemble> {
    let file: EnsembleFile = serde_json::from_str(text)?;
    ProductEnsemble::try_from(file)
}

pub fn save_ensemble(e: &ProductEnsemble, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_file_string(e))?;
    Ok(())
}

pub fn load_ensemble(path: impl AsRef<Path>) -> Result<ProductEnsemble> {
    let text = std::fs::read_to_string(path)?;
    parse_ensemble(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{four_state, nine_state_general};

    #[test]
    fn round_trip_four_state() {
        let e = four_state();
        let back = parse_ensemble(&to_file_string(&e)).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn round_trip_generic_angles_is_exact() {
        let e = nine_state_general(0.3, 1.1, 0.7, 0.05).unwrap();
        let back = parse_ensemble(&to_file_string(&e)).unwrap();
        assert!(back.max_abs_diff(&e).unwrap() <= 1e-15);
    }

    #[test]
    fn unnormalized_ket_names_label() {
        let text = r#"{"format":"locc-ensemble/1","d_a":2,"d_b":2,"states":[
            {"label":1,"alice":[[1,0],[0,0]],"bob":[[1,0],[0,0]]},
            {"label":2,"alice":[[0,0],[1.1,0]],"bob":[[1,0],[0,0]]}]}"#;
        let err = parse_ensemble(text).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { label: 2, .. }));
        assert!(err.to_string().contains("state 2"));
    }

    #[test]
    fn non_orthogonal_pair_named() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            r#"{{"format":"locc-ensemble/1","d_a":2,"d_b":2,"states":[
            {{"label":1,"alice":[[1,0],[0,0]],"bob":[[1,0],[0,0]]}},
            {{"label":2,"alice":[[{h},0],[{h},0]],"bob":[[1,0],[0,0]]}}]}}"#
        );
        match parse_ensemble(&text).unwrap_err() {
            Error::NotOrthogonal { i, j, residual } => {
                assert_eq!((i, j), (1, 2));
                assert!((residual - h).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(matches!(parse_ensemble("{"), Err(Error::Parse(_))));
        let wrong_tag = r#"{"format":"other","d_a":2,"d_b":2,"states":[]}"#;
        assert!(matches!(parse_ensemble(wrong_tag), Err(Error::Parse(_))));
        let short = r#"{"format":"locc-ensemble/1","d_a":2,"d_b":2,"states":[
            {"label":1,"alice":[[1,0]],"bob":[[1,0],[0,0]]}]}"#;
        assert!(matches!(parse_ensemble(short), Err(Error::Parse(_))));
        let gap = r#"{"format":"locc-ensemble/1","d_a":2,"d_b":2,"states":[
            {"label":2,"alice":[[1,0],[0,0]],"bob":[[1,0],[0,0]]}]}"#;
        assert!(matches!(parse_ensemble(gap), Err(Error::BadLabel { .. })));
    }

    #[test]
    fn save_and_load_via_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("four.json");
        save_ensemble(&four_state(), &path).unwrap();
        assert_eq!(load_ensemble(&path).unwrap(), four_state());
    }
}
