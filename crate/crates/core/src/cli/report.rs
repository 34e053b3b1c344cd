//! The report document every command prints.

use serde::Serialize;
use serde_json::{json, Map, Number, Value};

use crate::quantum::{CMatrix, Ket};
use crate::tol;

/// Significant digits kept for every float in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every non-integer number in the tree.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().unwrap_or(f64::NAN));
            *v = Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn tolerances() -> Value {
    json!({
        "invariant": tol::INVARIANT,
        "residual": tol::RESIDUAL,
        "convergence": tol::CONVERGENCE,
        "nullspace": tol::NULLSPACE,
    })
}

pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| Value::Array(row.iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

pub fn ket_json(k: &Ket) -> Value {
    Value::Array(k.iter().map(|z| json!([z.re, z.im])).collect())
}

pub fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report values serialize")
}

/// A command's report: fixed top-level field order, floats rounded.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: Vec<String>,
    pub ensemble: Value,
    pub seed: Option<u64>,
    pub results: Value,
    pub duration_ms: Option<f64>,
}

impl RunReport {
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("tool".into(), json!("locc"));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(self.command));
        m.insert("ensemble".into(), self.ensemble.clone());
        m.insert("seed".into(), json!(self.seed));
        m.insert("tolerances".into(), tolerances());
        m.insert("results".into(), self.results.clone());
        if let Some(d) = self.duration_ms {
            m.insert("duration_ms".into(), json!(d));
        }
        let mut v = Value::Object(m);
        round_floats(&mut v);
        v
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.853_553_390_593_273_7), 0.853_553_390_593);
        assert_eq!(round_sig(1.0), 1.0);
        assert_eq!(round_sig(-1.234_567_890_123_45e-11), -1.234_567_890_12e-11);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn integers_untouched() {
        let mut v = json!({"n": 7, "x": [0.1234567890123456, 3], "s": "a"});
        round_floats(&mut v);
        assert_eq!(v, json!({"n": 7, "x": [0.123456789012, 3], "s": "a"}));
    }

    #[test]
    fn field_order_is_fixed() {
        let r = RunReport {
            command: vec!["x".into()],
            ensemble: json!(null),
            seed: None,
            results: json!({}),
            duration_ms: None,
        };
        let s = r.to_json_string();
        let keys = ["\"tool\"", "\"version\"", "\"command\"", "\"ensemble\"", "\"seed\"", "\"tolerances\"", "\"results\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(!s.contains("duration_ms"));
    }
}
