use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::arith::{ComplexF, Precision};
use crate::error::Error;

/// The JSON document printed for every successful run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub subcommand: String,
    pub inputs: Map<String, Value>,
    pub values: Value,
    pub elapsed_ms: Value,
}

impl ResultEnvelope {
    /// The envelope with the wall-clock field blanked, for determinism checks.
    pub fn without_timing(&self) -> ResultEnvelope {
        ResultEnvelope {
            elapsed_ms: Value::Null,
            ..self.clone()
        }
    }
}

/// A float as a JSON number with 17 significant digits; non-finite values
/// become the strings "inf", "-inf" and "nan".
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        let text = format!("{x:.16e}");
        Value::Number(Number::from_str(&text).expect("formatted float is a valid JSON number"))
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// Real and imaginary parts as 17-digit numbers plus decimal strings with as
/// many digits as `prec` bits carry (at least 17).
pub fn complex(z: &ComplexF, prec: Precision) -> Value {
    let digits = ((prec.bits() as f64) * std::f64::consts::LOG10_2).floor().max(17.0) as usize;
    let (re, im) = z.to_decimal(digits);
    serde_json::json!({
        "re": num(z.re_f64()),
        "im": num(z.im_f64()),
        "re_decimal": re,
        "im_decimal": im,
    })
}

pub fn error_object(err: &Error) -> Value {
    let kind = err.kind();
    serde_json::json!({
        "error": {
            "kind": kind.as_str(),
            "exit_code": kind.exit_code(),
            "message": err.to_string(),
        }
    })
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(v) {
        out.push((prefix.to_string(), s));
        return;
    }
    match v {
        Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
            let joined: Vec<String> = items.iter().filter_map(scalar).collect();
            out.push((prefix.to_string(), joined.join(" ")));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, out);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, item, out);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

/// "key: value" lines, nested keys joined with dots.
pub fn render_text(env: &ResultEnvelope) -> String {
    let mut lines = vec![("subcommand".to_string(), env.subcommand.clone())];
    flatten("inputs", &Value::Object(env.inputs.clone()), &mut lines);
    flatten("", &env.values, &mut lines);
    if let Some(ms) = scalar(&env.elapsed_ms) {
        lines.push(("elapsed_ms".into(), ms));
    }
    let mut text = String::new();
    for (k, v) in lines {
        text.push_str(&k);
        text.push_str(": ");
        text.push_str(&v);
        text.push('\n');
    }
    text
}
