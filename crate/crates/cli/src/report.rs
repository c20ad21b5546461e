//! Report envelope and number formatting.

use apportion::Real;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Decimal string with at most 12 significant digits.
pub fn dec(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

pub fn decs(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::String(dec(x))).collect())
}

/// A decimal string, or `{decimal, exact}` when the backend is exact.
pub fn num<R: Real>(x: &R) -> Value {
    match x.to_ratio() {
        Some(r) if R::EXACT => json!({ "decimal": dec(x.to_f64()), "exact": r.to_string() }),
        _ => Value::String(dec(x.to_f64())),
    }
}

pub fn nums<R: Real>(xs: &[R]) -> Value {
    Value::Array(xs.iter().map(num).collect())
}

#[derive(Debug, Serialize)]
pub struct Engine {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub engine: Engine,
    pub command: String,
    pub config: Value,
    pub status: &'static str,
    pub result: Value,
    pub wall_clock_seconds: String,
}

impl Report {
    pub fn new(command: &str, config: Value, status: &'static str, result: Value, seconds: f64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            engine: Engine {
                name: "apportion",
                version: env!("CARGO_PKG_VERSION"),
            },
            command: command.to_string(),
            config,
            status,
            result,
            wall_clock_seconds: dec(seconds),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn twelve_digits() {
        assert_eq!(dec(1.0 / 3.0), "0.333333333333");
        assert_eq!(dec(2.0), "2");
        assert_eq!(dec(-0.0), "0");
        assert_eq!(dec(3.0 * 2f64.ln() - 2.0), "0.0794415416798");
        assert_eq!(dec(f64::INFINITY), "inf");
    }

    #[test]
    fn exact_values_carry_the_ratio() {
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(num(&third), json!({"decimal": "0.333333333333", "exact": "1/3"}));
        assert_eq!(num(&0.25f64), json!("0.25"));
    }
}
