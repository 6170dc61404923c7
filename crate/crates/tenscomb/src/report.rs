//! Deterministic serialization of results.

use std::io::Write;

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::melonic_series::PowerSeries;

/// `"num/den"`, also for integers.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Seventeen significant digits; positional for moderate exponents with
/// trailing zeros dropped, scientific otherwise.
pub fn float_string(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.16e}", x.abs());
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let sign = if x < 0.0 { "-" } else { "" };
    if !(-6..17).contains(&exp) {
        let m = mant.trim_end_matches('0').trim_end_matches('.');
        return format!("{sign}{m}e{exp}");
    }
    let s = if exp >= 0 {
        let split = (exp + 1) as usize;
        let (int, frac) = digits.split_at(split);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    format!("{sign}{s}")
}

pub fn float_value(x: f64) -> Value {
    Value::String(float_string(x))
}

pub fn complex_value(z: Complex64) -> Value {
    json!({"re": float_string(z.re), "im": float_string(z.im)})
}

pub fn rational_value(r: &BigRational) -> Value {
    Value::String(rational_string(r))
}

pub fn series_value(s: &PowerSeries) -> Value {
    Value::Array(s.coeffs().iter().map(rational_value).collect())
}

/// Echo of the invocation, emitted with every report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: Vec<(String, String)>,
    pub seed: u64,
}

impl RunManifest {
    pub fn to_value(&self) -> Value {
        let mut flags = Map::new();
        for (k, v) in &self.flags {
            flags.insert(k.clone(), Value::String(v.clone()));
        }
        json!({
            "subcommand": self.subcommand,
            "flags": Value::Object(flags),
            "seed": self.seed,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

pub fn json_report(manifest: &RunManifest, result: Value) -> String {
    let v = json!({"manifest": manifest.to_value(), "result": result});
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

/// Header row then one row per coefficient.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("utf8"))
}

/// Seed line for CSV output, which has no room for the manifest.
pub fn csv_with_manifest(manifest: &RunManifest, body: &str) -> String {
    let mut out = Vec::new();
    writeln!(out, "# tenscomb {} seed={}", manifest.subcommand, manifest.seed).expect("write");
    out.extend_from_slice(body.as_bytes());
    String::from_utf8(out).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn rationals() {
        assert_eq!(rational_string(&BigRational::from_integer(BigInt::from(4))), "4/1");
        assert_eq!(rational_string(&BigRational::new(BigInt::from(-6), BigInt::from(4))), "-3/2");
    }

    #[test]
    fn floats() {
        let z = Complex64::new(0.0, -(2.0f64 / 9.0).sqrt());
        assert_eq!(complex_value(z), json!({"re": "0", "im": "-0.47140452079103168"}));
        assert_eq!(float_string(1.0), "1");
        assert_eq!(float_string(2.0 / 3.0), "0.66666666666666663");
        assert_eq!(float_string(1e-9), "1.0000000000000001e-9");
        assert_eq!(float_string(0.5e-20), "4.9999999999999997e-21");
        assert_eq!(float_string(-123.5), "-123.5");
    }

    #[test]
    fn csv_rows() {
        let s = csv_table(&["k", "coefficient"], &[vec!["0".into(), "1/1".into()]]).unwrap();
        assert_eq!(s, "k,coefficient\n0,1/1\n");
    }
}
