//! JSON and CSV rendering. Rationals are always `"num/den"` strings.

use kms_core::exact::{format_rational, Poly, Rational};
use kms_core::padic::SnfWitness;
use kms_core::{IntMatrix, RatFunc, RatMatrix};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub enum Output {
    Json(Value),
    /// Tabular result; JSON format still prints `json`.
    Table {
        json: Value,
        header: Vec<&'static str>,
        rows: Vec<Vec<String>>,
    },
}

impl Output {
    pub fn render(&self, format: Format) -> CliResult<String> {
        match (self, format) {
            (Output::Json(v), _) | (Output::Table { json: v, .. }, Format::Json) => {
                let mut s = serde_json::to_string_pretty(v)
                    .map_err(|e| CliError::internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            (Output::Table { header, rows, .. }, Format::Csv) => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| CliError::internal(e.to_string());
                w.write_record(header).map_err(io)?;
                for r in rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| CliError::internal(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::internal(e.to_string()))
            }
        }
    }
}

pub fn q(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

pub fn qs(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(q).collect())
}

pub fn int_matrix(m: &IntMatrix) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|x| match x.to_i64() {
                            Some(v) => json!(v),
                            None => Value::String(x.to_string()),
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn rat_matrix(m: &RatMatrix) -> Value {
    Value::Array(m.rows().iter().map(|r| qs(r)).collect())
}

/// Nonzero coefficients keyed by degree.
pub fn coefficient_map(p: &Poly) -> Value {
    let mut m = Map::new();
    for (k, c) in p.coeffs().iter().enumerate() {
        if !num_traits::Zero::is_zero(c) {
            m.insert(k.to_string(), q(c));
        }
    }
    Value::Object(m)
}

pub fn poly(p: &Poly, var: &str) -> Value {
    json!({ "text": p.render(var), "coefficients": coefficient_map(p) })
}

/// `t^shift · num(t) / den(t)`.
pub fn ratfunc(f: &RatFunc) -> Value {
    json!({
        "text": f.render("t"),
        "shift": f.shift(),
        "numerator": coefficient_map(f.numerator()),
        "denominator": coefficient_map(f.denominator()),
    })
}

pub fn witness(w: &SnfWitness, p: u64) -> Value {
    json!({
        "b": rat_matrix(&w.b),
        "c": rat_matrix(&w.c),
        "d": rat_matrix(&w.d),
        "exponents": w.exponents(p),
    })
}

pub fn f64_value(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}
