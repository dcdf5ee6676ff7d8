use clap::Args;
use kms_core::cosets::elementary_divisors;
use kms_core::padic::{snf_witnesses, stratify, Stratum};
use kms_core::RatMatrix;
use serde_json::{json, Value};

use super::MAX_N;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::parse;
use crate::render::{self, Output};

/// A rational matrix read in `Mat_n(Q_p)`.
#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long, value_parser = parse::prime)]
    pub p: Option<u64>,
    /// JSON rows; entries are integers or "a/b" strings.
    #[arg(long, value_parser = parse::rat_matrix)]
    pub matrix: Option<RatMatrix>,
}

fn resolve(args: MatrixArgs, cfg: &Config) -> CliResult<(u64, RatMatrix)> {
    let p = cfg.require(args.p, "p", parse::prime)?;
    let m = cfg.require(args.matrix, "matrix", parse::rat_matrix)?;
    if m.n() > MAX_N {
        return Err(CliError::input(format!(
            "matrix size {} exceeds {MAX_N}",
            m.n()
        )));
    }
    Ok((p, m))
}

fn checked_witness(m: &RatMatrix, p: u64) -> CliResult<Value> {
    let w = snf_witnesses(m, p)?;
    if &(&w.b * m) * &w.c != w.d {
        return Err(CliError::internal(
            "normal form witness does not reproduce D",
        ));
    }
    Ok(render::witness(&w, p))
}

pub fn run_stratify(args: MatrixArgs, cfg: &Config) -> CliResult<Output> {
    let (p, m) = resolve(args, cfg)?;
    let s = stratify(&m, p)?;
    let (signature, det_valuation) = match &s {
        Stratum::Invertible(v) => (Value::Null, json!(v)),
        Stratum::Singular(k) => (json!(k), Value::Null),
        Stratum::Zero => (json!([]), Value::Null),
    };
    let witness = if s == Stratum::Zero {
        Value::Null
    } else {
        checked_witness(&m, p)?
    };
    Ok(Output::Json(json!({
        "p": p,
        "stratum": s.to_string(),
        "rank": m.rank(),
        "signature": signature,
        "det_valuation": det_valuation,
        "witness": witness,
    })))
}

pub fn run_snf(args: MatrixArgs, cfg: &Config) -> CliResult<Output> {
    let (p, m) = resolve(args, cfg)?;
    if m.is_zero() {
        return Err(CliError::input(
            "the zero matrix has no normal form witness",
        ));
    }
    let mut out = checked_witness(&m, p)?;
    out["p"] = json!(p);
    if let Some(z) = m.to_integer() {
        out["integer_elementary_divisors"] = Value::Array(
            elementary_divisors(&z)
                .iter()
                .map(|d| Value::String(d.to_string()))
                .collect(),
        );
    }
    Ok(Output::Json(out))
}
