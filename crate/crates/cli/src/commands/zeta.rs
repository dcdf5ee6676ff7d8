use clap::{Args, Subcommand};
use kms_core::exact::{format_rational, rat, Rational};
use kms_core::zeta::{zeta_global, zeta_local, zeta_local_partial, zeta_multi, ZetaValue};
use serde_json::{json, Value};

use super::check_n;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::parse;
use crate::render::{self, f64_value, Output};

#[derive(Debug, Subcommand)]
pub enum ZetaCmd {
    /// Local factor at one prime; with --terms also the truncated sum and its enclosure.
    Local(LocalArgs),
    /// Product of local factors over a finite set of primes.
    Multi(MultiArgs),
    /// Global sum by the Euler product and by brute force, with enclosures.
    Global(GlobalArgs),
}

#[derive(Debug, Args)]
pub struct LocalArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::prime)]
    pub p: Option<u64>,
    #[arg(long, value_parser = parse::rational)]
    pub beta: Option<Rational>,
    #[arg(long, value_parser = parse::usize_arg)]
    pub terms: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MultiArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    /// Comma-separated, e.g. `2,3,5`.
    #[arg(long, value_parser = parse::primes)]
    pub primes: Option<::std::vec::Vec<u64>>,
    #[arg(long, value_parser = parse::rational)]
    pub beta: Option<Rational>,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::rational)]
    pub beta: Option<Rational>,
    /// Number of terms M (default 2000).
    #[arg(long, value_parser = parse::usize_arg)]
    pub terms: Option<usize>,
}

const MAX_ZETA_N: usize = 8;
const MAX_LOCAL_TERMS: usize = 60;
const MAX_GLOBAL_TERMS: usize = 1_000_000;

pub fn value_json(v: &ZetaValue) -> Value {
    match v {
        ZetaValue::Exact(q) => json!({
            "kind": "exact",
            "value": render::q(q),
            "approx": f64_value(kms_core::exact::rational_to_f64(q)),
            "error": 0.0,
        }),
        ZetaValue::Numeric { value, error } => json!({
            "kind": "numeric",
            "value": f64_value(*value),
            "error": f64_value(*error),
        }),
        ZetaValue::Divergent => json!({ "kind": "divergent" }),
    }
}

fn terms_in(t: usize, max: usize) -> CliResult<()> {
    if t == 0 || t > max {
        return Err(CliError::input(format!("terms = {t} outside 1..={max}")));
    }
    Ok(())
}

pub fn run(cmd: ZetaCmd, cfg: &Config) -> CliResult<Output> {
    match cmd {
        ZetaCmd::Local(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 1, MAX_ZETA_N)?;
            let p = cfg.require(a.p, "p", parse::prime)?;
            let beta = cfg.require(a.beta, "beta", parse::rational)?;
            let terms = cfg.pick(a.terms, "terms", parse::usize_arg)?;
            if let Some(t) = terms {
                terms_in(t, MAX_LOCAL_TERMS)?;
            }
            let value = zeta_local(n, p, &beta)?;
            let mut out = json!({
                "n": n,
                "p": p,
                "beta": format_rational(&beta),
                "result": value_json(&value),
            });
            if let (Some(t), false) = (terms, value == ZetaValue::Divergent) {
                let part = zeta_local_partial(n, p, &beta, t)?;
                let (lo, hi) = part.enclosure();
                out["partial"] = json!({
                    "terms": t,
                    "exact": part.exact.as_ref().map(render::q),
                    "value": f64_value(part.value),
                    "tail_bound": f64_value(part.tail_bound),
                    "rounding": f64_value(part.rounding),
                    "enclosure": [f64_value(lo), f64_value(hi)],
                });
            }
            Ok(Output::Json(out))
        }
        ZetaCmd::Multi(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 1, MAX_ZETA_N)?;
            let primes = cfg.require(a.primes, "primes", parse::primes)?;
            let beta = cfg.require(a.beta, "beta", parse::rational)?;
            let value = zeta_multi(n, &primes, &beta)?;
            Ok(Output::Json(json!({
                "n": n,
                "primes": primes,
                "beta": format_rational(&beta),
                "result": value_json(&value),
            })))
        }
        ZetaCmd::Global(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 1, MAX_ZETA_N)?;
            let beta = cfg.require(a.beta, "beta", parse::rational)?;
            let terms = cfg
                .pick(a.terms, "terms", parse::usize_arg)?
                .unwrap_or(2000);
            terms_in(terms, MAX_GLOBAL_TERMS)?;
            if beta <= rat(n as i64) {
                return Err(CliError::input(format!(
                    "the global sum diverges for β = {} ≤ n",
                    format_rational(&beta)
                )));
            }
            let g = zeta_global(n, &beta, terms as u64)?;
            Ok(Output::Json(json!({
                "n": n,
                "beta": format_rational(&beta),
                "terms": terms,
                "euler_product": {
                    "value": f64_value(g.euler_value),
                    "interval": [f64_value(g.euler_interval.0), f64_value(g.euler_interval.1)],
                },
                "brute_force": {
                    "value": f64_value(g.brute_value),
                    "interval": [f64_value(g.brute_interval.0), f64_value(g.brute_interval.1)],
                },
                "intervals_overlap": g.intervals_overlap(),
            })))
        }
    }
}
