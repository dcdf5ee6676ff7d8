use clap::{Args, Subcommand};
use kms_core::cosets::{coset_count, elementary_divisors, hecke_index};
use kms_core::exact::Rational;
use kms_core::hecke::{apply_hecke, recursion_chain, HeckeElement, StratumFunction};
use kms_core::IntMatrix;
use num_traits::Zero;
use serde_json::{json, Value};

use super::check_n;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::parse;
use crate::render::{self, Output};

#[derive(Debug, Subcommand)]
pub enum HeckeCmd {
    /// `T_l` applied to the indicator of a stratum, as a table of values.
    Apply(ApplyArgs),
    /// The corank-one recursion chain and the polynomial it produces.
    Chain(ChainArgs),
    /// Number of left cosets in `Γ g Γ`.
    Index(IndexArgs),
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::prime)]
    pub p: Option<u64>,
    #[arg(long, value_parser = parse::usize_arg)]
    pub l: Option<usize>,
    /// Ascending exponents of the stratum, e.g. `0,3` for n = 3.
    #[arg(long, value_parser = parse::signature, allow_hyphen_values = true)]
    pub signature: Option<::std::vec::Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::prime)]
    pub p: Option<u64>,
    /// Starting signature; defaults to `0,3,6,…`.
    #[arg(long, value_parser = parse::signature, allow_hyphen_values = true)]
    pub base: Option<::std::vec::Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Integer matrix with nonzero determinant, as JSON rows.
    #[arg(long, value_parser = parse::int_matrix)]
    pub matrix: Option<IntMatrix>,
}

const MAX_HECKE_N: usize = 5;
const MAX_REPS: i64 = 20_000;

fn check_rep_count(n: usize, p: u64, l: usize) -> CliResult<()> {
    let c = coset_count(n, p, l)?;
    if c > Rational::from_integer(MAX_REPS.into()) {
        return Err(CliError::input(format!(
            "T_{l} has {c} cosets for n = {n}, p = {p}; limit {MAX_REPS}"
        )));
    }
    Ok(())
}

pub fn function_json(f: &StratumFunction) -> Vec<Value> {
    f.iter()
        .map(|(k, v)| json!({ "signature": k, "value": render::q(v) }))
        .collect()
}

pub fn run(cmd: HeckeCmd, cfg: &Config) -> CliResult<Output> {
    match cmd {
        HeckeCmd::Apply(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 2, MAX_HECKE_N)?;
            let p = cfg.require(a.p, "p", parse::prime)?;
            let l = cfg.require(a.l, "l", parse::usize_arg)?;
            let sig = cfg.require(a.signature, "signature", parse::signature)?;
            let t = HeckeElement::new(n, p, l)?;
            let f = StratumFunction::indicator(n, p, &sig)?;
            check_rep_count(n, p, l)?;
            let image = apply_hecke(t, &f)?;
            let rows = image
                .iter()
                .map(|(k, v)| {
                    let k: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                    vec![
                        k.join(" "),
                        render::q(v).as_str().unwrap_or_default().to_string(),
                    ]
                })
                .collect();
            let json = json!({
                "n": n,
                "p": p,
                "l": l,
                "signature": sig,
                "image": function_json(&image),
            });
            Ok(Output::Table {
                json,
                header: vec!["signature", "value"],
                rows,
            })
        }
        HeckeCmd::Chain(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 2, MAX_HECKE_N)?;
            let p = cfg.require(a.p, "p", parse::prime)?;
            let base = cfg
                .pick(a.base, "base", parse::signature)?
                .unwrap_or_else(|| (0..n as i64 - 1).map(|i| 3 * i).collect());
            StratumFunction::indicator(n, p, &base)?;
            for l in 1..n {
                check_rep_count(n, p, l)?;
            }
            let chain = recursion_chain(n, p, &base)?;
            Ok(Output::Json(chain_json(&chain)))
        }
        HeckeCmd::Index(a) => {
            let g = cfg.require(a.matrix, "matrix", parse::int_matrix)?;
            if g.det().is_zero() {
                return Err(CliError::input("matrix must have nonzero determinant"));
            }
            let index = hecke_index(&g)?;
            Ok(Output::Json(json!({
                "matrix": render::int_matrix(&g),
                "elementary_divisors": elementary_divisors(&g).iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "index": index.to_string(),
            })))
        }
    }
}

pub fn chain_json(chain: &kms_core::hecke::RecursionChain) -> Value {
    json!({
        "n": chain.n,
        "p": chain.p,
        "base": chain.base,
        "steps": chain.steps.iter().map(|s| json!({
            "j": s.j,
            "n_j": render::q(&s.n_j),
            "carry": render::q(&s.carry),
            "image": function_json(&s.image),
            "remainder": function_json(&s.delta),
        })).collect::<Vec<_>>(),
        "closing": render::q(&chain.closing),
        "polynomial": render::poly(&chain.polynomial(), "x"),
        "matches_expected": chain.matches_expected(),
    })
}
