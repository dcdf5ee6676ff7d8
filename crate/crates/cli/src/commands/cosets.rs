use clap::Args;
use kms_core::cosets::{coset_count, enumerate_reduced, enumerate_tl_reps, reduced_count};
use num_bigint::BigUint;
use serde_json::{json, Value};

use super::{check_n, MAX_LISTING, MAX_N};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::parse;
use crate::render::{self, Output};

/// Representatives of `Γ\T_l` (with --p, --l) or of reduced matrices of determinant m (with --m).
#[derive(Debug, Args)]
pub struct CosetsArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::prime)]
    pub p: Option<u64>,
    #[arg(long, value_parser = parse::usize_arg)]
    pub l: Option<usize>,
    #[arg(long, value_parser = parse::u64_arg)]
    pub m: Option<u64>,
}

pub fn run(args: CosetsArgs, cfg: &Config) -> CliResult<Output> {
    let n = cfg.require(args.n, "n", parse::usize_arg)?;
    check_n(n, 1, MAX_N)?;
    let l = cfg.pick(args.l, "l", parse::usize_arg)?;
    let m = cfg.pick(args.m, "m", parse::u64_arg)?;
    match (l, m) {
        (Some(_), Some(_)) => Err(CliError::input(
            "give either --l (with --p) or --m, not both",
        )),
        (Some(l), None) => {
            let p = cfg.require(args.p, "p", parse::prime)?;
            tl_listing(n, p, l)
        }
        (None, Some(m)) => reduced_listing(n, m),
        (None, None) => Err(CliError::input("missing --l (with --p) or --m")),
    }
}

const MAX_M: u64 = 1_000_000_000_000;

fn too_many(count: impl std::fmt::Display) -> CliError {
    CliError::input(format!(
        "{count} matrices exceeds the listing limit {MAX_LISTING}"
    ))
}

fn tl_listing(n: usize, p: u64, l: usize) -> CliResult<Output> {
    if l == 0 || l > n {
        return Err(CliError::input(format!("l = {l} outside 1..={n}")));
    }
    let expected = coset_count(n, p, l)?;
    if expected > kms_core::Rational::from_integer(MAX_LISTING.into()) {
        return Err(too_many(render::q(&expected)));
    }
    let reps = enumerate_tl_reps(n, p, l)?;
    if kms_core::Rational::from_integer(reps.len().into()) != expected {
        return Err(CliError::internal(format!(
            "{} representatives, formula gives {expected}",
            reps.len()
        )));
    }
    let matrices: Vec<Value> = reps.iter().map(|r| render::int_matrix(&r.matrix)).collect();
    let rows = reps
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let k: Vec<String> = r.k.iter().map(|x| x.to_string()).collect();
            vec![
                i.to_string(),
                k.join(""),
                render::int_matrix(&r.matrix).to_string(),
            ]
        })
        .collect();
    let json = json!({
        "kind": "hecke_cosets",
        "n": n,
        "p": p,
        "l": l,
        "count": reps.len(),
        "expected_count": render::q(&expected),
        "patterns": reps.iter().map(|r| r.k.clone()).collect::<Vec<_>>(),
        "matrices": matrices,
    });
    Ok(Output::Table {
        json,
        header: vec!["index", "pattern", "matrix"],
        rows,
    })
}

fn reduced_listing(n: usize, m: u64) -> CliResult<Output> {
    if m == 0 || m > MAX_M {
        return Err(CliError::input(format!("m = {m} outside 1..={MAX_M}")));
    }
    let count = reduced_count(n, m)?;
    if count > BigUint::from(MAX_LISTING) {
        return Err(too_many(&count));
    }
    let reps = enumerate_reduced(n, m)?;
    let rows = reps
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let d: Vec<String> = r.diag.iter().map(|x| x.to_string()).collect();
            vec![
                i.to_string(),
                d.join(" "),
                render::int_matrix(&r.inner).to_string(),
            ]
        })
        .collect();
    let json = json!({
        "kind": "reduced_matrices",
        "n": n,
        "m": m,
        "count": reps.len(),
        "diagonals": reps.iter().map(|r| r.diag.clone()).collect::<Vec<_>>(),
        "matrices": reps.iter().map(|r| render::int_matrix(&r.inner)).collect::<Vec<_>>(),
    });
    Ok(Output::Table {
        json,
        header: vec!["index", "diagonal", "matrix"],
        rows,
    })
}
