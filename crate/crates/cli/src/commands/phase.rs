use clap::Args;
use kms_core::exact::{format_rational, rat};
use kms_core::hecke::{kms_classify, phase_polynomial, phase_roots};
use serde_json::{json, Value};

use super::check_n;
use crate::config::Config;
use crate::error::CliResult;
use crate::parse::{self, Grid};
use crate::render::{self, Output};

/// Phase polynomial, its roots (with --p) and the verdict table over a β grid.
#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::prime)]
    pub p: Option<u64>,
    /// `start:stop:step`, rationals or decimals. Defaults to `0:n+1:1/4`.
    #[arg(long, value_parser = parse::grid)]
    pub beta_grid: Option<Grid>,
}

pub const MAX_PHASE_N: usize = 12;

pub fn verdict_rows(n: usize, grid: &Grid) -> CliResult<Vec<(String, String, &'static str)>> {
    grid.points()
        .iter()
        .map(|b| {
            let v = kms_classify(n, b)?;
            Ok((format_rational(b), v.to_string(), v.kind()))
        })
        .collect()
}

pub fn default_grid(n: usize) -> Grid {
    Grid {
        start: rat(0),
        stop: rat(n as i64 + 1),
        step: kms_core::exact::ratio(1, 4),
    }
}

pub fn run(args: PhaseArgs, cfg: &Config) -> CliResult<Output> {
    let n = cfg.require(args.n, "n", parse::usize_arg)?;
    check_n(n, 2, MAX_PHASE_N)?;
    let p = cfg.pick(args.p, "p", parse::prime)?;
    let grid = cfg
        .pick(args.beta_grid, "beta_grid", parse::grid)?
        .unwrap_or_else(|| default_grid(n));

    let table = verdict_rows(n, &grid)?;
    let mut json = json!({
        "n": n,
        "table": table
            .iter()
            .map(|(b, v, k)| json!({ "n": n, "beta": b, "verdict": v, "kind": k }))
            .collect::<Vec<Value>>(),
    });
    if let Some(p) = p {
        let poly = phase_polynomial(n, p)?.poly;
        let roots = phase_roots(n, p)?;
        json["p"] = json!(p);
        json["polynomial"] = render::poly(&poly, "x");
        json["roots"] = render::qs(&roots);
        json["roots_verified"] = json!(true);
    }
    let rows = table
        .into_iter()
        .map(|(b, v, _)| vec![n.to_string(), b, v])
        .collect();
    Ok(Output::Table {
        json,
        header: vec!["n", "beta", "verdict"],
        rows,
    })
}
