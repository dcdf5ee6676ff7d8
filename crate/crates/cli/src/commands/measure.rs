use clap::{Args, Subcommand};
use kms_core::exact::{format_rational, is_integer, rational_to_f64, Rational};
use kms_core::measure::{
    extremal_label_beta1_gl2, mass, polarization_check, scaling_check, singular_mass,
    singular_scaling_check, CylinderSet, SingularSupport,
};
use kms_core::padic::rank1_normalize;
use kms_core::{IntMatrix, RatMatrix};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use super::check_n;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::parse;
use crate::render::{self, f64_value, Output};

#[derive(Debug, Subcommand)]
pub enum MeasureCmd {
    /// Checks `μ(gC) = t^{v(det g)} μ(C)` prime by prime as rational functions.
    Scaling(ScalingArgs),
    /// Mass of a cylinder as a rational function of `t_p = p^{-β}`.
    Mass(MassArgs),
    /// Total mass of the truncated coset sum against one.
    Polarization(PolarizationArgs),
    /// Mass for the singular measure at integer `β = k < n`.
    Singular(SingularArgs),
    /// Coset label of a rank-one 2x2 matrix at `β = 1`.
    Label(LabelArgs),
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    /// Integer matrix with positive determinant.
    #[arg(long, value_parser = parse::int_matrix)]
    pub g: Option<IntMatrix>,
    /// `{"p":2,"scale":0,"level":1,"residue":[[..]]}` or an array of these.
    /// Primes without a cylinder use all of `Mat_n(Z_p)`.
    #[arg(long, value_parser = parse::cylinder_json)]
    pub cylinder: Option<Value>,
}

#[derive(Debug, Args)]
pub struct MassArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::cylinder_json)]
    pub cylinder: Option<Value>,
    /// Optional β at which to evaluate.
    #[arg(long, value_parser = parse::rational)]
    pub beta: Option<Rational>,
}

#[derive(Debug, Args)]
pub struct PolarizationArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::prime)]
    pub p: Option<u64>,
    #[arg(long, value_parser = parse::rational)]
    pub beta: Option<Rational>,
    /// Truncation K of the coset sum (default 12).
    #[arg(long, value_parser = parse::usize_arg)]
    pub terms: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SingularArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::usize_arg)]
    pub k: Option<usize>,
    #[arg(long, value_parser = parse::cylinder_json)]
    pub cylinder: Option<Value>,
    /// Also check scaling under this positive-determinant integer matrix.
    #[arg(long, value_parser = parse::int_matrix)]
    pub g: Option<IntMatrix>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Rank-one 2x2 rational matrix.
    #[arg(long, value_parser = parse::rat_matrix)]
    pub matrix: Option<RatMatrix>,
    #[arg(long, value_parser = parse::primes)]
    pub primes: Option<::std::vec::Vec<u64>>,
}

const MAX_MEASURE_N: usize = 3;
/// Bound on `p^{n·(level + v_p(det g))}`, which governs the residue enumeration.
const MAX_CLASSES: f64 = 1e7;

fn cylinder_set(
    n: usize,
    v: Option<Value>,
    extra_valuation: &dyn Fn(u64) -> u32,
) -> CliResult<CylinderSet> {
    let mut c = CylinderSet::new(n);
    if let Some(v) = v {
        for (p, cyl) in parse::cylinders(&v).map_err(CliError::input)? {
            if cyl.n() != n {
                return Err(CliError::input(format!(
                    "cylinder at p = {p} is {}x{}, n = {n}",
                    cyl.n(),
                    cyl.n()
                )));
            }
            let size = (p as f64).powi((n as u32 * (cyl.level + extra_valuation(p))) as i32);
            if size > MAX_CLASSES {
                return Err(CliError::input(format!(
                    "cylinder at p = {p} is too fine to enumerate"
                )));
            }
            c = c.with(p, cyl)?;
        }
    }
    Ok(c)
}

fn check_g(g: &IntMatrix, n: usize) -> CliResult<()> {
    if g.n() != n {
        return Err(CliError::input(format!(
            "g is {}x{}, n = {n}",
            g.n(),
            g.n()
        )));
    }
    if g.det() <= 0.into() {
        return Err(CliError::input("g must have positive determinant"));
    }
    Ok(())
}

fn det_valuation(g: &IntMatrix, p: u64) -> u32 {
    let mut d = g.det();
    let mut v = 0;
    let pb = num_bigint::BigInt::from(p);
    while d != 0.into() && (&d % &pb) == 0.into() {
        d /= &pb;
        v += 1;
    }
    v
}

/// `det(g)^n` bounds the number of image classes over all primes of `det g`.
fn check_det_size(g: &IntMatrix) -> CliResult<()> {
    let d = g.det().to_f64().unwrap_or(f64::INFINITY);
    if d.powi(g.n() as i32) > MAX_CLASSES {
        return Err(CliError::input("det g is too large to enumerate"));
    }
    Ok(())
}

pub fn run(cmd: MeasureCmd, cfg: &Config) -> CliResult<Output> {
    match cmd {
        MeasureCmd::Scaling(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 1, MAX_MEASURE_N)?;
            let g = cfg.require(a.g, "g", parse::int_matrix)?;
            check_g(&g, n)?;
            check_det_size(&g)?;
            let c = cylinder_set(
                n,
                cfg.pick(a.cylinder, "cylinder", parse::cylinder_json)?,
                &|p| det_valuation(&g, p),
            )?;
            let report = scaling_check(&g, &c)?;
            let per_prime: Vec<Value> = report
                .per_prime
                .iter()
                .map(|x| {
                    json!({
                        "p": x.p,
                        "det_valuation": x.exponent,
                        "lhs": render::ratfunc(&x.lhs),
                        "rhs": render::ratfunc(&x.rhs),
                        "pass": x.pass,
                    })
                })
                .collect();
            let verdict = if report.pass { "PASS (exact)" } else { "FAIL" };
            let out = json!({
                "n": n,
                "g": render::int_matrix(&g),
                "per_prime": per_prime,
                "verdict": verdict,
            });
            if !report.pass {
                return Err(CliError::internal(format!(
                    "scaling identity failed: {out}"
                )));
            }
            Ok(Output::Json(out))
        }
        MeasureCmd::Mass(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 1, MAX_MEASURE_N)?;
            let raw = cfg.require(a.cylinder, "cylinder", parse::cylinder_json)?;
            let c = cylinder_set(n, Some(raw), &|_| 0)?;
            let beta = cfg.pick(a.beta, "beta", parse::rational)?;
            let m = mass(&c)?;
            let mut factors = Map::new();
            for (p, f) in &m.factors {
                factors.insert(p.to_string(), render::ratfunc(f));
            }
            let mut out = json!({ "n": n, "factors": Value::Object(factors) });
            if let Some(b) = beta {
                out["beta"] = json!(format_rational(&b));
                out["value"] = match b.to_integer().to_i64().filter(|_| is_integer(&b)) {
                    Some(k) => render::q(&m.eval_integer_beta(k)?),
                    None => f64_value(m.eval_f64(rational_to_f64(&b))),
                };
            }
            Ok(Output::Json(out))
        }
        MeasureCmd::Polarization(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 1, 8)?;
            let p = cfg.require(a.p, "p", parse::prime)?;
            let beta = cfg.require(a.beta, "beta", parse::rational)?;
            let terms = cfg.pick(a.terms, "terms", parse::usize_arg)?.unwrap_or(12);
            if terms > 60 {
                return Err(CliError::input("terms must be at most 60"));
            }
            let r = polarization_check(n, p, &beta, terms)?;
            Ok(Output::Json(json!({
                "n": n,
                "p": p,
                "beta": format_rational(&beta),
                "terms": terms,
                "residual": f64_value(r.residual),
                "exact_residual": r.exact_residual.as_ref().map(render::q),
                "bound": f64_value(r.bound),
                "pass": r.pass,
            })))
        }
        MeasureCmd::Singular(a) => {
            let n = cfg.require(a.n, "n", parse::usize_arg)?;
            check_n(n, 2, MAX_MEASURE_N)?;
            let k = cfg.require(a.k, "k", parse::usize_arg)?;
            if k == 0 || k >= n {
                return Err(CliError::input(format!("k = {k} outside 1..{n}")));
            }
            let raw = cfg.require(a.cylinder, "cylinder", parse::cylinder_json)?;
            let c = cylinder_set(n, Some(raw), &|_| 0)?;
            let g = cfg.pick(a.g, "g", parse::int_matrix)?;
            if let Some(g) = &g {
                check_g(g, n)?;
                check_det_size(g)?;
            }
            let support = SingularSupport::untwisted(k);
            let m = singular_mass(n, k, &c, &support)?;
            let mut out = json!({ "n": n, "k": k, "mass": render::q(&m) });
            if let Some(g) = g {
                let (lhs, rhs) = singular_scaling_check(n, k, &g, &c, &support)?;
                out["scaling"] = json!({
                    "g": render::int_matrix(&g),
                    "lhs": render::q(&lhs),
                    "rhs": render::q(&rhs),
                    "verdict": if lhs == rhs { "PASS (exact)" } else { "FAIL" },
                });
                if lhs != rhs {
                    return Err(CliError::internal(format!(
                        "singular scaling failed: {out}"
                    )));
                }
            }
            Ok(Output::Json(out))
        }
        MeasureCmd::Label(a) => {
            let m = cfg.require(a.matrix, "matrix", parse::rat_matrix)?;
            let primes = cfg.require(a.primes, "primes", parse::primes)?;
            let labels = extremal_label_beta1_gl2(&m, &primes)?;
            let mut per_prime = Map::new();
            for (p, label) in &labels {
                per_prime.insert(
                    p.to_string(),
                    json!({
                        "kernel": [render::q(&label.kernel.0), render::q(&label.kernel.1)],
                        "representative": render::rat_matrix(&label.representative),
                        "normalizer": render::rat_matrix(&rank1_normalize(&m, *p)?),
                    }),
                );
            }
            Ok(Output::Json(json!({
                "matrix": render::rat_matrix(&m),
                "labels": Value::Object(per_prime),
            })))
        }
    }
}
