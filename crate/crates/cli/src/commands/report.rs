use clap::Args;
use kms_core::cosets::coset_count;
use kms_core::exact::{rat, Poly, RatFunc, Rational};
use kms_core::hecke::{
    coefficient_identity_check, phase_polynomial, phase_roots, recursion_coefficients,
};
use kms_core::measure::{
    haar_mass_gl, polarization_check, scaling_check, CylinderSet, LocalCylinder,
};
use kms_core::padic::stratify;
use kms_core::zeta::{local_count_series, zeta_global, zeta_local_formal};
use kms_core::{IntMatrix, RatMatrix};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::check_n;
use super::phase::{default_grid, verdict_rows};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::parse;
use crate::render::{self, f64_value, Output};

/// Phase diagram and identity checks for one n over a set of primes.
#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, value_parser = parse::usize_arg)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse::primes)]
    pub primes: Option<::std::vec::Vec<u64>>,
    /// Seed for the randomized checks (default 0).
    #[arg(long, value_parser = parse::u64_arg)]
    pub seed: Option<u64>,
    /// Number of randomized trials per check (default 20).
    #[arg(long, value_parser = parse::usize_arg)]
    pub samples: Option<usize>,
}

const MAX_REPORT_N: usize = 6;
const MAX_REPORT_PRIME: u64 = 97;
const MAX_SAMPLES: usize = 1000;
/// The recursion chain is only run when `Σ_l n_l · 2^{n-1}` (cosets times
/// window size) stays below this.
const CHAIN_BUDGET: i64 = 6_000;

struct Checks(Vec<(String, bool)>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, pass: bool) -> bool {
        self.0.push((name.into(), pass));
        pass
    }
}

fn prime_section(n: usize, p: u64, checks: &mut Checks) -> CliResult<Value> {
    let counts: Vec<Rational> = (1..=n)
        .map(|l| coset_count(n, p, l))
        .collect::<Result<_, _>>()?;
    let duality = (1..n).all(|l| counts[l - 1] == counts[n - l - 1]);
    checks.add(format!("p={p}: coset count duality"), duality);

    let poly = phase_polynomial(n, p)?.poly;
    let roots = phase_roots(n, p)?;
    let mut expected = Poly::constant(rat(-1));
    for r in &roots {
        expected = &expected * &Poly::new(vec![-r.clone(), rat(1)]);
    }
    checks.add(format!("p={p}: phase polynomial factors"), poly == expected);

    let mut identity = true;
    for l in 1..n {
        identity &= coefficient_identity_check(n, p, l)?;
    }
    checks.add(format!("p={p}: coefficient identity"), identity);

    let work: Rational = counts[..n - 1].iter().sum::<Rational>() * rat(1 << (n - 1));
    let chain = if work <= rat(CHAIN_BUDGET) {
        let chain = recursion_coefficients(n, p)?;
        let ok = chain.matches_expected() && chain.polynomial() == poly;
        checks.add(format!("p={p}: recursion chain"), ok);
        json!({
            "carries": chain.steps.iter().map(|s| render::q(&s.carry)).collect::<Vec<_>>(),
            "closing": render::q(&chain.closing),
            "matches_expected": chain.matches_expected(),
            "polynomial_matches": chain.polynomial() == poly,
        })
    } else {
        json!("skipped: too many cosets for the report budget")
    };

    let haar = haar_mass_gl(n, p)?;
    let reciprocity =
        &RatFunc::from_poly(haar.clone()) * &zeta_local_formal(n, p)? == RatFunc::one();
    checks.add(format!("p={p}: haar · zeta = 1"), reciprocity);
    let series = (&haar * &local_count_series(n, p, 10)?).truncate(10) == Poly::one();
    checks.add(format!("p={p}: total mass series"), series);

    let beta = rat(n as i64 + 1);
    // p^K must fit in u64 for the coset counts.
    let terms = (0..=12u32)
        .take_while(|&k| p.checked_pow(k).is_some())
        .last()
        .unwrap_or(0) as usize;
    let pol = polarization_check(n, p, &beta, terms)?;
    checks.add(format!("p={p}: polarization at β = n+1"), pol.pass);

    Ok(json!({
        "coset_counts": render::qs(&counts),
        "phase_polynomial": render::poly(&poly, "x"),
        "roots": render::qs(&roots),
        "haar_mass": render::poly(&haar, "t"),
        "chain": chain,
        "polarization": {
            "beta": render::q(&beta),
            "terms": terms,
            "residual": f64_value(pol.residual),
            "bound": f64_value(pol.bound),
            "pass": pol.pass,
        },
    }))
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            m.add_row_multiple(i, j, &BigInt::from(rng.gen_range(-2i64..=2)));
        }
    }
    m
}

fn random_rational(rng: &mut ChaCha8Rng, n: usize) -> RatMatrix {
    let rank = rng.gen_range(0..=n);
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|_| {
                    if i < rank {
                        Rational::new(
                            rng.gen_range(-30i64..=30).into(),
                            rng.gen_range(1i64..=30).into(),
                        )
                    } else {
                        rat(0)
                    }
                })
                .collect()
        })
        .collect();
    let m = RatMatrix::from_rows(rows).expect("square");
    &random_unimodular(rng, n).to_rational() * &m
}

fn randomized(
    n: usize,
    primes: &[u64],
    seed: u64,
    samples: usize,
    checks: &mut Checks,
) -> CliResult<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strat_ok = 0;
    for _ in 0..samples {
        let p = primes[rng.gen_range(0..primes.len())];
        let m = random_rational(&mut rng, n);
        let u = random_unimodular(&mut rng, n).to_rational();
        let v = random_unimodular(&mut rng, n).to_rational();
        if stratify(&m, p)? == stratify(&(&(&u * &m) * &v), p)? {
            strat_ok += 1;
        }
    }
    checks.add("stratum invariance (randomized)", strat_ok == samples);
    let mut out =
        json!({ "seed": seed, "samples": samples, "stratum_invariance_passed": strat_ok });

    let small: Vec<u64> = primes.iter().copied().filter(|&p| p <= 5).collect();
    if n <= 3 && !small.is_empty() {
        let mut scaling_ok = 0;
        for _ in 0..samples {
            let p = small[rng.gen_range(0..small.len())];
            let mut diag = vec![BigInt::from(1); n];
            diag[rng.gen_range(0..n)] = BigInt::from(p);
            let g = &(&random_unimodular(&mut rng, n) * &IntMatrix::diag(&diag))
                * &random_unimodular(&mut rng, n);
            let q = p as i128;
            let residue = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect())
                .collect();
            let cyl = LocalCylinder::new(p, rng.gen_range(-1..=1), 1, residue)?;
            if scaling_check(&g, &CylinderSet::single(p, cyl))?.pass {
                scaling_ok += 1;
            }
        }
        checks.add("scaling identity (randomized)", scaling_ok == samples);
        out["scaling_passed"] = json!(scaling_ok);
    }
    Ok(out)
}

pub fn run(args: ReportArgs, cfg: &Config) -> CliResult<Output> {
    let n = cfg.require(args.n, "n", parse::usize_arg)?;
    check_n(n, 2, MAX_REPORT_N)?;
    let primes = cfg.require(args.primes, "primes", parse::primes)?;
    if let Some(&p) = primes.iter().find(|&&p| p > MAX_REPORT_PRIME) {
        return Err(CliError::input(format!(
            "prime {p} exceeds {MAX_REPORT_PRIME}"
        )));
    }
    let seed = cfg.pick(args.seed, "seed", parse::u64_arg)?.unwrap_or(0);
    let samples = cfg
        .pick(args.samples, "samples", parse::usize_arg)?
        .unwrap_or(20);
    if samples > MAX_SAMPLES {
        return Err(CliError::input(format!(
            "samples must be at most {MAX_SAMPLES}"
        )));
    }

    let mut checks = Checks(Vec::new());
    let table: Vec<Value> = verdict_rows(n, &default_grid(n))?
        .into_iter()
        .map(|(b, v, k)| json!({ "n": n, "beta": b, "verdict": v, "kind": k }))
        .collect();
    let mut per_prime = Map::new();
    for &p in &primes {
        per_prime.insert(p.to_string(), prime_section(n, p, &mut checks)?);
    }
    let beta = rat(n as i64 + 1);
    let global = zeta_global(n, &beta, 1000)?;
    checks.add("global zeta enclosures overlap", global.intervals_overlap());
    let random = randomized(n, &primes, seed, samples, &mut checks)?;
    let all_pass = checks.0.iter().all(|(_, ok)| *ok);

    let out = json!({
        "n": n,
        "primes": primes,
        "phase_table": table,
        "per_prime": Value::Object(per_prime),
        "global_zeta": {
            "beta": render::q(&beta),
            "terms": 1000,
            "euler_product": f64_value(global.euler_value),
            "brute_force": f64_value(global.brute_value),
            "intervals_overlap": global.intervals_overlap(),
        },
        "randomized": random,
        "checks": checks.0.iter().map(|(name, ok)| json!({ "name": name, "pass": ok })).collect::<Vec<_>>(),
        "all_pass": all_pass,
    });
    if !all_pass {
        return Err(CliError::internal(format!("report checks failed: {out}")));
    }
    Ok(Output::Json(out))
}
