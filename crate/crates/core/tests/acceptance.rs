//! Acceptance gate: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{
    esym_by_subsets, poly_from_roots, random_p_integral_gl, random_rational_of_rank,
    random_unimodular, sigma1,
};
use kms_core::cosets::{coset_count, enumerate_reduced, enumerate_tl_reps, reduced_count};
use kms_core::exact::{pow_p, rat, ratio, Poly, RatFunc, Rational};
use kms_core::hecke::{
    coefficient_identity_check, kms_classify, phase_polynomial, phase_roots,
    recursion_coefficients, stationary_stratum_solution,
};
use kms_core::measure::{
    haar_mass_gl, scaling_check, singular_scaling_check, CylinderSet, LocalCylinder,
    SingularSupport,
};
use kms_core::padic::{minor_valuations, snf_witnesses, stratify};
use kms_core::zeta::{
    local_count_series, zeta_global, zeta_local, zeta_local_formal, zeta_local_partial, ZetaValue,
};
use kms_core::IntMatrix;
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn coset_counts() -> Check {
    let mut cases = 0;
    for n in 1..=4usize {
        for p in [2u64, 3, 5] {
            let powers: Vec<Rational> = (1..=n as i64).map(|i| pow_p(p, i)).collect();
            for l in 1..=n {
                let want = esym_by_subsets(l, &powers) / pow_p(p, (l * (l + 1) / 2) as i64);
                let reps = enumerate_tl_reps(n, p, l).map_err(e)?;
                ensure(rat(reps.len() as i64) == want, || {
                    format!("n={n} p={p} l={l}: {} reps, want {want}", reps.len())
                })?;
                ensure(coset_count(n, p, l).map_err(e)? == want, || {
                    format!("coset_count n={n} p={p} l={l}")
                })?;
                cases += 1;
            }
        }
    }
    let n1 = enumerate_tl_reps(3, 2, 1).map_err(e)?.len();
    let n2 = enumerate_tl_reps(3, 2, 2).map_err(e)?.len();
    ensure(n1 == 7 && n2 == 7, || format!("n=3 p=2 gives {n1}, {n2}"))?;
    Ok(format!("{cases} (n, p, l) cases; n=3 p=2: {n1}, {n2}"))
}

fn reduced_counts() -> Check {
    for m in 1..=200u64 {
        let c = reduced_count(2, m).map_err(e)?;
        ensure(c == BigUint::from(sigma1(m)), || {
            format!("n=2 m={m}: {c} vs σ1 = {}", sigma1(m))
        })?;
        ensure(
            enumerate_reduced(2, m).map_err(e)?.len() as u64 == sigma1(m),
            || format!("enumeration m={m}"),
        )?;
    }
    for m in [2u64, 3, 4, 6] {
        // Σ over diagonals (d1, d2, d3) with d1 d2 d3 = m of d1² d2.
        let mut want = 0u64;
        for d1 in 1..=m {
            for d2 in 1..=m {
                if m % (d1 * d2) == 0 {
                    want += d1 * d1 * d2;
                }
            }
        }
        let got = reduced_count(3, m).map_err(e)?;
        ensure(got == BigUint::from(want), || {
            format!("n=3 m={m}: {got} vs {want}")
        })?;
        ensure(
            enumerate_reduced(3, m).map_err(e)?.len() as u64 == want,
            || format!("n=3 enumeration m={m}"),
        )?;
    }
    Ok("n=2 m≤200 and n=3 m∈{2,3,4,6}".into())
}

const PHASE_PRIMES: [u64; 4] = [2, 3, 5, 7];

fn phase_factorization() -> Check {
    for n in 2..=6usize {
        for p in PHASE_PRIMES {
            let roots: Vec<Rational> = (0..n as i64).map(|i| pow_p(p, i)).collect();
            let want = Poly::new(poly_from_roots(&roots)).scale(&rat(-1));
            let got = phase_polynomial(n, p).map_err(e)?.poly;
            ensure(got == want, || format!("n={n} p={p}: {}", got.render("x")))?;
            ensure(phase_roots(n, p).map_err(e)? == roots, || {
                format!("roots n={n} p={p}")
            })?;
        }
    }
    Ok("n≤6, p∈{2,3,5,7}".into())
}

fn coefficient_identity() -> Check {
    for n in 2..=6usize {
        for p in PHASE_PRIMES {
            for l in 1..n {
                ensure(coefficient_identity_check(n, p, l).map_err(e)?, || {
                    format!("n={n} p={p} l={l}")
                })?;
            }
        }
    }
    Ok("n≤6, p∈{2,3,5,7}, 1≤l<n".into())
}

fn partition_convergence() -> Check {
    let part = zeta_local_partial(2, 2, &rat(3), 12).map_err(e)?;
    let target = 32.0 / 21.0;
    ensure((part.value - target).abs() < 1e-6, || {
        format!("K=12 partial {} vs 32/21", part.value)
    })?;
    ensure(
        zeta_local(2, 2, &rat(3)).map_err(e)? == ZetaValue::Exact(ratio(32, 21)),
        || "closed form".into(),
    )?;
    let brute: f64 = (1..=2000u64)
        .map(|m| sigma1(m) as f64 * (m as f64).powi(-4))
        .sum();
    ensure((brute - 1.301014).abs() < 1e-3, || {
        format!("σ1 sum {brute}")
    })?;
    let g = zeta_global(2, &rat(4), 2000).map_err(e)?;
    ensure((g.brute_value - brute).abs() < 1e-9, || {
        format!("brute {} vs oracle {brute}", g.brute_value)
    })?;
    ensure((g.euler_value - 1.301014).abs() < 1e-3, || {
        format!("Euler {}", g.euler_value)
    })?;
    ensure(g.intervals_overlap(), || {
        format!("{:?} vs {:?}", g.euler_interval, g.brute_interval)
    })?;
    Ok(format!(
        "K=12: {:.9}; M=2000: {brute:.6}; intervals overlap",
        part.value
    ))
}

fn mass_reciprocity() -> Check {
    for n in 1..=5usize {
        for p in [2u64, 3, 5] {
            let haar = haar_mass_gl(n, p).map_err(e)?;
            let z = zeta_local_formal(n, p).map_err(e)?;
            let prod = &RatFunc::from_poly(haar.clone()) * &z;
            ensure(prod == RatFunc::one(), || format!("n={n} p={p}: {prod}"))?;
            let series = &haar * &local_count_series(n, p, 10).map_err(e)?;
            ensure(series.truncate(10) == Poly::one(), || {
                format!("series n={n} p={p}")
            })?;
            let b = n as i64 + 1;
            if let ZetaValue::Exact(v) = zeta_local(n, p, &rat(b)).map_err(e)? {
                ensure(haar.eval(&pow_p(p, -b)) * v == rat(1), || {
                    format!("β={b} n={n} p={p}")
                })?;
            } else {
                return Err(format!("β={b} n={n} p={p} not exact"));
            }
        }
    }
    Ok("n≤5, p∈{2,3,5}".into())
}

fn random_positive_g(rng: &mut ChaCha8Rng, n: usize, primes: &[u64]) -> IntMatrix {
    let mut diag = vec![BigInt::from(1); n];
    for &p in primes {
        let budget = rng.gen_range(0..=3u32);
        for _ in 0..budget {
            let i = rng.gen_range(0..n);
            diag[i] *= BigInt::from(p);
        }
    }
    let u = random_unimodular(rng, n, 5);
    let v = random_unimodular(rng, n, 5);
    &(&u * &IntMatrix::diag(&diag)) * &v
}

fn random_cylinder(
    rng: &mut ChaCha8Rng,
    n: usize,
    p: u64,
    max_level: u32,
) -> Result<LocalCylinder, String> {
    let level = rng.gen_range(0..=max_level);
    let q = (p as i128).pow(level);
    let residue = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect())
        .collect();
    LocalCylinder::new(p, rng.gen_range(-1..=1), level, residue).map_err(e)
}

fn scaling_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    let (mut multi, mut moved) = (0, 0);
    for trial in 0..100 {
        let n = if trial % 3 == 2 { 3 } else { 2 };
        let (primes, max_level): (Vec<u64>, u32) = match (n, trial % 4) {
            (2, 0) => (vec![2, 3], 2),
            (2, _) => (vec![[2u64, 3, 5][trial % 3]], 2),
            (_, 0) => (vec![2, 3], 1),
            _ => (vec![2], 2),
        };
        let g = random_positive_g(&mut rng, n, &primes);
        let mut c = CylinderSet::new(n);
        for &p in &primes {
            c = c
                .with(p, random_cylinder(&mut rng, n, p, max_level)?)
                .map_err(e)?;
        }
        if primes.len() > 1 {
            multi += 1;
        }
        let report = scaling_check(&g, &c).map_err(e)?;
        moved += report
            .per_prime
            .iter()
            .filter(|x| x.exponent > 0 && !x.rhs.is_zero())
            .count();
        if !report.pass {
            let bad: Vec<String> = report
                .per_prime
                .iter()
                .filter(|x| !x.pass)
                .map(|x| format!("p={}: {} vs {}", x.p, x.lhs, x.rhs))
                .collect();
            return Err(format!("trial {trial} g={g}: {}", bad.join("; ")));
        }
    }
    let mut singular = 0;
    for n in 2..=3usize {
        for k in 1..n {
            for p in [2u64, 3] {
                for level in 1..=2u32 {
                    for a in 0..=2u32 {
                        let mut diag = vec![BigInt::from(1); n];
                        diag[rng.gen_range(0..n)] = BigInt::from(p.pow(a));
                        diag[n - 1] *= BigInt::from(p);
                        let g = IntMatrix::diag(&diag);
                        let q = (p as i128).pow(level);
                        let zero_block = rng.gen_bool(0.7);
                        let residue: Vec<Vec<i128>> = (0..n)
                            .map(|_| {
                                (0..n)
                                    .map(|j| {
                                        if j < n - k && zero_block {
                                            0
                                        } else {
                                            rng.gen_range(0..q)
                                        }
                                    })
                                    .collect()
                            })
                            .collect();
                        let cyl = LocalCylinder::new(p, rng.gen_range(-1..=1), level, residue)
                            .map_err(e)?;
                        let c = CylinderSet::single(p, cyl);
                        let (lhs, rhs) =
                            singular_scaling_check(n, k, &g, &c, &SingularSupport::untwisted(k))
                                .map_err(e)?;
                        ensure(lhs == rhs, || {
                            format!("singular n={n} k={k} g={g}: {lhs} vs {rhs}")
                        })?;
                        singular += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "100 scaling cases ({multi} multi-prime, {moved} prime checks with v(det g) > 0), {singular} singular cases"
    ))
}

fn stratification_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x57a7);
    for trial in 0..200 {
        let n = rng.gen_range(2..=4usize);
        let r = rng.gen_range(0..=n);
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let m = random_rational_of_rank(&mut rng, n, r);
        let (u, v) = if trial % 2 == 0 {
            (
                random_unimodular(&mut rng, n, 8).to_rational(),
                random_unimodular(&mut rng, n, 8).to_rational(),
            )
        } else {
            (
                random_p_integral_gl(&mut rng, n, p),
                random_p_integral_gl(&mut rng, n, p),
            )
        };
        let s = stratify(&m, p).map_err(e)?;
        let s2 = stratify(&(&(&u * &m) * &v), p).map_err(e)?;
        ensure(s == s2, || format!("trial {trial}: {s} vs {s2}"))?;
        if r > 0 {
            let w = snf_witnesses(&m, p).map_err(e)?;
            ensure(&(&w.b * &m) * &w.c == w.d, || {
                format!("trial {trial}: witness")
            })?;
            let mut exps = w.exponents(p);
            exps.sort_by_key(|x| x.unwrap_or(i64::MAX));
            for k in 1..=n {
                let want = exps[..k].iter().try_fold(0i64, |acc, x| x.map(|x| acc + x));
                let got = minor_valuations(&m, p, k).map_err(e)?;
                ensure(got == want, || {
                    format!("trial {trial} k={k}: {got:?} vs {want:?}")
                })?;
            }
        }
    }
    Ok("200 trials, n≤4".into())
}

fn hecke_recursion() -> Check {
    for n in 2..=3usize {
        for p in [2u64, 3] {
            let chain = recursion_coefficients(n, p).map_err(e)?;
            let carries: Vec<String> = chain.steps.iter().map(|s| s.carry.to_string()).collect();
            ensure(chain.matches_expected(), || {
                format!(
                    "n={n} p={p}: carries {carries:?}, closing {}",
                    chain.closing
                )
            })?;
            ensure(
                chain.polynomial() == phase_polynomial(n, p).map_err(e)?.poly,
                || format!("n={n} p={p}: polynomial"),
            )?;
            for a in -8..=4 * n as i64 + 8 {
                let beta = ratio(a, 4);
                let expect = a % 4 == 0 && (0..n as i64).contains(&(a / 4));
                let got = stationary_stratum_solution(n, p, &beta).map_err(e)?;
                ensure(got == expect, || format!("n={n} p={p} β={beta}: {got}"))?;
            }
        }
    }
    Ok("n∈{2,3}, p∈{2,3}; β grid step 1/4".into())
}

const GOLDEN: &[(usize, &str, &str)] = &[
    (2, "-1", "NoState"),
    (2, "0", "NoState"),
    (2, "1/2", "NoState"),
    (2, "1", "BoundaryConstructed(1, U\\GL_2(Ẑ))"),
    (2, "3/2", "UniqueState"),
    (2, "2", "UniqueState"),
    (2, "5/2", "ExtremalFamily(Γ\\P×GL_2(Ẑ))"),
    (2, "7", "ExtremalFamily(Γ\\P×GL_2(Ẑ))"),
    (3, "0", "NoState"),
    (3, "1/3", "NoState"),
    (3, "1", "BoundaryConstructed(1)"),
    (3, "3/2", "NoState"),
    (3, "2", "BoundaryConstructed(2)"),
    (3, "5/2", "UniqueState"),
    (3, "3", "UniqueState"),
    (3, "31/10", "ExtremalFamily(Γ\\P×GL_3(Ẑ))"),
    (4, "0", "NoState"),
    (4, "1/2", "NoState"),
    (4, "1", "BoundaryConstructed(1)"),
    (4, "2", "BoundaryConstructed(2)"),
    (4, "11/4", "NoState"),
    (4, "3", "BoundaryConstructed(3)"),
    (4, "13/4", "UniqueState"),
    (4, "4", "UniqueState"),
    (4, "9/2", "ExtremalFamily(Γ\\P×GL_4(Ẑ))"),
];

fn golden_table() -> Check {
    for &(n, beta, want) in GOLDEN {
        let b = kms_core::exact::parse_rational(beta).map_err(e)?;
        let got = kms_classify(n, &b).map_err(e)?.to_string();
        ensure(got == want, || {
            format!("n={n} β={beta}: {got}, want {want}")
        })?;
    }
    Ok(format!("{} rows", GOLDEN.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("coset counts", coset_counts),
        ("reduced counts", reduced_counts),
        ("phase polynomial factorization", phase_factorization),
        ("coefficient identity", coefficient_identity),
        ("partition function convergence", partition_convergence),
        ("mass reciprocity", mass_reciprocity),
        ("scaling identities", scaling_suite),
        ("stratification invariance", stratification_invariance),
        ("Hecke recursion", hecke_recursion),
        ("phase diagram table", golden_table),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
