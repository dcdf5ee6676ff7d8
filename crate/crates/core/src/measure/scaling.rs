//! The scaling identity `μ(gC) = t^{v_p(det g)} μ(C)`, prime by prime.
//!
//! The left side is evaluated in closed form: with `B g C' = D` from the
//! p-local normal form, `gC` has the same mass as `D·(C'^{-1} C)`, whose
//! rows are graded. The right side is the coset sum. The two routes share
//! no code beyond residue arithmetic.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::graded::{GradedRow, GradedSet};
use super::residue::{modulus, rational_mod, reduce};
use super::{local_mass, CylinderSet, LocalCylinder};
use crate::error::{Error, Result};
use crate::exact::{valuation, valuation_int, IntMatrix, RatFunc, RatMatrix};
use crate::padic::snf_witnesses;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeScaling {
    pub p: u64,
    pub exponent: i64,
    pub lhs: RatFunc,
    pub rhs: RatFunc,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingReport {
    pub per_prime: Vec<PrimeScaling>,
    pub pass: bool,
}

/// Prime divisors of a positive integer that fits in `u64`.
pub(crate) fn prime_divisors(m: &BigInt) -> Result<Vec<u64>> {
    let mut m = m
        .to_u64()
        .ok_or_else(|| Error::OutOfRange(format!("determinant {m}")))?;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    Ok(out)
}

pub(crate) fn positive_det(g: &IntMatrix) -> Result<BigInt> {
    let det = g.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    if det.is_negative() {
        return Err(Error::InvalidInput("det g must be positive".into()));
    }
    Ok(det)
}

/// Rows of `D·(C'^{-1}·C)`: scale shift, per-row exponent, and residue
/// `C'^{-1} R mod p^N`.
pub(crate) struct TransformedRows {
    pub exps: Vec<i64>,
    pub residue: Vec<Vec<i128>>,
}

pub(crate) fn transform_rows(
    g: &IntMatrix,
    p: u64,
    cyl: &LocalCylinder,
) -> Result<TransformedRows> {
    let w = snf_witnesses(&g.to_rational(), p)?;
    let exps: Vec<i64> =
        w.d.diagonal()
            .iter()
            .map(|x| valuation(x, p))
            .collect::<Result<_>>()?;
    let cinv: RatMatrix = w.c.inverse()?;
    let n = g.n();
    let q = modulus(p, cyl.level)?;
    let mut residue = vec![vec![0i128; n]; n];
    for (i, row) in residue.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let mut s = 0i128;
            for k in 0..n {
                s = reduce(s + rational_mod(&cinv[(i, k)], q)? * cyl.residue[k][j], q);
            }
            *out = s;
        }
    }
    Ok(TransformedRows { exps, residue })
}

/// `μ_p(g·C)` through the normal form of `g` and the closed-form evaluator.
pub fn image_mass(g: &IntMatrix, p: u64, cyl: &LocalCylinder) -> Result<RatFunc> {
    let n = g.n();
    let tr = transform_rows(g, p, cyl)?;
    let s = cyl.scale;
    let sigma = (s - tr.exps.iter().min().copied().unwrap_or(0)).max(0);
    let rows = tr
        .exps
        .iter()
        .zip(&tr.residue)
        .map(|(&d, r)| {
            let a = (d - s + sigma) as u32;
            let pa = (p as i128).pow(a);
            GradedRow {
                center: r.iter().map(|&x| x * pa).collect(),
                level: cyl.level + a,
            }
        })
        .collect();
    let graded = GradedSet::new(p, rows)?.mass()?;
    Ok(&graded * &RatFunc::t_pow(-(n as i64) * sigma))
}

pub fn scaling_check(g: &IntMatrix, c: &CylinderSet) -> Result<ScalingReport> {
    if g.n() != c.n {
        return Err(Error::DimensionMismatch(format!(
            "g is {}x{}, cylinder n = {}",
            g.n(),
            g.n(),
            c.n
        )));
    }
    let det = positive_det(g)?;
    let primes: BTreeSet<u64> = prime_divisors(&det)?
        .into_iter()
        .chain(c.parts.keys().copied())
        .collect();
    let mut per_prime = Vec::new();
    for p in primes {
        let cyl = c.part(p);
        let exponent = valuation_int(&det, p)?;
        let lhs = image_mass(g, p, &cyl)?;
        let rhs = &RatFunc::t_pow(exponent) * &local_mass(c.n, p, &cyl)?;
        let pass = lhs == rhs;
        per_prime.push(PrimeScaling {
            p,
            exponent,
            lhs,
            rhs,
            pass,
        });
    }
    let pass = per_prime.iter().all(|x| x.pass);
    Ok(ScalingReport { per_prime, pass })
}

/// Cylinders at level `N + v_p(det g)` whose disjoint union is `g·C`.
/// Fails when there would be more than `limit` of them.
pub fn image_cylinders(
    g: &IntMatrix,
    p: u64,
    cyl: &LocalCylinder,
    limit: usize,
) -> Result<Vec<LocalCylinder>> {
    let n = g.n();
    let v = valuation_int(&positive_det(g)?, p)? as u32;
    let level = cyl.level + v;
    let q = modulus(p, level)?;
    let qv = modulus(p, v)?;
    let pn = modulus(p, cyl.level)?;
    let gm: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| reduce((&g[(i, j)] % BigInt::from(q)).to_i128().unwrap(), q))
                .collect()
        })
        .collect();
    let mut columns = BTreeSet::new();
    crate::cosets::for_each_in_box(&vec![qv as u64; n], |y| {
        let col: Vec<i128> = (0..n)
            .map(|i| reduce((0..n).map(|k| gm[i][k] * y[k] as i128).sum::<i128>(), qv))
            .collect();
        columns.insert(col);
    });
    let columns: Vec<Vec<i128>> = columns.into_iter().collect();
    let count = columns.len().checked_pow(n as u32).filter(|&c| c <= limit);
    if count.is_none() {
        return Err(Error::OutOfRange(format!(
            "{}^{n} image classes",
            columns.len()
        )));
    }
    let base: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    reduce(
                        (0..n).map(|k| gm[i][k] * cyl.residue[k][j]).sum::<i128>(),
                        q,
                    )
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    crate::cosets::for_each_in_box(&vec![columns.len() as u64; n], |pick| {
        let mut r = base.clone();
        for (j, &c) in pick.iter().enumerate() {
            for i in 0..n {
                r[i][j] = reduce(r[i][j] + pn * columns[c as usize][i], q);
            }
        }
        out.push(LocalCylinder {
            scale: cyl.scale,
            level,
            residue: r,
        });
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_central_scaling() {
        let cyl = LocalCylinder::new(2, 1, 2, vec![vec![1, 2], vec![3, 0]]).unwrap();
        let c = CylinderSet::single(2, cyl);
        assert!(scaling_check(&IntMatrix::identity(2), &c).unwrap().pass);
        let g = IntMatrix::from_i64(&[&[2, 0], &[0, 2]]).unwrap();
        let r = scaling_check(&g, &c).unwrap();
        assert!(r.pass);
        assert_eq!(r.per_prime[0].exponent, 2);
    }

    #[test]
    fn union_of_images_matches_closed_form() {
        let g = IntMatrix::from_i64(&[&[1, 0], &[0, 2]]).unwrap();
        let cyl = LocalCylinder::new(2, 0, 1, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let parts = image_cylinders(&g, 2, &cyl, 1000).unwrap();
        let mut sum = RatFunc::zero();
        for part in &parts {
            sum = &sum + &local_mass(2, 2, part).unwrap();
        }
        assert_eq!(sum, image_mass(&g, 2, &cyl).unwrap());
        assert_eq!(sum, &RatFunc::t_pow(1) * &local_mass(2, 2, &cyl).unwrap());
    }
}
