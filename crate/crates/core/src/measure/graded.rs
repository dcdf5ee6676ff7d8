//! Closed-form masses from the density `c·|det y|^{β-n} dy`.
//!
//! A row-graded set fixes each row separately, `y_i ∈ x_i + p^{L_i} Z_p^n`.
//! When the rows with `v(x_i) < L_i` have primitive parts independent mod p,
//! the determinant splits into a fixed p-power times the determinant of the
//! remaining free block, whose integral is Igusa's
//! `∏_{j≤b} (1 - p^{-j}) / (1 - p^{-j} w)`, `w = pⁿ t`. Otherwise a
//! determinant-one row shear (legal because it moves the row with the least
//! slack `L - v`) raises one valuation and the loop repeats.

use num_traits::One;

use super::haar_mass_gl;
use super::residue::{inv_mod, modulus, reduce};
use crate::error::{Error, Result};
use crate::exact::{pow_p, require_prime, Poly, RatFunc, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRow {
    /// Entries taken mod `p^level`.
    pub center: Vec<i128>,
    pub level: u32,
}

/// `{y ∈ Mat_n(Z_p) : y_i ≡ center_i mod p^{level_i}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSet {
    pub p: u64,
    pub rows: Vec<GradedRow>,
}

fn row_valuation(row: &[i128], p: u64, cap: u32) -> u32 {
    row.iter()
        .map(|&x| super::residue::val_capped(x, p, cap))
        .min()
        .unwrap_or(cap)
}

/// A nontrivial relation `Σ c_i u_i ≡ 0 (mod p)` among the given vectors.
fn relation_mod_p(vectors: &[Vec<i128>], p: u64) -> Option<Vec<i128>> {
    let p = p as i128;
    let m = vectors.len();
    let n = vectors.first().map_or(0, |v| v.len());
    // Each working row is (vector | combination that produced it).
    let mut rows: Vec<(Vec<i128>, Vec<i128>)> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut comb = vec![0; m];
            comb[i] = 1;
            (v.iter().map(|&x| reduce(x, p)).collect(), comb)
        })
        .collect();
    let mut r = 0;
    for col in 0..n {
        let Some(piv) = (r..m).find(|&i| rows[i].0[col] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = inv_mod(rows[r].0[col], p).expect("nonzero mod p");
        for i in 0..m {
            if i != r && rows[i].0[col] != 0 {
                let f = reduce(rows[i].0[col] * inv, p);
                let (pv, pc) = rows[r].clone();
                for (a, b) in rows[i].0.iter_mut().zip(&pv) {
                    *a = reduce(*a - f * b, p);
                }
                for (a, b) in rows[i].1.iter_mut().zip(&pc) {
                    *a = reduce(*a - f * b, p);
                }
            }
        }
        r += 1;
    }
    rows.into_iter().skip(r).map(|(_, c)| c).next()
}

impl GradedSet {
    pub fn new(p: u64, rows: Vec<GradedRow>) -> Result<Self> {
        require_prime(p)?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.center.len() != n) {
            return Err(Error::DimensionMismatch(
                "graded rows must form a square matrix".into(),
            ));
        }
        let mut out = GradedSet { p, rows };
        for r in &mut out.rows {
            let q = modulus(p, r.level)?;
            r.center.iter_mut().for_each(|x| *x = reduce(*x, q));
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Mass as a rational function of `t = p^{-β}`.
    pub fn mass(&self) -> Result<RatFunc> {
        let p = self.p;
        let n = self.n();
        let mut rows = self.rows.clone();
        loop {
            let vals: Vec<u32> = rows
                .iter()
                .map(|r| row_valuation(&r.center, p, r.level))
                .collect();
            let fixed: Vec<usize> = (0..n).filter(|&i| vals[i] < rows[i].level).collect();
            let prim: Vec<Vec<i128>> = fixed
                .iter()
                .map(|&i| {
                    let pv = (p as i128).pow(vals[i]);
                    rows[i].center.iter().map(|&x| x / pv).collect()
                })
                .collect();
            let Some(rel) = relation_mod_p(&prim, p) else {
                return Ok(self.closed_form(&rows, &vals, fixed.len()));
            };
            let support: Vec<usize> = (0..fixed.len()).filter(|&a| rel[a] != 0).collect();
            let &ka = support
                .iter()
                .min_by_key(|&&a| (rows[fixed[a]].level - vals[fixed[a]], a))
                .expect("relation has support");
            let k = fixed[ka];
            let q = modulus(p, rows[k].level)?;
            let ck_inv = inv_mod(rel[ka], p as i128)?;
            let ek = (p as i128).pow(vals[k]);
            let mut new = rows[k].center.clone();
            for &a in &support {
                if a == ka {
                    continue;
                }
                let coef = reduce(rel[a] * ck_inv, p as i128);
                for (x, u) in new.iter_mut().zip(&prim[a]) {
                    *x = reduce(*x + reduce(coef * ek, q) * reduce(*u, q), q);
                }
            }
            let before = vals[k];
            rows[k].center = new;
            if row_valuation(&rows[k].center, p, rows[k].level) <= before {
                return Err(Error::Internal(
                    "row shear did not raise the valuation".into(),
                ));
            }
        }
    }

    fn closed_form(&self, rows: &[GradedRow], vals: &[u32], fixed: usize) -> RatFunc {
        let p = self.p;
        let n = self.n();
        let b = n - fixed;
        let levels: i64 = rows.iter().map(|r| r.level as i64).sum();
        let e: i64 = vals.iter().map(|&v| v as i64).sum();
        let num = haar_mass_gl(n, p).expect("prime checked");
        let mut den = Poly::one();
        let mut c = Rational::one();
        for j in 1..=n as i64 {
            if j <= b as i64 {
                den = &den * &Poly::one_minus(pow_p(p, n as i64 - j));
            } else {
                c /= Rational::one() - pow_p(p, -j);
            }
        }
        c *= pow_p(p, n as i64 * (e - levels));
        let num = num.scale(&c);
        &RatFunc::new(num, den).expect("nonzero denominator") * &RatFunc::t_pow(e)
    }
}
