//! The measures at integer `β = k < n`: additive Haar measure on the last
//! `k` columns of `Mat_n^k = {[0_{n-k} | Y]}`, moved by a unit twist `g`
//! acting on the right, normalized so `Z_p^{n×k}` has mass one.

use std::collections::BTreeMap;

use num_traits::One;

use super::residue::{modulus, rational_mod, reduce};
use super::scaling::{positive_det, prime_divisors, transform_rows};
use super::{CylinderSet, LocalCylinder};
use crate::error::{Error, Result};
use crate::exact::{pow_p, valuation_int, IntMatrix, RatMatrix, Rational};
use crate::padic::{is_p_integral_matrix, is_p_unit};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularSupport {
    pub k: usize,
    /// Per-prime right twist in `GL_n(Z_p)`; identity where absent.
    pub twist: BTreeMap<u64, RatMatrix>,
}

impl SingularSupport {
    pub fn untwisted(k: usize) -> Self {
        SingularSupport {
            k,
            twist: BTreeMap::new(),
        }
    }

    fn twist_inverse(&self, n: usize, p: u64) -> Result<RatMatrix> {
        match self.twist.get(&p) {
            None => Ok(RatMatrix::identity(n)),
            Some(g) => {
                if g.n() != n || !is_p_integral_matrix(g, p) || !is_p_unit(&g.det(), p) {
                    return Err(Error::InvalidInput(format!(
                        "twist at {p} is not in GL_{n}(Z_{p})"
                    )));
                }
                g.inverse()
            }
        }
    }
}

/// One row `p^{-s}(x + p^L Z_p^n)`.
struct Row<'a> {
    scale: i64,
    center: &'a [i128],
    level: u32,
}

/// Mass of a product of rows intersected with `Mat_n^k · g`.
fn rows_mass(p: u64, k: usize, ginv: &RatMatrix, rows: &[Row<'_>]) -> Result<Rational> {
    let n = ginv.n();
    let mut acc = Rational::one();
    for r in rows {
        let q = modulus(p, r.level)?;
        for j in 0..n - k {
            let mut s = 0i128;
            for (i, &x) in r.center.iter().enumerate() {
                s = reduce(s + x * rational_mod(&ginv[(i, j)], q)?, q);
            }
            if s != 0 {
                return Ok(Rational::from_integer(0.into()));
            }
        }
        acc *= pow_p(p, (r.scale - r.level as i64) * k as i64);
    }
    Ok(acc)
}

fn check_k(n: usize, k: usize, support: &SingularSupport) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::OutOfRange(format!("k = {k} for n = {n}")));
    }
    if support.k != k {
        return Err(Error::InvalidInput(
            "support built for a different k".into(),
        ));
    }
    Ok(())
}

fn local_singular(p: u64, k: usize, ginv: &RatMatrix, cyl: &LocalCylinder) -> Result<Rational> {
    let rows: Vec<Row<'_>> = cyl
        .residue
        .iter()
        .map(|r| Row {
            scale: cyl.scale,
            center: r,
            level: cyl.level,
        })
        .collect();
    rows_mass(p, k, ginv, &rows)
}

/// Mass of `C ∩ Mat_n^k · g` at `β = k`.
pub fn singular_mass(
    n: usize,
    k: usize,
    c: &CylinderSet,
    support: &SingularSupport,
) -> Result<Rational> {
    check_k(n, k, support)?;
    if c.n != n {
        return Err(Error::DimensionMismatch("cylinder dimension".into()));
    }
    let mut acc = Rational::one();
    for (&p, cyl) in &c.parts {
        acc *= local_singular(p, k, &support.twist_inverse(n, p)?, cyl)?;
    }
    Ok(acc)
}

/// `(mass(g·C), p^{-k·v_p(det g)}·mass(C))` over all relevant primes.
pub fn singular_scaling_check(
    n: usize,
    k: usize,
    g: &IntMatrix,
    c: &CylinderSet,
    support: &SingularSupport,
) -> Result<(Rational, Rational)> {
    check_k(n, k, support)?;
    if g.n() != n || c.n != n {
        return Err(Error::DimensionMismatch("g and cylinder dimensions".into()));
    }
    let det = positive_det(g)?;
    let mut primes: Vec<u64> = prime_divisors(&det)?;
    primes.extend(c.parts.keys().copied());
    primes.sort_unstable();
    primes.dedup();
    let (mut lhs, mut rhs) = (Rational::one(), Rational::one());
    for p in primes {
        let cyl = c.part(p);
        let ginv = support.twist_inverse(n, p)?;
        // Left units preserve both the support and column Haar measure.
        let tr = transform_rows(g, p, &cyl)?;
        let rows: Vec<Row<'_>> = tr
            .exps
            .iter()
            .zip(&tr.residue)
            .map(|(&d, r)| Row {
                scale: cyl.scale - d,
                center: r,
                level: cyl.level,
            })
            .collect();
        lhs *= rows_mass(p, k, &ginv, &rows)?;
        let v = valuation_int(&det, p)?;
        rhs *= pow_p(p, -(k as i64) * v) * local_singular(p, k, &ginv, &cyl)?;
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn singular_examples() {
        let s = SingularSupport::untwisted(1);
        let zero_block = CylinderSet::single(
            2,
            LocalCylinder::new(2, 0, 1, vec![vec![0, 0], vec![0, 0]]).unwrap(),
        );
        // One of the p^{nk} classes that refine "first column ≡ 0".
        assert_eq!(singular_mass(2, 1, &zero_block, &s).unwrap(), ratio(1, 4));
        let fixed = CylinderSet::single(
            3,
            LocalCylinder::new(3, 0, 1, vec![vec![0, 1], vec![0, 2]]).unwrap(),
        );
        assert_eq!(singular_mass(2, 1, &fixed, &s).unwrap(), ratio(1, 9));
        let off = CylinderSet::single(
            3,
            LocalCylinder::new(3, 0, 1, vec![vec![1, 1], vec![0, 2]]).unwrap(),
        );
        assert_eq!(singular_mass(2, 1, &off, &s).unwrap(), ratio(0, 1));
        assert_eq!(
            singular_mass(2, 1, &CylinderSet::new(2), &s).unwrap(),
            ratio(1, 1)
        );
    }

    #[test]
    fn singular_scaling_diagonal() {
        let s = SingularSupport::untwisted(1);
        let g = IntMatrix::from_i64(&[&[1, 0], &[0, 2]]).unwrap();
        let c = CylinderSet::single(
            2,
            LocalCylinder::new(2, 0, 2, vec![vec![0, 3], vec![0, 1]]).unwrap(),
        );
        let (l, r) = singular_scaling_check(2, 1, &g, &c, &s).unwrap();
        assert_eq!(l, r);
        assert_eq!(l, ratio(1, 2) * singular_mass(2, 1, &c, &s).unwrap());
    }
}
