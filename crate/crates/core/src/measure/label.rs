//! At `β = 1` for `GL_2`, a rank-one matrix at p determines the coset
//! `g·U` of the upper triangular group in `GL_2(Z_p)`, where `m·g` has zero
//! first column. The coset only remembers the kernel line of `m`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{require_prime, valuation, RatMatrix, Rational};
use crate::padic::{is_p_integral, is_p_integral_matrix, is_p_unit};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetLabel {
    /// Kernel direction scaled to be primitive: `(1, c)` with `c ∈ Z_p`, or
    /// `(d, 1)` with `v_p(d) ≥ 1`.
    pub kernel: (Rational, Rational),
    /// `[[1,0],[c,1]]` or `[[d,1],[1,0]]`.
    pub representative: RatMatrix,
}

fn kernel_direction(m: &RatMatrix) -> (Rational, Rational) {
    let row = if m[(0, 0)].is_zero() && m[(0, 1)].is_zero() {
        1
    } else {
        0
    };
    (-m[(row, 1)].clone(), m[(row, 0)].clone())
}

pub fn extremal_label_beta1_gl2(
    m: &RatMatrix,
    primes: &[u64],
) -> Result<BTreeMap<u64, CosetLabel>> {
    if m.n() != 2 {
        return Err(Error::DimensionMismatch(
            "labels are defined for 2x2 matrices".into(),
        ));
    }
    if m.is_zero() || !m.det().is_zero() {
        return Err(Error::InvalidInput("matrix must have rank one".into()));
    }
    let (x, y) = kernel_direction(m);
    let mut out = BTreeMap::new();
    for &p in primes {
        require_prime(p)?;
        let x_dominates = !x.is_zero() && (y.is_zero() || valuation(&x, p)? <= valuation(&y, p)?);
        let label = if x_dominates {
            let c = &y / &x;
            CosetLabel {
                representative: RatMatrix::from_rows(vec![
                    vec![Rational::one(), Rational::zero()],
                    vec![c.clone(), Rational::one()],
                ])?,
                kernel: (Rational::one(), c),
            }
        } else {
            let d = &x / &y;
            CosetLabel {
                representative: RatMatrix::from_rows(vec![
                    vec![d.clone(), Rational::one()],
                    vec![Rational::one(), Rational::zero()],
                ])?,
                kernel: (d, Rational::one()),
            }
        };
        out.insert(p, label);
    }
    Ok(out)
}

/// `g_1·U = g_2·U` in `GL_2(Z_p)`: `g_1^{-1} g_2` is upper triangular and integral
/// with unit determinant.
pub fn same_coset_label(g1: &RatMatrix, g2: &RatMatrix, p: u64) -> Result<bool> {
    let h = &g1.inverse()? * g2;
    Ok(h[(1, 0)].is_zero()
        && is_p_integral_matrix(&h, p)
        && is_p_unit(&h.det(), p)
        && is_p_integral(&h[(0, 1)], p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rank1_normalize;

    fn rm(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn label_examples() {
        let l = extremal_label_beta1_gl2(&rm(&[&[0, 1], &[0, 1]]), &[2, 3]).unwrap();
        for lab in l.values() {
            assert_eq!(lab.representative, RatMatrix::identity(2));
        }
        let l = extremal_label_beta1_gl2(&rm(&[&[1, 0], &[1, 0]]), &[2, 3]).unwrap();
        for lab in l.values() {
            assert_eq!(lab.representative, rm(&[&[0, 1], &[1, 0]]));
        }
        assert!(extremal_label_beta1_gl2(&RatMatrix::identity(2), &[2]).is_err());
    }

    #[test]
    fn agrees_with_rank1_normalization() {
        for m in [
            rm(&[&[1, 2], &[3, 6]]),
            rm(&[&[2, 1], &[6, 3]]),
            rm(&[&[4, 1], &[4, 1]]),
            rm(&[&[1, 4], &[0, 0]]),
        ] {
            for p in [2, 3, 5] {
                let g = rank1_normalize(&m, p).unwrap();
                let lab = &extremal_label_beta1_gl2(&m, &[p]).unwrap()[&p];
                assert!(
                    same_coset_label(&lab.representative, &g, p).unwrap(),
                    "{m} at {p}"
                );
            }
        }
    }
}
