//! Left `SL_n(Z)`-cosets of integer matrices: reduced (lower Hermite)
//! representatives of a given determinant, and the representatives of the
//! double coset of `T_l = diag(1,…,1,p,…,p)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{elementary_symmetric, pow_p, require_prime, IntMatrix, Rational};

/// Lower triangular, positive diagonal, `0 ≤ r_ij < r_jj` below the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedMatrix {
    pub inner: IntMatrix,
    pub diag: Vec<u64>,
}

/// Representative of a left coset in `SL_n(Z) T_l SL_n(Z)`: diagonal
/// `p^{k_i}` with `k_i ∈ {0,1}`, subdiagonal entries `a_ij < p^{k_j(1-k_i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TlRep {
    pub k: Vec<u8>,
    pub matrix: IntMatrix,
}

fn check_dims(n: usize, m: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::InvalidInput("determinant must be positive".into()));
    }
    Ok(())
}

fn prime_factors(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= m / p {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Divisors in increasing order.
fn divisors(m: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in prime_factors(m) {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for &d in &out {
            let mut x = d;
            for _ in 0..=e {
                next.push(x);
                x = x.saturating_mul(p);
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// Ordered factorizations `m = d_1 ⋯ d_n`, lexicographic.
fn factorizations(n: usize, m: u64) -> Vec<Vec<u64>> {
    if n == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for d in divisors(m) {
        for mut rest in factorizations(n - 1, m / d) {
            rest.insert(0, d);
            out.push(rest);
        }
    }
    out
}

fn lower_positions(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect()
}

/// Calls `f` on every vector `v` with `0 ≤ v[i] < bounds[i]`, lexicographically.
pub(crate) fn for_each_in_box(bounds: &[u64], mut f: impl FnMut(&[u64])) {
    if bounds.contains(&0) {
        return;
    }
    let mut v = vec![0u64; bounds.len()];
    loop {
        f(&v);
        let mut i = bounds.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < bounds[i] {
                break;
            }
            v[i] = 0;
        }
    }
}

fn lower_matrix(diag: &[u64], pos: &[(usize, usize)], vals: &[u64]) -> IntMatrix {
    let n = diag.len();
    let mut m = IntMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = BigInt::from(diag[i]);
    }
    for (&(i, j), &v) in pos.iter().zip(vals) {
        m[(i, j)] = BigInt::from(v);
    }
    m
}

/// One reduced representative per left `SL_n(Z)`-coset of determinant `m`.
pub fn enumerate_reduced(n: usize, m: u64) -> Result<Vec<ReducedMatrix>> {
    check_dims(n, m)?;
    let pos = lower_positions(n);
    let mut out = Vec::new();
    for diag in factorizations(n, m) {
        let bounds: Vec<u64> = pos.iter().map(|&(_, j)| diag[j]).collect();
        for_each_in_box(&bounds, |vals| {
            out.push(ReducedMatrix {
                inner: lower_matrix(&diag, &pos, vals),
                diag: diag.clone(),
            });
        });
    }
    Ok(out)
}

/// `Σ_{d_1⋯d_n = m} d_1^{n-1} d_2^{n-2} ⋯ d_{n-1}`.
pub fn reduced_count(n: usize, m: u64) -> Result<BigUint> {
    check_dims(n, m)?;
    Ok(factorizations(n, m)
        .iter()
        .map(|d| {
            d.iter()
                .enumerate()
                .map(|(j, &dj)| BigUint::from(dj).pow((n - 1 - j) as u32))
                .product::<BigUint>()
        })
        .sum())
}

fn check_level(n: usize, l: usize) -> Result<()> {
    if n == 0 || l == 0 || l > n {
        return Err(Error::OutOfRange(format!("l = {l} for n = {n}")));
    }
    Ok(())
}

/// Representatives of `SL_n(Z)\SL_n(Z) T_l SL_n(Z)`.
pub fn enumerate_tl_reps(n: usize, p: u64, l: usize) -> Result<Vec<TlRep>> {
    require_prime(p)?;
    check_level(n, l)?;
    let pos = lower_positions(n);
    let mut out = Vec::new();
    for_each_in_box(&vec![2; n], |k| {
        if k.iter().sum::<u64>() != l as u64 {
            return;
        }
        let diag: Vec<u64> = k.iter().map(|&e| if e == 1 { p } else { 1 }).collect();
        let bounds: Vec<u64> = pos
            .iter()
            .map(|&(i, j)| if k[j] == 1 && k[i] == 0 { p } else { 1 })
            .collect();
        for_each_in_box(&bounds, |vals| {
            out.push(TlRep {
                k: k.iter().map(|&e| e as u8).collect(),
                matrix: lower_matrix(&diag, &pos, vals),
            });
        });
    });
    Ok(out)
}

/// `n_l = E_l(p, p², …, pⁿ) / p^{l(l+1)/2}`.
pub fn coset_count(n: usize, p: u64, l: usize) -> Result<Rational> {
    require_prime(p)?;
    check_level(n, l)?;
    let powers: Vec<Rational> = (1..=n as i64).map(|i| pow_p(p, i)).collect();
    let c = elementary_symmetric(l, &powers)? / pow_p(p, (l * (l + 1) / 2) as i64);
    if !c.is_integer() || !c.is_positive() {
        return Err(Error::Internal(format!(
            "n_{l} = {c} is not a positive integer"
        )));
    }
    Ok(c)
}

/// Elementary divisors `s_1 | s_2 | ⋯` of an integer matrix (zeros last).
pub fn elementary_divisors(g: &IntMatrix) -> Vec<BigInt> {
    let n = g.n();
    let mut a = g.clone();
    for t in 0..n {
        loop {
            let pivot = (t..n)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[(i, j)].is_zero())
                .min_by(|&x, &y| a[x].abs().cmp(&a[y].abs()));
            let Some((pi, pj)) = pivot else {
                return a.diagonal().into_iter().map(|x| x.abs()).collect();
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            let d = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..n {
                let q = a[(i, t)].div_floor(&d);
                a.add_row_multiple(i, t, &-q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let q = a[(t, j)].div_floor(&d);
                a.add_col_multiple(j, t, &-q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into row t and retry.
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&d));
            match bad {
                Some((i, _)) => a.add_row_multiple(t, i, &BigInt::one()),
                None => break,
            }
        }
    }
    a.diagonal().into_iter().map(|x| x.abs()).collect()
}

/// Upper limit on reduced matrices scanned by [`hecke_index`].
pub const HECKE_INDEX_SCAN_LIMIT: u64 = 2_000_000;

/// `#(Γ\ΓgΓ)` for `Γ = SL_n(Z)`: the reduced matrices of determinant
/// `det g` sharing the elementary divisors of `g`.
pub fn hecke_index(g: &IntMatrix) -> Result<BigUint> {
    let det = g.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    if det.is_negative() {
        return Err(Error::InvalidInput("determinant must be positive".into()));
    }
    let m = det
        .to_u64()
        .ok_or_else(|| Error::OutOfRange(format!("determinant {det}")))?;
    let n = g.n();
    let total = reduced_count(n, m)?;
    if total > BigUint::from(HECKE_INDEX_SCAN_LIMIT) {
        return Err(Error::OutOfRange(format!(
            "{total} reduced matrices of determinant {m}"
        )));
    }
    let target = elementary_divisors(g);
    let hits = enumerate_reduced(n, m)?
        .iter()
        .filter(|r| elementary_divisors(&r.inner) == target)
        .count();
    Ok(BigUint::from(hits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn reduced_examples() {
        let r = enumerate_reduced(1, 5).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].inner, m(&[&[5]]));
        let r = enumerate_reduced(2, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].inner, IntMatrix::identity(2));
        let got: Vec<_> = enumerate_reduced(2, 2)
            .unwrap()
            .into_iter()
            .map(|r| r.inner)
            .collect();
        assert_eq!(
            got,
            vec![
                m(&[&[1, 0], &[0, 2]]),
                m(&[&[2, 0], &[0, 1]]),
                m(&[&[2, 0], &[1, 1]])
            ]
        );
        assert!(enumerate_reduced(2, 0).is_err());
        assert_eq!(reduced_count(2, 6).unwrap(), BigUint::from(12u32));
        assert_eq!(reduced_count(3, 2).unwrap(), BigUint::from(7u32));
        assert_eq!(reduced_count(2, 7).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn tl_examples() {
        let got: Vec<_> = enumerate_tl_reps(2, 2, 1)
            .unwrap()
            .into_iter()
            .map(|r| r.matrix)
            .collect();
        assert_eq!(
            got,
            vec![
                m(&[&[1, 0], &[0, 2]]),
                m(&[&[2, 0], &[0, 1]]),
                m(&[&[2, 0], &[1, 1]])
            ]
        );
        let top = enumerate_tl_reps(3, 5, 3).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].matrix, m(&[&[5, 0, 0], &[0, 5, 0], &[0, 0, 5]]));
        assert_eq!(enumerate_tl_reps(3, 2, 1).unwrap().len(), 7);
        assert!(enumerate_tl_reps(3, 2, 0).is_err());
        assert!(enumerate_tl_reps(3, 2, 4).is_err());
        assert!(enumerate_tl_reps(3, 4, 1).is_err());
    }

    #[test]
    fn coset_count_examples() {
        assert_eq!(coset_count(2, 7, 1).unwrap(), rat(8));
        assert_eq!(coset_count(3, 3, 1).unwrap(), rat(13));
        assert_eq!(coset_count(3, 2, 2).unwrap(), rat(7));
    }

    #[test]
    fn hecke_index_examples() {
        assert_eq!(
            hecke_index(&IntMatrix::identity(3)).unwrap(),
            BigUint::one()
        );
        assert_eq!(
            hecke_index(&m(&[&[1, 0], &[0, 5]])).unwrap(),
            BigUint::from(6u32)
        );
        assert_eq!(
            hecke_index(&m(&[&[3, 0], &[0, 3]])).unwrap(),
            BigUint::one()
        );
        assert_eq!(hecke_index(&m(&[&[2, 1], &[4, 2]])), Err(Error::Singular));
        assert!(hecke_index(&m(&[&[0, 1], &[1, 0]])).is_err());
    }

    #[test]
    fn elementary_divisor_examples() {
        let d = elementary_divisors(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let d = elementary_divisors(&m(&[&[2, 4], &[6, 12]]));
        assert_eq!(d, vec![BigInt::from(2), BigInt::zero()]);
    }
}
