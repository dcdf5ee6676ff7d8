#![allow(dead_code)]

use kms_core::exact::{rat, Rational};
use kms_core::{IntMatrix, RatMatrix};
use num_bigint::BigInt;
use rand::Rng;

pub fn sigma1(m: u64) -> u64 {
    (1..=m).filter(|d| m.is_multiple_of(*d)).sum()
}

/// `E_l` by explicit subset enumeration.
pub fn esym_by_subsets(l: usize, xs: &[Rational]) -> Rational {
    let n = xs.len();
    let mut total = rat(0);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == l {
            let mut prod = rat(1);
            for (i, x) in xs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    prod *= x;
                }
            }
            total += prod;
        }
    }
    total
}

/// Coefficients of `∏ (x - r_i)`, low degree first.
pub fn poly_from_roots(roots: &[Rational]) -> Vec<Rational> {
    let mut c = vec![rat(1)];
    for r in roots {
        let mut next = vec![rat(0); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    c
}

/// Random `SL_n(Z)` element as a product of elementary matrices.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = BigInt::from(rng.gen_range(-2i64..=2));
        m.add_row_multiple(i, j, &c);
    }
    m
}

/// Random element of `SL_n(Z_(p))` with p-integral rational entries.
pub fn random_p_integral_sl<R: Rng>(rng: &mut R, n: usize, p: u64) -> RatMatrix {
    let mut m = RatMatrix::identity(n);
    for _ in 0..2 * n + 2 {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let mut den = rng.gen_range(1i64..=7);
        while den % p as i64 == 0 {
            den += 1;
        }
        let c = Rational::new(rng.gen_range(-9i64..=9).into(), den.into());
        m.add_row_multiple(i, j, &c);
    }
    if rng.gen_bool(0.5) && n >= 2 {
        m.swap_rows(0, 1);
        m.scale_row(0, &rat(-1));
    }
    m
}

/// Random `GL_n(Z_(p))` element: p-integral `SL` times a diagonal of units.
pub fn random_p_integral_gl<R: Rng>(rng: &mut R, n: usize, p: u64) -> RatMatrix {
    let s = random_p_integral_sl(rng, n, p);
    let units: Vec<Rational> = (0..n)
        .map(|_| {
            let mut a = rng.gen_range(1i64..=12);
            while a % p as i64 == 0 {
                a += 1;
            }
            let mut b = rng.gen_range(1i64..=5);
            while b % p as i64 == 0 {
                b += 1;
            }
            Rational::new(a.into(), b.into())
        })
        .collect();
    &s * &RatMatrix::diag(&units)
}

/// Random rational matrix of rank `r`, entries with numerators/denominators ≤ 50.
pub fn random_rational_of_rank<R: Rng>(rng: &mut R, n: usize, r: usize) -> RatMatrix {
    let entry = |rng: &mut R| {
        Rational::new(
            rng.gen_range(-50i64..=50).into(),
            rng.gen_range(1i64..=50).into(),
        )
    };
    let mut rows: Vec<Vec<Rational>> = (0..r)
        .map(|_| (0..n).map(|_| entry(rng)).collect())
        .collect();
    for _ in r..n {
        let mut row = vec![rat(0); n];
        for base in rows.iter().take(r) {
            let c = Rational::new(
                rng.gen_range(-3i64..=3).into(),
                rng.gen_range(1i64..=4).into(),
            );
            for (x, b) in row.iter_mut().zip(base) {
                *x += &c * b;
            }
        }
        rows.push(row);
    }
    let perm = {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            idx.swap(i, rng.gen_range(0..=i));
        }
        idx
    };
    let rows = perm.into_iter().map(|i| rows[i].clone()).collect();
    RatMatrix::from_rows(rows).unwrap()
}
