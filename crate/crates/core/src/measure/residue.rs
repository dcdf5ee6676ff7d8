//! Arithmetic in `Z/p^N` on `i128`, enough for normal forms of residue matrices.

use crate::error::{Error, Result};
use crate::exact::Rational;
use num_traits::ToPrimitive;

/// Largest modulus accepted, so that products of residues fit in `i128`.
pub const MAX_MODULUS: i128 = 1 << 60;

pub fn modulus(p: u64, level: u32) -> Result<i128> {
    (p as i128)
        .checked_pow(level)
        .filter(|&q| q <= MAX_MODULUS)
        .ok_or_else(|| Error::OutOfRange(format!("modulus {p}^{level}")))
}

pub fn reduce(x: i128, q: i128) -> i128 {
    x.rem_euclid(q)
}

/// Valuation of a residue mod `p^level`, capped at `level` (zero gives `level`).
pub fn val_capped(x: i128, p: u64, level: u32) -> u32 {
    let p = p as i128;
    let mut x = x;
    let mut v = 0;
    while v < level && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

pub fn inv_mod(a: i128, q: i128) -> Result<i128> {
    let (mut r0, mut r1) = (reduce(a, q), q);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    if r0 != 1 {
        return Err(Error::InvalidInput(format!(
            "{a} is not invertible mod {q}"
        )));
    }
    Ok(reduce(s0, q))
}

/// Image of a p-integral rational in `Z/q`.
pub fn rational_mod(x: &Rational, q: i128) -> Result<i128> {
    let big = |b: &num_bigint::BigInt| -> i128 {
        let r = b % num_bigint::BigInt::from(q);
        r.to_i128().expect("residue fits")
    };
    let num = big(x.numer());
    let den = big(x.denom());
    Ok(reduce(num * inv_mod(den, q)?, q))
}

/// Square residue matrix over `Z/p^level`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResMat {
    pub n: usize,
    pub p: u64,
    pub level: u32,
    pub q: i128,
    pub a: Vec<i128>,
}

impl ResMat {
    pub fn new(n: usize, p: u64, level: u32, entries: Vec<i128>) -> Result<Self> {
        let q = modulus(p, level)?;
        Ok(ResMat {
            n,
            p,
            level,
            q,
            a: entries.into_iter().map(|x| reduce(x, q)).collect(),
        })
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.a[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    /// Elementary divisor exponents (capped at `level`, ascending) and a
    /// unimodular `C` with `B·A·C = diag(p^{e_i})` for some unimodular `B`.
    pub fn normal_form(&self) -> (Vec<u32>, Vec<i128>) {
        let (n, q, p, lv) = (self.n, self.q, self.p, self.level);
        let mut a = self.a.clone();
        let mut c: Vec<i128> = (0..n * n).map(|k| i128::from(k / n == k % n)).collect();
        let mut e = Vec::with_capacity(n);
        for t in 0..n {
            let mut best = (lv, t, t);
            for i in t..n {
                for j in t..n {
                    let v = val_capped(a[i * n + j], p, lv);
                    if v < best.0 {
                        best = (v, i, j);
                    }
                }
            }
            let (v, pi, pj) = best;
            if v == lv {
                e.extend(std::iter::repeat_n(lv, n - t));
                break;
            }
            for j in 0..n {
                a.swap(t * n + j, pi * n + j);
            }
            for i in 0..n {
                a.swap(i * n + t, i * n + pj);
                c.swap(i * n + t, i * n + pj);
            }
            let pv = (p as i128).pow(v);
            let unit = a[t * n + t] / pv;
            let inv = inv_mod(unit, q).expect("pivot quotient is a unit");
            for i in 0..n {
                a[i * n + t] = reduce(a[i * n + t] * inv, q);
                c[i * n + t] = reduce(c[i * n + t] * inv, q);
            }
            for i in t + 1..n {
                let f = a[i * n + t] / pv;
                if f != 0 {
                    for j in 0..n {
                        a[i * n + j] = reduce(a[i * n + j] - f * a[t * n + j], q);
                    }
                }
            }
            for j in t + 1..n {
                let f = a[t * n + j] / pv;
                if f != 0 {
                    for i in 0..n {
                        a[i * n + j] = reduce(a[i * n + j] - f * a[i * n + t], q);
                        c[i * n + j] = reduce(c[i * n + j] - f * c[i * n + t], q);
                    }
                }
            }
            e.push(v);
        }
        (e, c)
    }
}

/// Whether `row` lies in the row span of a matrix with normal form `(e, c)`.
pub fn in_row_span(row: &[i128], e: &[u32], c: &[i128], p: u64, q: i128) -> bool {
    let n = row.len();
    (0..n).all(|j| {
        let mut s = 0i128;
        for k in 0..n {
            s = reduce(s + row[k] * c[k * n + j], q);
        }
        s % (p as i128).pow(e[j]) == 0
    })
}
