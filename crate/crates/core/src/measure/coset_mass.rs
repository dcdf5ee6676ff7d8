//! Cylinder masses by summing over left cosets `GL_n(Z_p)·h`, `h` reduced.
//!
//! On the coset of `h` the measure is `t^{v_p(det h)}` times the image of
//! normalized Haar measure on `GL_n(Z_p)` (scaled by its mass `haar(t)`), so
//! the mass of a level-`N` class is the fraction of `u ∈ GL_n(Z/p^N)` with
//! `u·h ≡ R`. Reduced matrices with a diagonal exponent `≥ N` look alike
//! modulo `p^N`; summing their weights gives `t^N / (1 - p^{n-1-j} t)` for
//! column `j`.

use std::collections::HashMap;

use num_bigint::BigUint;

use super::residue::{in_row_span, modulus, ResMat};
use super::{gl_order, haar_mass_gl, LocalCylinder};
use crate::cosets::for_each_in_box;
use crate::error::{Error, Result};
use crate::exact::{pow_p, require_prime, Poly, RatFunc, Rational};

fn gl_order_fp(d: usize, p: u64) -> BigUint {
    gl_order(d, p, 1)
}

/// `|{u ∈ GL_n(Z/p^N) : u·h ≡ r}| / |GL_n(Z/p^N)|`.
///
/// Nonzero exactly when `h` and `r` have the same row span; the count is
/// then the stabilizer of `h`, which depends only on its elementary divisors.
pub fn coset_stabilizer_fraction(
    n: usize,
    p: u64,
    level: u32,
    h: &[i128],
    r: &[i128],
) -> Result<Rational> {
    if level == 0 {
        return Ok(Rational::from_integer(1.into()));
    }
    let hm = ResMat::new(n, p, level, h.to_vec())?;
    let rm = ResMat::new(n, p, level, r.to_vec())?;
    let (er, _) = rm.normal_form();
    Ok(StabCache::new(n, p, level)?.fraction(&hm, &rm, &er))
}

struct StabCache {
    n: usize,
    p: u64,
    level: u32,
    q: i128,
    group: BigUint,
    by_divisors: HashMap<Vec<u32>, Rational>,
}

impl StabCache {
    fn new(n: usize, p: u64, level: u32) -> Result<Self> {
        Ok(StabCache {
            n,
            p,
            level,
            q: modulus(p, level)?,
            group: gl_order(n, p, level),
            by_divisors: HashMap::new(),
        })
    }

    fn stabilizer(&self, e: &[u32]) -> BigUint {
        let (n, p) = (self.n, BigUint::from(self.p));
        let d = e.iter().filter(|&&x| x == self.level).count();
        let ker: u32 = e.iter().sum();
        // u = 1 + X, rows of X in the left kernel of h; invertible iff the
        // block acting on the d killed coordinates is invertible mod p.
        p.pow(n as u32 * (ker - d as u32)) * p.pow(((n - d) * d) as u32) * gl_order_fp(d, self.p)
    }

    fn fraction(&mut self, h: &ResMat, r: &ResMat, er: &[u32]) -> Rational {
        let (eh, ch) = h.normal_form();
        if eh != er {
            return Rational::from_integer(0.into());
        }
        if !(0..self.n).all(|i| in_row_span(r.row(i), &eh, &ch, self.p, self.q)) {
            return Rational::from_integer(0.into());
        }
        if let Some(v) = self.by_divisors.get(&eh) {
            return v.clone();
        }
        let v = Rational::new(self.stabilizer(&eh).into(), self.group.clone().into());
        self.by_divisors.insert(eh, v.clone());
        v
    }
}

/// `t^N / (1 - p^{n-1-j} t)` for a lumped column, `t^κ` otherwise.
fn column_weight(n: usize, p: u64, j: usize, kappa: u32, level: u32) -> RatFunc {
    let tk = RatFunc::t_pow(kappa as i64);
    if kappa < level {
        return tk;
    }
    let den = Poly::one_minus(pow_p(p, (n - 1 - j) as i64));
    &tk * &RatFunc::new(Poly::one(), den).expect("nonzero denominator")
}

/// `μ_p(C)` as a rational function of `t = p^{-β}`.
pub fn local_mass(n: usize, p: u64, c: &LocalCylinder) -> Result<RatFunc> {
    require_prime(p)?;
    if c.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} residue for n = {n}",
            c.n(),
            c.n()
        )));
    }
    let level = c.level;
    let pos: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let r = ResMat::new(n, p, level, c.flat())?;
    let (er, _) = r.normal_form();
    let mut cache = StabCache::new(n, p, level)?;
    let mut total = RatFunc::zero();
    let mut kappa_err = None;
    for_each_in_box(&vec![level as u64 + 1; n], |kappa| {
        let kappa: Vec<u32> = kappa.iter().map(|&k| k as u32).collect();
        let count = if level == 0 {
            Rational::from_integer(1.into())
        } else {
            let bounds: Vec<u64> = pos
                .iter()
                .map(|&(_, j)| p.pow(kappa[j].min(level)))
                .collect();
            let mut acc = Rational::from_integer(0.into());
            let mut h = vec![0i128; n * n];
            for (j, &k) in kappa.iter().enumerate() {
                h[j * n + j] = if k < level { (p as i128).pow(k) } else { 0 };
            }
            for_each_in_box(&bounds, |vals| {
                for (&(i, j), &v) in pos.iter().zip(vals) {
                    h[i * n + j] = v as i128;
                }
                match ResMat::new(n, p, level, h.clone()) {
                    Ok(hm) => acc += cache.fraction(&hm, &r, &er),
                    Err(e) => kappa_err = Some(e),
                }
            });
            acc
        };
        if count != Rational::from_integer(0.into()) {
            let mut w = RatFunc::constant(count);
            for (j, &k) in kappa.iter().enumerate() {
                w = &w * &column_weight(n, p, j, k, level);
            }
            total = &total + &w;
        }
    });
    if let Some(e) = kappa_err {
        return Err(e);
    }
    let haar = RatFunc::from_poly(haar_mass_gl(n, p)?);
    Ok(&(&haar * &total) * &RatFunc::t_pow(-(n as i64) * c.scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn all_matrices(n: usize, q: i128) -> Vec<Vec<i128>> {
        let mut out = Vec::new();
        for_each_in_box(&vec![q as u64; n * n], |v| {
            out.push(v.iter().map(|&x| x as i128).collect())
        });
        out
    }

    fn det2(m: &[i128]) -> i128 {
        m[0] * m[3] - m[1] * m[2]
    }

    /// Brute-force `#{u : u h ≡ r}` over `GL_2(Z/q)`.
    #[test]
    fn stabilizer_fraction_matches_group_enumeration() {
        for (p, level) in [(2u64, 1u32), (2, 2), (3, 1)] {
            let q = (p as i128).pow(level);
            let all = all_matrices(2, q);
            let gl: Vec<_> = all
                .iter()
                .filter(|m| det2(m) % p as i128 != 0)
                .cloned()
                .collect();
            assert_eq!(BigUint::from(gl.len()), gl_order(2, p, level));
            for h in all.iter().step_by(3) {
                for r in all.iter().step_by(5) {
                    let hits = gl
                        .iter()
                        .filter(|u| {
                            (0..2).all(|i| {
                                (0..2).all(|j| {
                                    (u[2 * i] * h[j] + u[2 * i + 1] * h[2 + j] - r[2 * i + j])
                                        .rem_euclid(q)
                                        == 0
                                })
                            })
                        })
                        .count();
                    let want = Rational::new((hits as i64).into(), (gl.len() as i64).into());
                    assert_eq!(coset_stabilizer_fraction(2, p, level, h, r).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn invertible_class_is_haar_over_group_order() {
        let c = LocalCylinder::new(3, 0, 1, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let m = local_mass(2, 3, &c).unwrap();
        let want =
            &RatFunc::from_poly(haar_mass_gl(2, 3).unwrap()) * &RatFunc::constant(ratio(1, 48));
        assert_eq!(m, want);
    }

    #[test]
    fn full_space_has_unit_mass() {
        for (n, p) in [(2, 2), (3, 2), (2, 5)] {
            assert_eq!(
                local_mass(n, p, &LocalCylinder::full(n)).unwrap(),
                RatFunc::one()
            );
        }
    }
}
