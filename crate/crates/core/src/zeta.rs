//! Partition functions `ζ(Γ, S, β) = Σ_{Γ\S} det(g)^{-β}` for the semigroups
//! of p-local, J-local and all positive-determinant integer matrices.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::cosets::reduced_count;
use crate::error::{Error, Result};
use crate::exact::{
    is_integer, pow_p, rat, rational_to_f64, require_prime, riemann_zeta_partial, summation_error,
    Poly, RatFunc, Rational,
};

#[derive(Debug, Clone, PartialEq)]
pub enum ZetaValue {
    Exact(Rational),
    /// `|value - true value| ≤ error`.
    Numeric {
        value: f64,
        error: f64,
    },
    Divergent,
}

impl ZetaValue {
    pub fn approx(&self) -> Option<f64> {
        match self {
            ZetaValue::Exact(q) => Some(rational_to_f64(q)),
            ZetaValue::Numeric { value, .. } => Some(*value),
            ZetaValue::Divergent => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semigroup<'a> {
    /// Determinant a power of one prime.
    Local(u64),
    /// Determinant supported on a finite set of primes.
    MultiLocal(&'a [u64]),
    /// All of `Mat_n^+(Z)`.
    Positive,
}

fn beta_i64(beta: &Rational) -> Option<i64> {
    if is_integer(beta) {
        beta.to_integer().to_i64()
    } else {
        None
    }
}

/// `1/∏_{j<n}(1 - p^{j-β})`, finite only for `β > n - 1`.
pub fn zeta_local(n: usize, p: u64, beta: &Rational) -> Result<ZetaValue> {
    require_prime(p)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if *beta <= rat(n as i64 - 1) {
        return Ok(ZetaValue::Divergent);
    }
    if let Some(b) = beta_i64(beta) {
        let mut acc = Rational::one();
        for j in 0..n as i64 {
            acc *= (Rational::one() - pow_p(p, j - b)).recip();
        }
        return Ok(ZetaValue::Exact(acc));
    }
    let bf = rational_to_f64(beta);
    let lp = (p as f64).ln();
    let eps = f64::EPSILON;
    let mut value = 1.0;
    let mut rel = 0.0;
    for j in 0..n {
        let x = (p as f64).powf(j as f64 - bf);
        // powf, the rounding of β and the subtraction, amplified near x = 1.
        let rx = eps * (2.0 + lp * ((j as f64 - bf).abs() + bf.abs()));
        rel += x * rx / (1.0 - x) + 2.0 * eps;
        value /= 1.0 - x;
    }
    Ok(ZetaValue::Numeric {
        value,
        error: 2.0 * rel * value,
    })
}

/// `Σ_{k≤K} c_k p^{-βk}` with `c_k = reduced_count(n, p^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPartial {
    /// Set when `β` is an integer.
    pub exact: Option<Rational>,
    pub value: f64,
    pub rounding: f64,
    /// Bound on the omitted terms `k > K`.
    pub tail_bound: f64,
    pub terms: usize,
}

impl LocalPartial {
    pub fn enclosure(&self) -> (f64, f64) {
        (
            self.value - self.rounding,
            self.value + self.rounding + self.tail_bound,
        )
    }
}

fn prime_power(p: u64, k: usize) -> Result<u64> {
    p.checked_pow(k as u32)
        .ok_or_else(|| Error::OutOfRange(format!("{p}^{k}")))
}

pub fn zeta_local_partial(n: usize, p: u64, beta: &Rational, k_max: usize) -> Result<LocalPartial> {
    require_prime(p)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if *beta <= rat(n as i64 - 1) {
        return Err(Error::Divergent(format!("β = {beta} ≤ n - 1 = {}", n - 1)));
    }
    let counts: Vec<BigUint> = (0..=k_max)
        .map(|k| reduced_count(n, prime_power(p, k)?))
        .collect::<Result<_>>()?;
    let bf = rational_to_f64(beta);
    // c_k ≤ A p^{(n-1)k} with A = ∏_{i<n} (1 - p^{-i})^{-1}.
    let a: f64 = (1..n)
        .map(|i| 1.0 / (1.0 - (p as f64).powi(-(i as i32))))
        .product();
    let r = (p as f64).powf(n as f64 - 1.0 - bf);
    let tail_bound = a * r.powi(k_max as i32 + 1) / (1.0 - r) * (1.0 + 1e-12);
    if let Some(b) = beta_i64(beta) {
        let mut acc = Rational::zero();
        for (k, c) in counts.iter().enumerate() {
            acc += Rational::from_integer(c.clone().into()) * pow_p(p, -b * k as i64);
        }
        let value = rational_to_f64(&acc);
        return Ok(LocalPartial {
            exact: Some(acc),
            value,
            rounding: value * f64::EPSILON,
            tail_bound,
            terms: k_max,
        });
    }
    let mut value = 0.0;
    for (k, c) in counts.iter().enumerate() {
        value += c.to_f64().unwrap_or(f64::INFINITY) * (p as f64).powf(-bf * k as f64);
    }
    Ok(LocalPartial {
        exact: None,
        value,
        rounding: summation_error(k_max as u64 + 1, value) * (2.0 + bf * k_max as f64),
        tail_bound,
        terms: k_max,
    })
}

/// Product of the local factors over a finite set of distinct primes.
pub fn zeta_multi(n: usize, primes: &[u64], beta: &Rational) -> Result<ZetaValue> {
    if primes.is_empty() {
        return Err(Error::InvalidInput("empty prime set".into()));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != primes.len() {
        return Err(Error::InvalidInput("repeated prime".into()));
    }
    let mut exact = Some(Rational::one());
    let mut value = 1.0;
    let mut rel = 0.0;
    for &p in primes {
        match zeta_local(n, p, beta)? {
            ZetaValue::Divergent => return Ok(ZetaValue::Divergent),
            ZetaValue::Exact(q) => {
                value *= rational_to_f64(&q);
                exact = exact.map(|e| e * q);
            }
            ZetaValue::Numeric { value: v, error } => {
                value *= v;
                rel += error / v;
                exact = None;
            }
        }
    }
    Ok(match exact {
        Some(q) => ZetaValue::Exact(q),
        None => ZetaValue::Numeric {
            value,
            error: (rel + primes.len() as f64 * f64::EPSILON) * value * 1.01,
        },
    })
}

/// Two independent enclosures of `ζ(Γ, Mat_n^+(Z), β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalZeta {
    /// `∏_{j<n} ζ(β - j)` from truncated Riemann sums.
    pub euler_value: f64,
    pub euler_interval: (f64, f64),
    /// `Σ_{m≤M} reduced_count(n, m) m^{-β}`.
    pub brute_value: f64,
    pub brute_interval: (f64, f64),
    pub terms: u64,
}

impl GlobalZeta {
    pub fn intervals_overlap(&self) -> bool {
        self.euler_interval.0 <= self.brute_interval.1
            && self.brute_interval.0 <= self.euler_interval.1
    }
}

pub fn zeta_global(n: usize, beta: &Rational, terms: u64) -> Result<GlobalZeta> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if *beta <= rat(n as i64) {
        return Err(Error::Divergent(format!("β = {beta} ≤ n = {n}")));
    }
    if terms == 0 {
        return Err(Error::OutOfRange("terms = 0".into()));
    }
    let bf = rational_to_f64(beta);
    let (mut lo, mut hi, mut euler_value) = (1.0, 1.0, 1.0);
    for j in 0..n {
        let z = riemann_zeta_partial(bf - j as f64, terms)?;
        let (a, b) = z.enclosure();
        lo *= a;
        hi *= b;
        euler_value *= z.value;
    }
    let slack = 1.0 + 4.0 * n as f64 * f64::EPSILON;
    let euler_interval = (lo / slack, hi * slack);

    let mut sum = 0.0;
    for m in 1..=terms {
        let c = reduced_count(n, m)?.to_f64().unwrap_or(f64::INFINITY);
        sum += c * (m as f64).powf(-bf);
    }
    let rounding = summation_error(terms, sum) * (2.0 + bf);
    // reduced_count(n, m) ≤ A m^{n-1} (1 + ln m) with A = ζ(2)^{n-2}; the
    // tail is bounded by the integral of that envelope times m^{-β}.
    let a = 1.65f64.powi(n.saturating_sub(2) as i32);
    let s = bf - n as f64 + 1.0;
    let mf = terms as f64;
    let tail = a * mf.powf(1.0 - s) * ((1.0 + mf.ln()) / (s - 1.0) + 1.0 / (s - 1.0).powi(2));
    let brute_interval = (sum - rounding, sum + rounding + tail * (1.0 + 1e-12));
    Ok(GlobalZeta {
        euler_value,
        euler_interval,
        brute_value: sum,
        brute_interval,
        terms,
    })
}

pub fn summable(n: usize, beta: &Rational, s: Semigroup<'_>) -> bool {
    match s {
        Semigroup::Local(_) | Semigroup::MultiLocal(_) => *beta > rat(n as i64 - 1),
        Semigroup::Positive => *beta > rat(n as i64),
    }
}

/// `1/∏_{j<n}(1 - p^j t)` with `t = p^{-β}`.
pub fn zeta_local_formal(n: usize, p: u64) -> Result<RatFunc> {
    require_prime(p)?;
    let mut den = Poly::one();
    for j in 0..n as i64 {
        den = &den * &Poly::one_minus(pow_p(p, j));
    }
    RatFunc::new(Poly::one(), den)
}

/// `Σ_{k<order} reduced_count(n, p^k) t^k`.
pub fn local_count_series(n: usize, p: u64, order: usize) -> Result<Poly> {
    require_prime(p)?;
    let coeffs = (0..order)
        .map(|k| {
            Ok(Rational::from_integer(
                reduced_count(n, prime_power(p, k)?)?.into(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn local_examples() {
        assert_eq!(
            zeta_local(2, 2, &rat(3)).unwrap(),
            ZetaValue::Exact(ratio(32, 21))
        );
        assert_eq!(
            zeta_local(1, 5, &rat(2)).unwrap(),
            ZetaValue::Exact(ratio(25, 24))
        );
        assert_eq!(zeta_local(3, 2, &rat(2)).unwrap(), ZetaValue::Divergent);
        match zeta_local(1, 2, &ratio(1, 2)).unwrap() {
            ZetaValue::Numeric { value, error } => {
                let want = 1.0 / (1.0 - 2f64.powf(-0.5));
                assert!((value - want).abs() <= error && error < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partial_examples() {
        let z = zeta_local_partial(2, 2, &rat(3), 0).unwrap();
        assert_eq!(z.exact, Some(rat(1)));
        let z = zeta_local_partial(2, 2, &rat(3), 1).unwrap();
        assert_eq!(z.exact, Some(ratio(11, 8)));
        let z = zeta_local_partial(2, 2, &rat(3), 12).unwrap();
        assert!((z.value - 32.0 / 21.0).abs() < 1e-6);
        assert!(zeta_local_partial(2, 2, &rat(1), 5).is_err());
    }

    #[test]
    fn multi_examples() {
        let want = ratio(32, 21) * ratio(27 * 81, (27 - 3) * (81 - 3));
        assert_eq!(
            zeta_multi(2, &[2, 3], &rat(3)).unwrap(),
            ZetaValue::Exact(want)
        );
        assert_eq!(
            zeta_multi(2, &[2, 3], &rat(1)).unwrap(),
            ZetaValue::Divergent
        );
        assert_eq!(
            zeta_multi(2, &[5], &rat(4)).unwrap(),
            zeta_local(2, 5, &rat(4)).unwrap()
        );
        assert!(zeta_multi(2, &[], &rat(4)).is_err());
    }

    #[test]
    fn global_examples() {
        let g = zeta_global(1, &rat(2), 20_000).unwrap();
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(g.euler_interval.0 <= z2 && z2 <= g.euler_interval.1);
        assert!(g.intervals_overlap());
        assert!(zeta_global(2, &rat(2), 10).is_err());
    }

    #[test]
    fn summable_examples() {
        assert!(summable(3, &ratio(5, 2), Semigroup::Local(2)));
        assert!(!summable(3, &rat(3), Semigroup::Positive));
        assert!(!summable(2, &rat(1), Semigroup::Local(2)));
    }
}
