//! Exact scalars, matrices and polynomials, plus the handful of numeric
//! primitives (valuations, elementary symmetric functions, truncated zeta
//! sums) the rest of the crate is built on.

mod matrix;
mod poly;
mod ratfunc;

pub use matrix::{IntMatrix, Matrix, RatMatrix};
pub use poly::Poly;
pub use ratfunc::RatFunc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Always `num/den`, including integers (`3/1`), so downstream parsers see one shape.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `a`, `a/b` and finite decimals such as `-0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int {
            "" | "-" | "+" => BigInt::zero(),
            _ => int.parse().map_err(|_| bad())?,
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let mut num = int_part.abs() * &scale + frac_part;
        if negative {
            num = -num;
        }
        return Ok(Rational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{p} is not prime")))
    }
}

pub fn valuation_int(a: &BigInt, p: u64) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let p = BigInt::from(p);
    let mut a = a.clone();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&p);
        if !r.is_zero() {
            return Ok(v);
        }
        a = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(q: &Rational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    Ok(valuation_int(q.numer(), p)? - valuation_int(q.denom(), p)?)
}

/// Valuation with `None` standing for +∞.
pub fn valuation_or_inf(q: &Rational, p: u64) -> Option<i64> {
    valuation(q, p).ok()
}

/// `p^e` for any integer `e`.
pub fn pow_p(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// `E_l(values)`, computed by the usual one-pass recurrence on `∏(1 + x_i T)`.
pub fn elementary_symmetric(l: usize, values: &[Rational]) -> Result<Rational> {
    if l > values.len() {
        return Err(Error::OutOfRange(format!(
            "index {l} for {} values",
            values.len()
        )));
    }
    let mut e = vec![Rational::zero(); l + 1];
    e[0] = Rational::one();
    for x in values {
        for k in (1..=l).rev() {
            let add = &e[k - 1] * x;
            e[k] += add;
        }
    }
    Ok(e.swap_remove(l))
}

/// A truncation of `ζ(s)` with an integral-test tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaPartial {
    pub value: f64,
    pub tail_bound: f64,
    /// Bound on accumulated floating-point error in `value`.
    pub rounding_bound: f64,
    pub terms_used: u64,
}

impl ZetaPartial {
    /// Interval guaranteed to contain `ζ(s)`.
    pub fn enclosure(&self) -> (f64, f64) {
        (
            self.value - self.rounding_bound,
            self.value + self.rounding_bound + self.tail_bound,
        )
    }
}

pub fn riemann_zeta_partial(s: f64, terms: u64) -> Result<ZetaPartial> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Divergent(format!("zeta({s}) needs s > 1")));
    }
    if terms == 0 {
        return Err(Error::OutOfRange("terms = 0".into()));
    }
    // Forward summation keeps the partial sums monotone in `terms`.
    let mut value = 0.0f64;
    for m in 1..=terms {
        value += (m as f64).powf(-s);
    }
    let tail_bound = (terms as f64).powf(1.0 - s) / (s - 1.0) * (1.0 + 4.0 * f64::EPSILON);
    Ok(ZetaPartial {
        value,
        tail_bound,
        rounding_bound: summation_error(terms, value),
        terms_used: terms,
    })
}

/// Worst-case error of a length-`n` recursive sum of positive terms, each
/// term itself carrying a couple of ulps from `powf`.
pub(crate) fn summation_error(n: u64, sum: f64) -> f64 {
    let u = f64::EPSILON / 2.0;
    let k = (n as f64) + 4.0;
    let gamma = k * u / (1.0 - k * u);
    2.0 * gamma * sum.abs()
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
