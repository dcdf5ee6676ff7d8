use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use super::{Poly, Rational};
use crate::error::{Error, Result};

/// `t^shift · num / den` in lowest terms, with `num(0) ≠ 0` (or `num = 0`)
/// and `den(0) = 1`. Normalization makes structural equality exact equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Self::normalize(0, num, den))
    }

    fn normalize(shift: i64, num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let a = num.order().unwrap_or(0);
        let b = den.order().unwrap_or(0);
        let (num, den) = (num.unshift(a), den.unshift(b));
        let g = num.gcd(&den);
        let (num, den) = if g.degree() > Some(0) {
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        } else {
            (num, den)
        };
        let c = den.coeff(0).recip();
        RatFunc {
            shift: shift + a as i64 - b as i64,
            num: num.scale(&c),
            den: den.scale(&c),
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            shift: 0,
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::normalize(0, Poly::constant(c), Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::normalize(0, p, Poly::one())
    }

    /// `t^k`
    pub fn t_pow(k: i64) -> Self {
        RatFunc {
            shift: k,
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `Some` when this is a polynomial in `t`.
    pub fn as_poly(&self) -> Option<Poly> {
        (self.shift >= 0 && self.den == Poly::one()).then(|| self.num.shift(self.shift as usize))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("reciprocal of zero".into()));
        }
        Ok(Self::normalize(
            -self.shift,
            self.den.clone(),
            self.num.clone(),
        ))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut out = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("pole at t = {t}")));
        }
        if t.is_zero() && self.shift < 0 {
            return Err(Error::InvalidInput("pole at t = 0".into()));
        }
        let tp = if self.shift >= 0 {
            num_traits::pow(t.clone(), self.shift as usize)
        } else {
            num_traits::pow(t.recip(), (-self.shift) as usize)
        };
        Ok(self.num.eval(t) / d * tp)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let ev = |p: &Poly| {
            p.coeffs()
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * t + super::rational_to_f64(c))
        };
        ev(&self.num) / ev(&self.den) * t.powi(self.shift as i32)
    }

    /// Power series in `t` through degree `order - 1`; requires no pole at 0.
    pub fn series(&self, order: usize) -> Result<Poly> {
        if self.shift < 0 {
            return Err(Error::InvalidInput("Laurent tail at t = 0".into()));
        }
        let s = self.shift as usize;
        if s >= order {
            return Ok(Poly::zero());
        }
        let len = order - s;
        // den(0) = 1, so q_k = num_k - Σ_{i≥1} den_i q_{k-i}.
        let mut q: Vec<Rational> = Vec::with_capacity(len);
        for k in 0..len {
            let mut v = self.num.coeff(k);
            for i in 1..=k {
                v -= self.den.coeff(i) * &q[k - i];
            }
            q.push(v);
        }
        Ok(Poly::new(q).shift(s))
    }

    pub fn render(&self, var: &str) -> String {
        let mono = match self.shift {
            0 => String::new(),
            1 => var.to_string(),
            k => format!("{var}^{k}"),
        };
        let num = self.num.render(var);
        let head = match (mono.is_empty(), self.num == Poly::one()) {
            (true, _) => num,
            (false, true) => mono,
            (false, false) => format!("{mono}*({num})"),
        };
        if self.den == Poly::one() {
            head
        } else {
            format!("({head})/({})", self.den.render(var))
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(rhs.shift);
        let a = &self.num.shift((self.shift - m) as usize) * &rhs.den;
        let b = &rhs.num.shift((rhs.shift - m) as usize) * &self.den;
        RatFunc::normalize(m, &a + &b, &self.den * &rhs.den)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        let neg = RatFunc {
            shift: rhs.shift,
            num: -&rhs.num,
            den: rhs.den.clone(),
        };
        self + &neg
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::normalize(
            self.shift + rhs.shift,
            &self.num * &rhs.num,
            &self.den * &rhs.den,
        )
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("t"))
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}
