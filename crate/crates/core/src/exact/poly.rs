use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Univariate polynomial over the rationals, coefficients low degree first,
/// no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// `c x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// `1 - a x`
    pub fn one_minus(a: Rational) -> Self {
        Poly::new(vec![Rational::one(), -a])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    /// Lowest power of x with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(v)
    }

    /// Divide by `x^k`; the low coefficients must vanish.
    pub fn unshift(&self, k: usize) -> Self {
        debug_assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    /// Keep terms of degree `< k`.
    pub fn truncate(&self, k: usize) -> Self {
        Poly::new(self.coeffs.iter().take(k).cloned().collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let Some(dd) = d.degree() else {
            return Err(Error::InvalidInput("polynomial division by zero".into()));
        };
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&k| k >= dd) else {
            return Ok((Poly::zero(), self.clone()));
        };
        let mut q = vec![Rational::zero(); nd - dd + 1];
        for k in (dd..=nd).rev() {
            let c = &r[k] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, b) in d.coeffs.iter().enumerate() {
                r[k - dd + i] -= &c * b;
            }
            q[k - dd] = c;
        }
        Ok((Poly::new(q), Poly::new(r)))
    }

    /// Exact quotient; errors if the remainder is nonzero.
    pub fn exact_div(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Internal("inexact polynomial division".into()))
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let l = a.leading().recip();
            a.scale(&l)
        }
    }

    /// Synthetic division by `(x - r)`: quotient and remainder.
    pub fn synthetic_division(&self, r: &Rational) -> (Poly, Rational) {
        if self.is_zero() {
            return (Poly::zero(), Rational::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![Rational::zero(); n - 1];
        let mut carry = Rational::zero();
        for k in (0..n).rev() {
            let v = &self.coeffs[k] + &carry * r;
            if k == 0 {
                return (Poly::new(q), v);
            }
            q[k - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Compact rendering such as `-x^2+4x-3`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if neg {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let unit = a.is_one();
            if !unit || k == 0 {
                if a.denom().is_one() {
                    out.push_str(&a.numer().to_string());
                } else {
                    out.push_str(&format!("({}/{})", a.numer(), a.denom()));
                }
            }
            match k {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{k}")),
            }
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}
