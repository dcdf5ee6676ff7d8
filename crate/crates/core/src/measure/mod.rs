//! Measures on `Mat_n(Q_p)` satisfying `μ(gB) = det(g)^{-β} μ(B)`, computed
//! as exact rational functions of the formal variable `t_p = p^{-β}`.
//!
//! On `Mat_n(Z_p)` the measure has density `c·|det y|_p^{β-n}` against
//! additive Haar measure, with `c` fixed by total mass one. Cylinder masses
//! are computed two ways: by summing over the left cosets `GL_n(Z_p)·h`
//! (reduced `h`) that meet the cylinder, and in closed form from the
//! density (see [`graded`]).

mod coset_mass;
pub mod graded;
mod label;
pub mod residue;
mod scaling;
mod singular;

pub use coset_mass::{coset_stabilizer_fraction, local_mass};
pub use label::{extremal_label_beta1_gl2, same_coset_label, CosetLabel};
pub use scaling::{image_cylinders, scaling_check, PrimeScaling, ScalingReport};
pub use singular::{singular_mass, singular_scaling_check, SingularSupport};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::{pow_p, rational_to_f64, require_prime, Poly, RatFunc, Rational};
use crate::zeta::{local_count_series, zeta_local_partial};
use residue::modulus;

/// `p^{-a}·(R + p^N Mat_n(Z_p))`. Level 0 is the whole of `p^{-a} Mat_n(Z_p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalCylinder {
    pub scale: i64,
    pub level: u32,
    /// `n×n`, entries in `[0, p^N)`.
    pub residue: Vec<Vec<i128>>,
}

impl LocalCylinder {
    pub fn new(p: u64, scale: i64, level: u32, residue: Vec<Vec<i128>>) -> Result<Self> {
        require_prime(p)?;
        let n = residue.len();
        if n == 0 || residue.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(
                "residue must be a square matrix".into(),
            ));
        }
        let q = modulus(p, level)?;
        let residue = residue
            .into_iter()
            .map(|r| r.into_iter().map(|x| residue::reduce(x, q)).collect())
            .collect();
        Ok(LocalCylinder {
            scale,
            level,
            residue,
        })
    }

    pub fn full(n: usize) -> Self {
        LocalCylinder {
            scale: 0,
            level: 0,
            residue: vec![vec![0; n]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.residue.len()
    }

    pub fn flat(&self) -> Vec<i128> {
        self.residue.iter().flatten().copied().collect()
    }
}

/// Finite-prime cylinder; primes not listed carry `Mat_n(Z_p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderSet {
    pub n: usize,
    pub parts: BTreeMap<u64, LocalCylinder>,
}

impl CylinderSet {
    pub fn new(n: usize) -> Self {
        CylinderSet {
            n,
            parts: BTreeMap::new(),
        }
    }

    pub fn single(p: u64, c: LocalCylinder) -> Self {
        let mut s = CylinderSet::new(c.n());
        s.parts.insert(p, c);
        s
    }

    pub fn with(mut self, p: u64, c: LocalCylinder) -> Result<Self> {
        if c.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} residue in a cylinder over Mat_{}",
                c.n(),
                c.n(),
                self.n
            )));
        }
        self.parts.insert(p, c);
        Ok(self)
    }

    pub fn part(&self, p: u64) -> LocalCylinder {
        self.parts
            .get(&p)
            .cloned()
            .unwrap_or_else(|| LocalCylinder::full(self.n))
    }
}

/// Product of per-prime factors, each a rational function of its own `t_p`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MassExpr {
    pub factors: BTreeMap<u64, RatFunc>,
}

impl MassExpr {
    /// Value at `β`, exact when every `t_p = p^{-β}` is rational.
    pub fn eval_integer_beta(&self, beta: i64) -> Result<Rational> {
        let mut acc = Rational::one();
        for (&p, f) in &self.factors {
            acc *= f.eval(&pow_p(p, -beta))?;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, beta: f64) -> f64 {
        self.factors
            .iter()
            .map(|(&p, f)| f.eval_f64((p as f64).powf(-beta)))
            .product()
    }
}

/// `|GL_n(Z/p^N)| = p^{n²(N-1)} ∏_{j<n} (pⁿ - p^j)`.
pub fn gl_order(n: usize, p: u64, level: u32) -> BigUint {
    if level == 0 {
        return BigUint::one();
    }
    let p = BigUint::from(p);
    let pn = p.pow(n as u32);
    let mut o = p.pow((n * n) as u32 * (level - 1));
    for j in 0..n as u32 {
        o *= &pn - p.pow(j);
    }
    o
}

/// `∏_{j<n} (1 - p^j t)`: the mass of `GL_n(Z_p)`.
pub fn haar_mass_gl(n: usize, p: u64) -> Result<Poly> {
    require_prime(p)?;
    let mut h = Poly::one();
    for j in 0..n as i64 {
        h = &h * &Poly::one_minus(pow_p(p, j));
    }
    Ok(h)
}

/// Mass of a finite-prime cylinder: one coset-sum factor per listed prime.
pub fn mass(c: &CylinderSet) -> Result<MassExpr> {
    let mut out = MassExpr::default();
    for (&p, part) in &c.parts {
        if part.n() != c.n {
            return Err(Error::DimensionMismatch(
                "cylinder parts disagree on n".into(),
            ));
        }
        out.factors.insert(p, local_mass(c.n, p, part)?);
    }
    Ok(out)
}

/// `haar · Σ_{k<order} reduced_count(n, p^k) t^k`, which should be
/// `1 + O(t^order)` when the coset series accounts for all of `Mat_n(Z_p)`.
pub fn total_mass_truncated(n: usize, p: u64, order: usize) -> Result<Poly> {
    let series = local_count_series(n, p, order)?;
    Ok((&haar_mass_gl(n, p)? * &series).truncate(order))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationReport {
    pub residual: f64,
    /// `1 - haar·partial` when `β` is an integer.
    pub exact_residual: Option<Rational>,
    pub bound: f64,
    pub pass: bool,
}

/// Checks `|haar · Σ_{k≤K} c_k p^{-βk} - 1| ≤ haar · tail`.
pub fn polarization_check(
    n: usize,
    p: u64,
    beta: &Rational,
    k_max: usize,
) -> Result<PolarizationReport> {
    let partial = zeta_local_partial(n, p, beta, k_max)?;
    let haar = haar_mass_gl(n, p)?;
    let (residual, exact_residual, haar_f) = match &partial.exact {
        Some(s) => {
            let b = beta.to_integer();
            let b: i64 = num_traits::ToPrimitive::to_i64(&b)
                .ok_or_else(|| Error::OutOfRange(format!("β = {beta}")))?;
            let h = haar.eval(&pow_p(p, -b));
            let r = Rational::one() - &h * s;
            (rational_to_f64(&r).abs(), Some(r), rational_to_f64(&h))
        }
        None => {
            let t = (p as f64).powf(-rational_to_f64(beta));
            let h: f64 = (0..n)
                .map(|j| 1.0 - (p as f64).powi(j as i32) * t)
                .product();
            ((h * partial.value - 1.0).abs(), None, h)
        }
    };
    let bound = haar_f * (partial.tail_bound + partial.rounding) + 8.0 * f64::EPSILON;
    Ok(PolarizationReport {
        residual,
        exact_residual,
        bound,
        pass: residual <= bound,
    })
}
