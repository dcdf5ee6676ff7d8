//! Hecke operators `T_l` acting on functions of corank-one strata, the
//! recursion chain they satisfy under the scaling condition, the phase
//! polynomial in `x = p^β`, and the resulting classification in `β`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cosets::{coset_count, enumerate_tl_reps};
use crate::error::{Error, Result};
use crate::exact::{
    elementary_symmetric, is_integer, pow_p, rat, require_prime, Poly, RatMatrix, Rational,
};
use crate::padic::{stratify, Stratum};

/// `T_l = diag(1,…,1,p,…,p)` with `l` trailing `p`'s, acting on `GL_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeckeElement {
    pub n: usize,
    pub p: u64,
    pub l: usize,
}

impl HeckeElement {
    pub fn new(n: usize, p: u64, l: usize) -> Result<Self> {
        require_prime(p)?;
        if l == 0 || l > n {
            return Err(Error::OutOfRange(format!("l = {l} for n = {n}")));
        }
        Ok(HeckeElement { n, p, l })
    }
}

/// Finitely supported rational function on corank-one signatures
/// `(k_1 ≤ ⋯ ≤ k_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumFunction {
    n: usize,
    p: u64,
    values: BTreeMap<Vec<i64>, Rational>,
}

impl StratumFunction {
    pub fn zero(n: usize, p: u64) -> Result<Self> {
        require_prime(p)?;
        if n < 2 {
            return Err(Error::InvalidInput("corank-one strata need n ≥ 2".into()));
        }
        Ok(StratumFunction {
            n,
            p,
            values: BTreeMap::new(),
        })
    }

    /// Indicator of the stratum with the given signature.
    pub fn indicator(n: usize, p: u64, signature: &[i64]) -> Result<Self> {
        let mut f = Self::zero(n, p)?;
        f.set(signature, Rational::one())?;
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn check_signature(&self, s: &[i64]) -> Result<()> {
        if s.len() != self.n - 1 {
            return Err(Error::InvalidInput(format!(
                "signature of length {} for n = {}",
                s.len(),
                self.n
            )));
        }
        if s.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("signature must be ascending".into()));
        }
        Ok(())
    }

    pub fn set(&mut self, signature: &[i64], value: Rational) -> Result<()> {
        self.check_signature(signature)?;
        if value.is_zero() {
            self.values.remove(signature);
        } else {
            self.values.insert(signature.to_vec(), value);
        }
        Ok(())
    }

    pub fn get(&self, signature: &[i64]) -> Rational {
        self.values
            .get(signature)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.p != other.p {
            return Err(Error::InvalidInput(
                "stratum functions from different (n, p)".into(),
            ));
        }
        Ok(())
    }

    /// `self + c·other`
    pub fn add_scaled(&self, other: &Self, c: &Rational) -> Result<Self> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (k, v) in &other.values {
            let nv = out.get(k) + v * c;
            out.set(k, nv)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        out.values = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out
    }

    /// Value on an arbitrary stratum; zero off the corank-one strata.
    pub fn at_stratum(&self, s: &Stratum) -> Rational {
        match s {
            Stratum::Singular(k) if k.len() == self.n - 1 => self.get(k),
            _ => Rational::zero(),
        }
    }
}

impl fmt::Display for StratumFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .values
            .iter()
            .map(|(k, v)| {
                let sig: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                format!("{v}·f[{}]", sig.join(","))
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `diag(0, p^{k_1}, …, p^{k_{n-1}})`.
pub fn canonical_rep(p: u64, signature: &[i64]) -> RatMatrix {
    let mut d = vec![Rational::zero()];
    d.extend(signature.iter().map(|&k| pow_p(p, k)));
    RatMatrix::diag(&d)
}

/// `(T f)(x)` at the canonical matrix of the given signature.
pub fn hecke_value_at(t: HeckeElement, f: &StratumFunction, signature: &[i64]) -> Result<Rational> {
    if t.n != f.n || t.p != f.p {
        return Err(Error::InvalidInput(
            "operator and function have different (n, p)".into(),
        ));
    }
    f.check_signature(signature)?;
    let x = canonical_rep(t.p, signature);
    let reps = enumerate_tl_reps(t.n, t.p, t.l)?;
    let mut acc = Rational::zero();
    for r in &reps {
        let hx = &r.matrix.to_rational() * &x;
        acc += f.at_stratum(&stratify(&hx, t.p)?);
    }
    Ok(acc / rat(reps.len() as i64))
}

/// Ascending signatures `k'` with `k_i - 1 ≤ k'_i ≤ k_i`. An integral `h`
/// with `p·h⁻¹` integral can only move elementary divisors inside this window.
fn preimage_window(k: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &ki in k {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                [ki - 1, ki].into_iter().map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .filter(|w| w.windows(2).all(|p| p[0] <= p[1]))
            .collect();
    }
    out
}

/// `(T f)(x) = (1/#reps) Σ_h f(h x)`, evaluated on every signature whose
/// images can meet the support of `f`.
pub fn apply_hecke(t: HeckeElement, f: &StratumFunction) -> Result<StratumFunction> {
    if t.n != f.n || t.p != f.p {
        return Err(Error::InvalidInput(
            "operator and function have different (n, p)".into(),
        ));
    }
    let candidates: BTreeSet<Vec<i64>> = f.support().flat_map(|k| preimage_window(k)).collect();
    let mut out = StratumFunction::zero(f.n, f.p)?;
    for k in candidates {
        let v = hecke_value_at(t, f, &k)?;
        out.set(&k, v)?;
    }
    Ok(out)
}

/// One link `n_j T_j f = c_j Δ_{j-1} + Δ_j` of the recursion chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStep {
    pub j: usize,
    pub n_j: Rational,
    /// `n_j · T_j f`, computed by enumeration.
    pub image: StratumFunction,
    /// Coefficient `c_j` of `Δ_{j-1}`.
    pub carry: Rational,
    pub delta: StratumFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecursionChain {
    pub n: usize,
    pub p: u64,
    pub base: Vec<i64>,
    pub steps: Vec<ChainStep>,
    /// `Δ_{n-1} = closing · f_{k-1}`.
    pub closing: Rational,
}

impl RecursionChain {
    /// After integrating against a measure with `ν(Z_{k-1}) = x^n ν(Z_k)`,
    /// the chain says `P(x) = 0` for the polynomial returned here, built
    /// from the computed coefficients.
    pub fn polynomial(&self) -> Poly {
        let mut prev = Poly::one();
        for s in &self.steps {
            let lead = Poly::monomial(s.n_j.clone(), s.j);
            prev = &lead - &prev.scale(&s.carry);
        }
        &prev - &Poly::monomial(self.closing.clone(), self.n)
    }

    /// Carry `p^{n-j}` at every step and closing coefficient one.
    pub fn matches_expected(&self) -> bool {
        self.steps
            .iter()
            .all(|s| s.carry == pow_p(self.p, (self.n - s.j) as i64))
            && self.closing.is_one()
    }
}

/// Runs the chain from `f = 1_{Z_k}`: `Δ_0 = f`, and at each step `c_j` is
/// read off as the ratio of `n_j T_j f` to `Δ_{j-1}` on the support of
/// `Δ_{j-1}`. The ratio must be constant there, and the last remainder
/// must be a multiple of the indicator of the fully shifted stratum.
pub fn recursion_chain(n: usize, p: u64, base: &[i64]) -> Result<RecursionChain> {
    let f = StratumFunction::indicator(n, p, base)?;
    let mut prev = f.clone();
    let mut steps = Vec::new();
    for j in 1..n {
        let n_j = coset_count(n, p, j)?;
        let image = apply_hecke(HeckeElement::new(n, p, j)?, &f)?.scale(&n_j);
        let mut carry: Option<Rational> = None;
        for (k, v) in prev.iter() {
            let r = image.get(k) / v;
            match &carry {
                None => carry = Some(r),
                Some(c) if *c == r => {}
                Some(c) => {
                    return Err(Error::Internal(format!(
                        "step {j}: ratio {r} at {k:?} differs from {c}"
                    )))
                }
            }
        }
        let carry = carry.ok_or_else(|| Error::Internal(format!("step {j}: empty Δ")))?;
        let delta = image.add_scaled(&prev, &-carry.clone())?;
        steps.push(ChainStep {
            j,
            n_j,
            image,
            carry,
            delta: delta.clone(),
        });
        prev = delta;
    }
    let shifted: Vec<i64> = base.iter().map(|k| k - 1).collect();
    let closing = prev.get(&shifted);
    if prev.support().any(|k| *k != shifted) {
        return Err(Error::Internal(format!(
            "Δ_{} = {prev} is not a multiple of f{shifted:?}",
            n - 1
        )));
    }
    Ok(RecursionChain {
        n,
        p,
        base: base.to_vec(),
        steps,
        closing,
    })
}

/// The chain on a generic signature `(0, 3, 6, …)`.
pub fn recursion_coefficients(n: usize, p: u64) -> Result<RecursionChain> {
    if n < 2 {
        return Err(Error::InvalidInput("the chain needs n ≥ 2".into()));
    }
    let base: Vec<i64> = (0..n as i64 - 1).map(|i| 3 * i).collect();
    recursion_chain(n, p, &base)
}

/// Degree-`n` polynomial in `x = p^β` whose roots are the admissible
/// stationary values: `P_{n-1}(x) - xⁿ`, with `P_0 = 1` and
/// `P_j = n_j x^j - p^{n-j} P_{j-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePolynomial {
    pub n: usize,
    pub p: u64,
    pub poly: Poly,
}

pub fn phase_polynomial(n: usize, p: u64) -> Result<PhasePolynomial> {
    require_prime(p)?;
    if n < 2 {
        return Err(Error::InvalidInput("phase polynomial needs n ≥ 2".into()));
    }
    let mut prev = Poly::one();
    for j in 1..n {
        let lead = Poly::monomial(coset_count(n, p, j)?, j);
        prev = &lead - &prev.scale(&pow_p(p, (n - j) as i64));
    }
    let poly = &prev - &Poly::monomial(Rational::one(), n);
    Ok(PhasePolynomial { n, p, poly })
}

/// `1, p, …, p^{n-1}`, each confirmed by exact synthetic division.
pub fn phase_roots(n: usize, p: u64) -> Result<Vec<Rational>> {
    let mut q = phase_polynomial(n, p)?.poly;
    let mut roots = Vec::new();
    for i in 0..n as i64 {
        let r = pow_p(p, i);
        let (quot, rem) = q.synthetic_division(&r);
        if !rem.is_zero() {
            return Err(Error::Internal(format!("x = {r} leaves remainder {rem}")));
        }
        q = quot;
        roots.push(r);
    }
    if q != Poly::constant(-Rational::one()) {
        return Err(Error::Internal(format!(
            "cofactor {} after removing all roots",
            q.render("x")
        )));
    }
    Ok(roots)
}

/// `p·p²⋯p^{n-1-l} · n_l = E_{n-l}(1, p, …, p^{n-1})`.
pub fn coefficient_identity_check(n: usize, p: u64, l: usize) -> Result<bool> {
    if l == 0 || l >= n {
        return Err(Error::OutOfRange(format!("l = {l} for n = {n}")));
    }
    let m = (n - 1 - l) as i64;
    let lhs = pow_p(p, m * (m + 1) / 2) * coset_count(n, p, l)?;
    let powers: Vec<Rational> = (0..n as i64).map(|i| pow_p(p, i)).collect();
    Ok(lhs == elementary_symmetric(n - l, &powers)?)
}

/// Whether the chain admits a nonzero stationary solution at `β`: only when
/// `p^β` is rational, i.e. `β` an integer, and a root of the phase polynomial.
pub fn stationary_stratum_solution(n: usize, p: u64, beta: &Rational) -> Result<bool> {
    let poly = phase_polynomial(n, p)?.poly;
    if !is_integer(beta) {
        return Ok(false);
    }
    let b = beta
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::OutOfRange(format!("β = {beta}")))?;
    Ok(poly.eval(&pow_p(p, b)).is_zero())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhaseVerdict {
    NoState,
    UniqueState,
    /// Extremal states parametrised by the quotient named in the label.
    ExtremalFamily(String),
    /// A state at the integer `β = k` built from the singular measure.
    BoundaryConstructed {
        k: i64,
        label: Option<String>,
    },
}

impl PhaseVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            PhaseVerdict::NoState => "NoState",
            PhaseVerdict::UniqueState => "UniqueState",
            PhaseVerdict::ExtremalFamily(_) => "ExtremalFamily",
            PhaseVerdict::BoundaryConstructed { .. } => "BoundaryConstructed",
        }
    }
}

impl fmt::Display for PhaseVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseVerdict::NoState | PhaseVerdict::UniqueState => write!(f, "{}", self.kind()),
            PhaseVerdict::ExtremalFamily(l) => write!(f, "ExtremalFamily({l})"),
            PhaseVerdict::BoundaryConstructed { k, label: None } => {
                write!(f, "BoundaryConstructed({k})")
            }
            PhaseVerdict::BoundaryConstructed { k, label: Some(l) } => {
                write!(f, "BoundaryConstructed({k}, {l})")
            }
        }
    }
}

pub fn kms_classify(n: usize, beta: &Rational) -> Result<PhaseVerdict> {
    if n < 2 {
        return Err(Error::InvalidInput("classification needs n ≥ 2".into()));
    }
    let top = rat(n as i64);
    let below = rat(n as i64 - 1);
    if beta > &top {
        return Ok(PhaseVerdict::ExtremalFamily(format!("Γ\\P×GL_{n}(Ẑ)")));
    }
    if beta > &below {
        return Ok(PhaseVerdict::UniqueState);
    }
    if is_integer(beta) && beta.is_positive() {
        let k = beta.to_integer().to_i64().expect("0 < β ≤ n - 1");
        let label = (n == 2 && k == 1).then(|| "U\\GL_2(Ẑ)".to_string());
        return Ok(PhaseVerdict::BoundaryConstructed { k, label });
    }
    Ok(PhaseVerdict::NoState)
}
