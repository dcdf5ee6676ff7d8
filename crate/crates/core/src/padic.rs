//! p-local stratification of rational matrices.
//!
//! A rational matrix is read inside `Mat_n(Q_p)`. Elimination with
//! minimal-valuation pivots brings it to `diag(0,…,0,p^{k_1},…,p^{k_l})`
//! using `B ∈ SL_n(Z_p)` on the left and `C ∈ GL_n(Z_p)` on the right.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{pow_p, require_prime, valuation, valuation_or_inf, RatMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stratum {
    /// `det ≠ 0`, carrying `v_p(det)`.
    Invertible(i64),
    /// Nonzero, singular; exponents of the nonzero elementary divisors, ascending.
    Singular(Vec<i64>),
    Zero,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stratum::Invertible(v) => write!(f, "Invertible({v})"),
            Stratum::Singular(k) => {
                let parts: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                write!(f, "Singular[{}]", parts.join(","))
            }
            Stratum::Zero => write!(f, "Zero"),
        }
    }
}

/// `B·M·C = D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfWitness {
    pub b: RatMatrix,
    pub c: RatMatrix,
    pub d: RatMatrix,
}

impl SnfWitness {
    /// Valuations of the diagonal of `D`, `None` for zero entries.
    pub fn exponents(&self, p: u64) -> Vec<Option<i64>> {
        self.d
            .diagonal()
            .iter()
            .map(|x| valuation_or_inf(x, p))
            .collect()
    }
}

pub fn is_p_integral(q: &Rational, p: u64) -> bool {
    q.is_zero() || valuation(q, p).is_ok_and(|v| v >= 0)
}

pub fn is_p_unit(q: &Rational, p: u64) -> bool {
    valuation(q, p).is_ok_and(|v| v == 0)
}

pub fn is_p_integral_matrix(m: &RatMatrix, p: u64) -> bool {
    m.entries().all(|x| is_p_integral(x, p))
}

/// Split off the p-power: `q = p^v · u`, returns `(v, u)`.
pub fn split_p(q: &Rational, p: u64) -> Result<(i64, Rational)> {
    let v = valuation(q, p)?;
    Ok((v, q / pow_p(p, v)))
}

pub fn snf_witnesses(m: &RatMatrix, p: u64) -> Result<SnfWitness> {
    require_prime(p)?;
    if m.is_zero() {
        return Err(Error::InvalidInput(
            "zero matrix has no normal form witness".into(),
        ));
    }
    let n = m.n();
    let mut a = m.clone();
    let mut b = RatMatrix::identity(n);
    let mut c = RatMatrix::identity(n);
    let mut rank = 0;
    for t in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in t..n {
            for j in t..n {
                if let Some(v) = valuation_or_inf(&a[(i, j)], p) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        rank += 1;
        a.swap_rows(t, pi);
        b.swap_rows(t, pi);
        a.swap_cols(t, pj);
        c.swap_cols(t, pj);
        let unit = &a[(t, t)] / pow_p(p, v);
        let inv = unit.recip();
        a.scale_col(t, &inv);
        c.scale_col(t, &inv);
        let piv = a[(t, t)].clone();
        for i in t + 1..n {
            if !a[(i, t)].is_zero() {
                let f = -(&a[(i, t)] / &piv);
                a.add_row_multiple(i, t, &f);
                b.add_row_multiple(i, t, &f);
            }
        }
        for j in t + 1..n {
            if !a[(t, j)].is_zero() {
                let f = -(&a[(t, j)] / &piv);
                a.add_col_multiple(j, t, &f);
                c.add_col_multiple(j, t, &f);
            }
        }
    }
    // Zeros first: rotate the trailing zero block to the front.
    let perm: Vec<usize> = (rank..n).chain(0..rank).collect();
    let b = RatMatrix::from_fn(n, |i, j| b[(perm[i], j)].clone());
    let c = RatMatrix::from_fn(n, |i, j| c[(i, perm[j])].clone());
    let d = RatMatrix::from_fn(n, |i, j| a[(perm[i], perm[j])].clone());
    let (mut b, mut c) = (b, c);
    if b.det() != Rational::one() {
        // det B = -1: flip the first row of B and first column of C; D is unchanged.
        let minus = -Rational::one();
        b.scale_row(0, &minus);
        c.scale_col(0, &minus);
    }
    Ok(SnfWitness { b, c, d })
}

pub fn stratify(m: &RatMatrix, p: u64) -> Result<Stratum> {
    require_prime(p)?;
    if m.is_zero() {
        return Ok(Stratum::Zero);
    }
    let det = m.det();
    if !det.is_zero() {
        return Ok(Stratum::Invertible(valuation(&det, p)?));
    }
    let w = snf_witnesses(m, p)?;
    Ok(Stratum::Singular(
        w.exponents(p).into_iter().flatten().collect(),
    ))
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    if r > n {
        return vec![];
    }
    let mut out = Vec::new();
    for mut c in combinations(n - 1, r - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out.extend(combinations(n - 1, r));
    out.sort();
    out
}

/// Minimum p-valuation over all `r×r` minors; `None` when they all vanish.
pub fn minor_valuations(m: &RatMatrix, p: u64, r: usize) -> Result<Option<i64>> {
    require_prime(p)?;
    let n = m.n();
    if r == 0 || r > n {
        return Err(Error::OutOfRange(format!("minor size {r} for n = {n}")));
    }
    let subsets = combinations(n, r);
    let mut best: Option<i64> = None;
    for rows in &subsets {
        for cols in &subsets {
            if let Some(v) = valuation_or_inf(&m.minor(rows, cols), p) {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
    }
    Ok(best)
}

/// For a rank-one `2×2` matrix, a `g ∈ GL_2(Z_p)` with `m·g` having zero
/// first column: a lower unipotent when `col1 = c·col2` with `v_p(c) ≥ 0`,
/// otherwise the column swap followed by a lower unipotent.
pub fn rank1_normalize(m: &RatMatrix, p: u64) -> Result<RatMatrix> {
    require_prime(p)?;
    if m.n() != 2 {
        return Err(Error::DimensionMismatch(
            "rank-one normalization needs n = 2".into(),
        ));
    }
    if m.is_zero() || !m.det().is_zero() {
        return Err(Error::InvalidInput("matrix must have rank one".into()));
    }
    let zero = Rational::zero;
    let one = Rational::one;
    let col2_zero = m[(0, 1)].is_zero() && m[(1, 1)].is_zero();
    if col2_zero {
        return RatMatrix::from_rows(vec![vec![zero(), one()], vec![one(), zero()]]);
    }
    let c = if m[(0, 1)].is_zero() {
        &m[(1, 0)] / &m[(1, 1)]
    } else {
        &m[(0, 0)] / &m[(0, 1)]
    };
    if c.is_zero() {
        return Ok(RatMatrix::identity(2));
    }
    if valuation(&c, p)? >= 0 {
        RatMatrix::from_rows(vec![vec![one(), zero()], vec![-c, one()]])
    } else {
        // Swap, then clear with the p-integral ratio 1/c.
        RatMatrix::from_rows(vec![vec![-c.recip(), one()], vec![one(), zero()]])
    }
}
