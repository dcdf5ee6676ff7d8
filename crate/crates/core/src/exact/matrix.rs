use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_traits::{Num, One, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rational>;

impl<T: Clone + Num> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a {n}x{n} matrix",
                r.len()
            )));
        }
        Ok(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diag(d: &[T]) -> Self {
        Self::from_fn(
            d.len(),
            |i, j| if i == j { d[i].clone() } else { T::zero() },
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.n {
                self.data.swap(a * self.n + j, b * self.n + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.n {
                self.data.swap(i * self.n + a, i * self.n + b);
            }
        }
    }

    /// `row[dst] += c * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, c: &T) {
        for j in 0..self.n {
            let v = self[(src, j)].clone() * c.clone();
            self[(dst, j)] = self[(dst, j)].clone() + v;
        }
    }

    /// `col[dst] += c * col[src]`
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, c: &T) {
        for i in 0..self.n {
            let v = self[(i, src)].clone() * c.clone();
            self[(i, dst)] = self[(i, dst)].clone() + v;
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &T) {
        for j in 0..self.n {
            self[(i, j)] = self[(i, j)].clone() * c.clone();
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &T) {
        for i in 0..self.n {
            self[(i, j)] = self[(i, j)].clone() * c.clone();
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.n, self.n, other.n, other.n
            )));
        }
        let n = self.n;
        Ok(Self::from_fn(n, |i, j| {
            let mut acc = T::zero();
            for k in 0..n {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        }))
    }

    /// Determinant by Bareiss fraction-free elimination; every division is exact.
    pub fn det(&self) -> T {
        let n = self.n;
        let mut a = self.clone();
        let mut sign_flip = false;
        let mut prev = T::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign_flip = !sign_flip;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[(k, k)].clone() * a[(i, j)].clone()
                        - a[(i, k)].clone() * a[(k, j)].clone();
                    a[(i, j)] = v / prev.clone();
                }
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if sign_flip {
            T::zero() - d
        } else {
            d
        }
    }

    /// Submatrix determinant on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> T {
        let k = rows.len();
        Matrix::from_fn(k, |i, j| self[(rows[i], cols[j])].clone()).det()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Panics on a dimension mismatch; use [`Matrix::checked_mul`] for untrusted input.
impl<T: Clone + Num> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.data[i * self.n + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }
}

impl RatMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        IntMatrix::from_i64(rows).map(|m| m.to_rational())
    }

    /// `Some` when every entry is an integer.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        if self.data.iter().all(|x| x.denom().is_one()) {
            Some(self.map(|x| x.numer().clone()))
        } else {
            None
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let piv = (k..n)
                .find(|&i| !a[(i, k)].is_zero())
                .ok_or(Error::Singular)?;
            a.swap_rows(k, piv);
            inv.swap_rows(k, piv);
            let c = a[(k, k)].recip();
            a.scale_row(k, &c);
            inv.scale_row(k, &c);
            for i in 0..n {
                if i != k && !a[(i, k)].is_zero() {
                    let c = -a[(i, k)].clone();
                    a.add_row_multiple(i, k, &c);
                    inv.add_row_multiple(i, k, &c);
                }
            }
        }
        Ok(inv)
    }

    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut a = self.clone();
        let mut r = 0;
        for c in 0..n {
            let Some(piv) = (r..n).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(r, piv);
            for i in r + 1..n {
                if !a[(i, c)].is_zero() {
                    let f = -(a[(i, c)].clone() / a[(r, c)].clone());
                    a.add_row_multiple(i, r, &f);
                }
            }
            r += 1;
        }
        r
    }
}
