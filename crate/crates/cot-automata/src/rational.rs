//! Exact rational scalars plus the small amount of dense linear algebra the
//! constructions need.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

pub use num_rational::BigRational as Rational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical `p/q` (or `p`) rendering.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let r = Rational::from_str(t).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if t.contains('/') && r.denom().is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(r)
}

pub type Vector = Vec<Rational>;

pub fn zeros(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn onehot(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sum(a: &[Rational]) -> Rational {
    a.iter().fold(Rational::zero(), |acc, x| acc + x)
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Rational) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Matrix-vector product; zero entries of `v` are skipped, so one-hot
    /// inputs cost a single column read.
    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("matrix has {} columns, vector has {} entries", self.cols, v.len())));
        }
        let mut out = zeros(self.rows);
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let unit = x.is_one();
            for (i, o) in out.iter_mut().enumerate() {
                let m = self.get(i, j);
                if m.is_zero() {
                    continue;
                }
                if unit {
                    *o += m;
                } else {
                    *o += m * x;
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension("matrix product shapes".into()));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                let x = a.get(col, j) / &p;
                a.set(col, j, x);
                let y = inv.get(col, j) / &p;
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let x = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, x);
                    let y = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, y);
                }
            }
        }
        Some(inv)
    }
}

/// Solve (I - E) x = b for nonnegative `E`, requiring the series
/// sum of E^k to converge. For nonnegative E that holds exactly when I - E
/// is invertible with a nonnegative inverse.
pub fn neumann_inverse(e: &Matrix) -> Result<Matrix> {
    let n = e.rows;
    let mut m = Matrix::identity(n);
    for (x, y) in m.data.iter_mut().zip(&e.data) {
        *x -= y;
    }
    let inv = m.inverse().ok_or_else(|| Error::DivergentEpsilon("I - E is singular".into()))?;
    if inv.data.iter().any(|x| x.is_negative()) {
        return Err(Error::DivergentEpsilon("spectral radius of E is at least 1".into()));
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_canonical() {
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-3, 6)), "-1/2");
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(1)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        let s = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]).unwrap();
        assert!(s.inverse().is_none());
    }

    #[test]
    fn neumann_detects_divergence() {
        let half = Matrix::from_rows(vec![vec![rat(1, 2)]]).unwrap();
        assert_eq!(neumann_inverse(&half).unwrap().get(0, 0), &int(2));
        let unit = Matrix::from_rows(vec![vec![int(1)]]).unwrap();
        assert!(neumann_inverse(&unit).is_err());
        let two = Matrix::from_rows(vec![vec![int(2)]]).unwrap();
        assert!(neumann_inverse(&two).is_err());
    }
}
