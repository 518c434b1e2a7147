//! Exact scalars, vectors and small dense matrices over the rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// A vector in ℚ^d.
pub type QVec = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
}

/// Parses `"p/q"` or an integer string into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| ParseRationalError::Malformed(text.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| ParseRationalError::Malformed(text.to_string()))?;
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qvec(values: &[i64]) -> QVec {
    values.iter().map(|&v| int(v)).collect()
}

pub fn zeros(dim: usize) -> QVec {
    vec![Rational::zero(); dim]
}

pub fn unit(dim: usize, axis: usize) -> QVec {
    let mut v = zeros(dim);
    v[axis] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(k: &Rational, a: &[Rational]) -> QVec {
    a.iter().map(|x| k * x).collect()
}

pub fn neg(a: &[Rational]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn norm_l1(a: &[Rational]) -> Rational {
    a.iter().fold(Rational::zero(), |acc, x| acc + x.abs())
}

pub fn norm_linf(a: &[Rational]) -> Rational {
    a.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)
}

/// Squared Euclidean norm; exact, so L2 comparisons are done on squares.
pub fn norm_l2_squared(a: &[Rational]) -> Rational {
    dot(a, a)
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(format_rational).collect())
            .collect();
        write!(f, "QMatrix{rows:?}")
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, value: Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = value.clone();
        }
        m
    }

    /// Builds from row vectors; `None` if rows are ragged or empty.
    pub fn from_rows(rows: Vec<QVec>) -> Option<Self> {
        let cols = rows.first()?.len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let nrows = rows.len();
        Some(QMatrix { rows: nrows, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<QVec> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> QVec {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] = &out.data[idx] + a * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Gauss-Jordan inverse; `None` when singular or not square.
    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = QMatrix::identity(n).to_rows();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for c in 0..n {
                a[col][c] = &a[col][c] / &p;
                inv[col][c] = &inv[col][c] / &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let t = &factor * &a[col][c];
                    a[r][c] = &a[r][c] - t;
                    let t = &factor * &inv[col][c];
                    inv[r][c] = &inv[r][c] - t;
                }
            }
        }
        QMatrix::from_rows(inv)
    }

    pub fn rank(&self) -> usize {
        rank_of(self.to_rows())
    }
}

/// Rank of a list of row vectors by exact elimination.
pub fn rank_of(mut rows: Vec<QVec>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &rows[rank][col];
            for c in col..cols {
                let t = &factor * &rows[rank][c];
                rows[r][c] = &rows[r][c] - t;
            }
        }
        rank += 1;
    }
    rank
}

/// Solves the square system `rows · x = rhs`; `None` when singular.
pub fn solve_square(rows: &[QVec], rhs: &[Rational]) -> Option<QVec> {
    let m = QMatrix::from_rows(rows.to_vec())?;
    let inv = m.inverse()?;
    Some(inv.mul_vec(rhs))
}

/// Basis of the right null space `{x : rows · x = 0}`.
pub fn null_space(rows: &[QVec], cols: usize) -> Vec<QVec> {
    let mut a: Vec<QVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pv = a[r][c].clone();
        for k in 0..cols {
            a[r][k] = &a[r][k] / &pv;
        }
        for i in 0..a.len() {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].clone();
            for k in 0..cols {
                let t = &factor * &a[r][k];
                a[i][k] = &a[i][k] - t;
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(cols);
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}
