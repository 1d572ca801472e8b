use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::scalar::{Scalar, C64};
use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Relative pivot threshold below which a floating-point elimination is
/// declared singular.
const FLOAT_PIVOT_TOL: f64 = 1e-14;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_diag(d: &[T]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    /// `col ⊗ row`.
    pub fn outer(col: &[T], row: &[T]) -> Self {
        Self::from_fn(col.len(), row.len(), |i, j| col[i].clone() * row[j].clone())
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

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_c64(&self) -> Matrix<C64> {
        self.map(T::to_c64)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn trace(&self) -> T {
        self.diag().into_iter().fold(T::zero(), |a, b| a + b)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Entries strictly below the diagonal.
    pub fn strictly_lower(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            if i > j {
                self[(i, j)].clone()
            } else {
                T::zero()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(T::modulus).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|x| {
                let m = x.modulus();
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Left multiplication by `diag(d)`.
    pub fn diag_mul_left(&self, d: &[T]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| d[i].clone() * self[(i, j)].clone())
    }

    /// Right multiplication by `diag(d)`.
    pub fn diag_mul_right(&self, d: &[T]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * d[j].clone())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len(), "vector-matrix dimension mismatch");
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(T::zero(), |acc, i| acc + v[i].clone() * self[(i, j)].clone())
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    fn pivot_is_zero(p: &T, scale: f64) -> bool {
        if T::EXACT {
            p.is_zero()
        } else {
            p.modulus() <= FLOAT_PIVOT_TOL * scale
        }
    }

    fn pick_pivot(a: &Matrix<T>, col: usize, from: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for r in from..a.rows {
            if a[(r, col)].is_zero() {
                continue;
            }
            if T::EXACT {
                // first nonzero keeps intermediate sizes modest
                return Some(r);
            }
            match best {
                Some(b) if a[(r, col)].cmp_modulus(&a[(b, col)]).is_le() => {}
                _ => best = Some(r),
            }
        }
        best
    }

    pub fn det(&self) -> Result<T> {
        let n = self.ensure_square()?;
        let mut a = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = Self::pick_pivot(&a, c, c) else {
                return Ok(T::zero());
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let pv = a[(c, c)].clone();
            det = det * pv.clone();
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone() / pv.clone();
                for k in c..n {
                    let v = a[(r, k)].clone() - f.clone() * a[(c, k)].clone();
                    a[(r, k)] = v;
                }
            }
        }
        Ok(det)
    }

    /// Solve `self · X = b`.
    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        let n = self.ensure_square()?;
        if b.rows != n {
            return Err(Error::Dimension(format!(
                "solve: {}x{} against {}x{}",
                n, n, b.rows, b.cols
            )));
        }
        let scale = self.max_modulus().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut x = b.clone();
        for c in 0..n {
            let p = Self::pick_pivot(&a, c, c).ok_or(Error::Singular)?;
            if Self::pivot_is_zero(&a[(p, c)], scale) {
                return Err(Error::Singular);
            }
            a.swap_rows(p, c);
            x.swap_rows(p, c);
            let pv = a[(c, c)].clone();
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone() / pv.clone();
                for k in c..n {
                    let v = a[(r, k)].clone() - f.clone() * a[(c, k)].clone();
                    a[(r, k)] = v;
                }
                for k in 0..x.cols {
                    let v = x[(r, k)].clone() - f.clone() * x[(c, k)].clone();
                    x[(r, k)] = v;
                }
            }
        }
        for r in 0..n {
            let pv = a[(r, r)].clone();
            for k in 0..x.cols {
                let v = x[(r, k)].clone() / pv.clone();
                x[(r, k)] = v;
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.ensure_square()?;
        self.solve(&Self::identity(n))
    }

    /// Rank by elimination; `tol` is relative and only used by inexact backends.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let scale = self.max_modulus();
        let mut rank = 0;
        for c in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = Self::pick_pivot(&a, c, rank) else {
                continue;
            };
            if !T::EXACT && a[(p, c)].modulus() <= tol * scale {
                continue;
            }
            a.swap_rows(p, rank);
            let pv = a[(rank, c)].clone();
            for r in rank + 1..a.rows {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone() / pv.clone();
                for k in c..a.cols {
                    let v = a[(r, k)].clone() - f.clone() * a[(rank, k)].clone();
                    a[(r, k)] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Largest modulus among all 2×2 minors; exactly zero iff rank ≤ 1.
    pub fn max_two_by_two_minor(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for k in i + 1..self.rows {
                for j in 0..self.cols {
                    for l in j + 1..self.cols {
                        let m = self[(i, j)].clone() * self[(k, l)].clone()
                            - self[(i, l)].clone() * self[(k, j)].clone();
                        worst = worst.max(if m.is_zero() { 0.0 } else { m.modulus().max(f64::MIN_POSITIVE) });
                    }
                }
            }
        }
        worst
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }

    /// Largest entry modulus of `self - other`; zero iff exactly equal on exact backends.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let d = a.clone() - b.clone();
                if d.is_zero() {
                    0.0
                } else {
                    d.modulus().max(f64::MIN_POSITIVE)
                }
            })
            .fold(0.0, f64::max)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Matrix::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;

    fn q(n: i64, d: i64) -> Rational {
        <Rational as Scalar>::from_ratio(n, d)
    }

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q(x, 1)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn inverse_is_exact() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(3));
        assert_eq!(a.det().unwrap(), q(18, 1));
    }

    #[test]
    fn singular_detected() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.inverse(), Err(Error::Singular));
        assert_eq!(a.det().unwrap(), q(0, 1));
        assert_eq!(a.rank(0.0), 1);
    }

    #[test]
    fn not_square() {
        let a = Matrix::<Rational>::zeros(2, 3);
        assert_eq!(a.det(), Err(Error::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn float_inverse() {
        let a = m(&[&[4, 1], &[2, 3]]).to_c64();
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).max_diff(&Matrix::<C64>::identity(2)) < 1e-15);
    }

    #[test]
    fn minors_detect_rank_one() {
        let a = m(&[&[1, 2], &[3, 6]]);
        assert_eq!(a.max_two_by_two_minor(), 0.0);
        let b = m(&[&[1, 2], &[3, 5]]);
        assert!(b.max_two_by_two_minor() > 0.0);
    }
}
