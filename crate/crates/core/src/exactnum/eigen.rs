use nalgebra::{DMatrix, Schur};

use super::matrix::Matrix;
use super::scalar::{Scalar, C64};
use crate::error::{Error, Result};

/// Eigenvalues closer than this (relative to `max(1, |A|)`) are a
/// degenerate spectrum.
pub const SEPARATION_TOL: f64 = 1e-12;
/// Real parts within this relative distance are ordered by imaginary part.
pub const REAL_TIE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<C64>,
    /// Columns are eigenvectors, normalized so that the first
    /// largest-modulus entry equals 1.
    pub vectors: Matrix<C64>,
}

fn schur(a: &Matrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let n = a.ensure_square()?;
    let m = DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
    let s = Schur::try_new(m, f64::EPSILON, 10_000 * n.max(1)).ok_or(Error::NoConvergence)?;
    Ok(s.unpack())
}

/// Order indices lexicographically by (re, im), grouping real parts that agree
/// to within `tie` so that conjugate pairs sort by imaginary part.
pub fn lex_order(values: &[C64], tie: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let anchor = values[idx[start]].re;
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]].re - anchor <= tie {
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&a, &b| values[a].im.total_cmp(&values[b].im));
        out.extend(group);
        start = end;
    }
    out
}

fn scale_of(a: &Matrix<C64>) -> f64 {
    a.max_modulus().max(1.0)
}

/// All eigenvalues in lexicographic order, multiplicities allowed.
pub fn eigenvalues(a: &Matrix<C64>) -> Result<Vec<C64>> {
    let (_, t) = schur(a)?;
    let vals: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    let order = lex_order(&vals, REAL_TIE_TOL * scale_of(a));
    Ok(order.into_iter().map(|i| vals[i]).collect())
}

/// Eigenvalues and eigenvectors of a matrix with simple spectrum.
pub fn eig_sorted(a: &Matrix<C64>) -> Result<Eigen> {
    let n = a.ensure_square()?;
    let scale = scale_of(a);
    let (q, t) = schur(a)?;
    let vals: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let order = lex_order(&vals, REAL_TIE_TOL * scale);
    for (x, &i) in order.iter().enumerate() {
        for (y, &j) in order.iter().enumerate().skip(x + 1) {
            let gap = (vals[i] - vals[j]).norm();
            if gap < SEPARATION_TOL * scale {
                return Err(Error::DegenerateSpectrum { i: x, j: y, gap });
            }
        }
    }
    let mut vectors = Matrix::<C64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        // back substitution in the triangular factor
        let lam = t[(k, k)];
        let mut y = vec![C64::zero(); n];
        y[k] = C64::one();
        for i in (0..k).rev() {
            let mut s = C64::zero();
            for l in i + 1..=k {
                s += t[(i, l)] * y[l];
            }
            y[i] = -s / (t[(i, i)] - lam);
        }
        let mut v: Vec<C64> = (0..n)
            .map(|i| (0..n).fold(C64::zero(), |acc, l| acc + q[(i, l)] * y[l]))
            .collect();
        let mut piv = 0;
        for i in 1..n {
            if v[i].norm() > v[piv].norm() * (1.0 + 1e-12) {
                piv = i;
            }
        }
        let p = v[piv];
        for x in v.iter_mut() {
            *x /= p;
        }
        for (i, x) in v.into_iter().enumerate() {
            vectors[(i, col)] = x;
        }
    }
    Ok(Eigen {
        values: order.iter().map(|&i| vals[i]).collect(),
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_example() {
        let a = Matrix::from_diag(&[c(2.0, 0.0), c(1.0, 0.0)]);
        let e = eig_sorted(&a).unwrap();
        assert_eq!(e.values, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let expected = Matrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(e.vectors.max_diff(&expected) < 1e-15);
    }

    #[test]
    fn rotation_sorts_by_imaginary_part() {
        let a = Matrix::from_rows(vec![
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let e = eig_sorted(&a).unwrap();
        assert!((e.values[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((e.values[1] - c(0.0, 1.0)).norm() < 1e-14);
        let av = &a * &e.vectors;
        let vd = e.vectors.diag_mul_right(&e.values);
        assert!(av.max_diff(&vd) < 1e-13);
    }

    #[test]
    fn degenerate_is_rejected() {
        let a = Matrix::from_diag(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(eig_sorted(&a), Err(Error::DegenerateSpectrum { .. })));
        assert_eq!(eigenvalues(&a).unwrap().len(), 2);
    }

    #[test]
    fn non_normal_matrix() {
        let a = Matrix::from_rows(vec![
            vec![c(1.0, 0.5), c(3.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 1.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0), c(0.25, -1.0)],
        ])
        .unwrap();
        let e = eig_sorted(&a).unwrap();
        let av = &a * &e.vectors;
        let vd = e.vectors.diag_mul_right(&e.values);
        assert!(av.max_diff(&vd) < 1e-12);
        for j in 0..3 {
            let col = e.vectors.col(j);
            assert!(col.iter().all(|x| x.norm() <= 1.0 + 1e-12));
            assert!(col.iter().any(|x| (x - C64::one()).norm() < 1e-15));
        }
    }
}
