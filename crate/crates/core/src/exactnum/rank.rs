use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Factor `A = ξ ⊗ η` with the largest-modulus entry of `ξ` equal to 1.
///
/// `tol` is a relative tolerance used by inexact backends only.
pub fn rank_one_factor<T: Scalar>(a: &Matrix<T>, tol: f64) -> Result<(Vec<T>, Vec<T>)> {
    let mut best: Option<(usize, usize)> = None;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a[(i, j)].is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[(i, j)].cmp_modulus(&a[(bi, bj)]).is_le() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    let Some((r, c)) = best else {
        return Err(Error::RankNotOne(0));
    };
    if !T::EXACT && a[(r, c)].modulus() <= tol {
        return Err(Error::RankNotOne(0));
    }
    let pivot = a[(r, c)].clone();
    let xi: Vec<T> = a.col(c).into_iter().map(|x| x / pivot.clone()).collect();
    let eta = a.row(r);
    let defect = (a - &Matrix::outer(&xi, &eta)).max_modulus();
    let ok = if T::EXACT {
        defect == 0.0
    } else {
        defect <= tol * a.max_modulus()
    };
    if !ok {
        return Err(Error::RankNotOne(a.rank(tol).max(2)));
    }
    Ok((xi, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_i64(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn example_factor() {
        let (xi, eta) = rank_one_factor(&m(&[&[1, 2], &[3, 6]]), 0.0).unwrap();
        assert_eq!(xi, vec![Rational::from_ratio(1, 3), Rational::from_i64(1)]);
        assert_eq!(eta, vec![Rational::from_i64(3), Rational::from_i64(6)]);
    }

    #[test]
    fn rank_errors() {
        assert_eq!(
            rank_one_factor(&m(&[&[0, 0], &[0, 0]]), 0.0),
            Err(Error::RankNotOne(0))
        );
        assert_eq!(
            rank_one_factor(&m(&[&[1, 0], &[0, 1]]), 0.0),
            Err(Error::RankNotOne(2))
        );
    }
}
