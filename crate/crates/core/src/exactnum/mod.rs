//! Scalars, dense matrices and the small amount of linear algebra the rest of
//! the crate needs.

mod charpoly;
mod eigen;
mod matrix;
mod rank;
mod scalar;

pub use charpoly::{char_poly, poly_from_roots, CharPoly};
pub use eigen::{eig_sorted, eigenvalues, lex_order, Eigen, REAL_TIE_TOL, SEPARATION_TOL};
pub use matrix::Matrix;
pub use rank::rank_one_factor;
pub use scalar::{format_rational, parse_rational, QComplex, Rational, Scalar, C64};

/// Newton interpolation through `(xs[i], ys[i])`, returned as ascending
/// monomial coefficients.
pub fn interpolate<T: Scalar>(xs: &[T], ys: &[T]) -> Vec<T> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i].clone() - dd[i - 1].clone()) / (xs[i].clone() - xs[i - level].clone());
        }
    }
    // Horner in Newton form
    let mut poly = vec![T::zero(); n.max(1)];
    for i in (0..n).rev() {
        // poly = poly * (x - xs[i]) + dd[i]
        let mut next = vec![T::zero(); n.max(1)];
        for k in 0..n {
            if poly[k].is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] = next[k + 1].clone() + poly[k].clone();
            }
            next[k] = next[k].clone() - poly[k].clone() * xs[i].clone();
        }
        next[0] = next[0].clone() + dd[i].clone();
        poly = next;
    }
    poly
}

/// Evaluate ascending coefficients at `x`.
pub fn eval_poly<T: Scalar>(coeffs: &[T], x: &T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_recovers_cubic() {
        let coeffs: Vec<Rational> = [3, -1, 0, 2].iter().map(|&c| Rational::from_i64(c)).collect();
        let xs: Vec<Rational> = [0, 1, -1, 2].iter().map(|&x| Rational::from_i64(x)).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| eval_poly(&coeffs, x)).collect();
        assert_eq!(interpolate(&xs, &ys), coeffs);
    }
}
