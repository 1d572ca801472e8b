use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::Result;

/// Monic characteristic polynomial `det(λ·1 - A)`.
///
/// `coeffs[k]` multiplies `λ^(n-k)`, so `coeffs[0] == 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> CharPoly<T> {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Coefficients by ascending power of λ.
    pub fn ascending(&self) -> Vec<T> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        self.coeffs
            .iter()
            .zip(&other.coeffs)
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

/// Faddeev–LeVerrier recursion; exact over exact fields.
pub fn char_poly<T: Scalar>(a: &Matrix<T>) -> Result<CharPoly<T>> {
    let n = a.ensure_square()?;
    let mut coeffs = vec![T::one()];
    let mut m = Matrix::identity(n);
    for k in 1..=n {
        let am = a * &m;
        let c = -(am.trace() / T::from_i64(k as i64));
        m = &am + &Matrix::identity(n).scale(&c);
        coeffs.push(c);
    }
    Ok(CharPoly { coeffs })
}

/// Product of monic linear factors `∏ (λ - r)`.
pub fn poly_from_roots<T: Scalar>(roots: &[T]) -> CharPoly<T> {
    let mut coeffs = vec![T::one()];
    for r in roots {
        let mut next = coeffs.clone();
        next.push(T::zero());
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] = next[k + 1].clone() - r.clone() * c.clone();
        }
        coeffs = next;
    }
    CharPoly { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;

    #[test]
    fn two_by_two_example() {
        let a = Matrix::from_rows(vec![
            vec![Rational::from_i64(1), Rational::from_i64(2)],
            vec![Rational::from_i64(3), Rational::from_i64(4)],
        ])
        .unwrap();
        let p = char_poly(&a).unwrap();
        assert_eq!(
            p.coeffs,
            vec![Rational::from_i64(1), Rational::from_i64(-5), Rational::from_i64(-2)]
        );
    }

    #[test]
    fn one_by_one_and_empty() {
        let a = Matrix::from_diag(&[Rational::from_ratio(7, 3)]);
        assert_eq!(
            char_poly(&a).unwrap().coeffs,
            vec![Rational::from_i64(1), Rational::from_ratio(-7, 3)]
        );
        let e = Matrix::<Rational>::zeros(0, 0);
        assert_eq!(char_poly(&e).unwrap().coeffs, vec![Rational::from_i64(1)]);
    }

    #[test]
    fn roots_expand() {
        let p = poly_from_roots(&[Rational::from_i64(1), Rational::from_i64(2)]);
        assert_eq!(
            p.coeffs,
            vec![Rational::from_i64(1), Rational::from_i64(-3), Rational::from_i64(2)]
        );
    }
}
