use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Scalar, C64};

/// Classical r-matrices `Σ c_ij(z) E_ij ⊗ E_ji` on `Mat_N ⊗ Mat_N`.
///
/// `E_ij ⊗ E_kl` sits at row `i·N + k`, column `j·N + l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RVariant {
    /// `c_ij = (z+1)/(z-1) + sign(j-i)`
    XxzMultiplicative,
    /// `c_ij = 1/(z-1) + [i > j]`
    Twisted,
}

impl RVariant {
    pub fn name(self) -> &'static str {
        match self {
            RVariant::XxzMultiplicative => "xxz_multiplicative",
            RVariant::Twisted => "twisted",
        }
    }

    fn coefficient<T: Scalar>(self, i: usize, j: usize, z: &T) -> T {
        match self {
            RVariant::XxzMultiplicative => {
                let base = (z.clone() + T::one()) / (z.clone() - T::one());
                let s = match j.cmp(&i) {
                    std::cmp::Ordering::Greater => T::one(),
                    std::cmp::Ordering::Less => -T::one(),
                    std::cmp::Ordering::Equal => T::zero(),
                };
                base + s
            }
            RVariant::Twisted => {
                let base = T::one() / (z.clone() - T::one());
                if i > j {
                    base + T::one()
                } else {
                    base
                }
            }
        }
    }
}

fn from_coefficients<T: Scalar>(n: usize, c: impl Fn(usize, usize) -> T) -> Matrix<T> {
    let mut r = Matrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            r[(i * n + j, j * n + i)] = c(i, j);
        }
    }
    r
}

/// `r(z)` as an `N²×N²` matrix.
pub fn r_matrix<T: Scalar>(variant: RVariant, n: usize, z: &T) -> Result<Matrix<T>> {
    if (z.clone() - T::one()).is_zero() {
        return Err(Error::AtPole(0));
    }
    Ok(from_coefficients(n, |i, j| variant.coefficient(i, j, z)))
}

/// Additive XXZ r-matrix: `coth ζ` on `i = j` and `e^{±ζ}/sinh ζ` off it,
/// equal to the multiplicative form at `z = e^{2ζ}`.
pub fn r_matrix_xxz_additive(n: usize, zeta: C64) -> Matrix<C64> {
    let sh = zeta.sinh();
    from_coefficients(n, |i, j| match j.cmp(&i) {
        std::cmp::Ordering::Equal => zeta.cosh() / sh,
        std::cmp::Ordering::Greater => zeta.exp() / sh,
        std::cmp::Ordering::Less => (-zeta).exp() / sh,
    })
}

/// Place the two tensor factors of `r` into slots `s` and `t` of
/// `Mat_N^{⊗3}` (slots numbered 0, 1, 2).
pub fn embed<T: Scalar>(r: &Matrix<T>, n: usize, s: usize, t: usize) -> Matrix<T> {
    assert!(s < 3 && t < 3 && s != t);
    let other = 3 - s - t;
    let dim = n * n * n;
    let digits = |x: usize| [x / (n * n), (x / n) % n, x % n];
    Matrix::from_fn(dim, dim, |row, col| {
        let a = digits(row);
        let b = digits(col);
        if a[other] != b[other] {
            return T::zero();
        }
        r[(a[s] * n + a[t], b[s] * n + b[t])].clone()
    })
}

/// Classical Yang–Baxter residual at `(z1, z2, z3)`.
///
/// The XXZ form is `[r12(z1/z2), r13(z1/z3)] + [r12(z1/z2), r23(z2/z3)]
/// + [r13(z1/z3), r23(z2/z3)]`; the twisted form replaces the last
/// commutator by `[r32(z3/z2), r13(z1/z3)]`.
pub fn cybe_residual<T: Scalar>(variant: RVariant, n: usize, z: [&T; 3]) -> Result<Matrix<T>> {
    let ratio = |a: usize, b: usize| z[a].clone() / z[b].clone();
    let r12 = embed(&r_matrix(variant, n, &ratio(0, 1))?, n, 0, 1);
    let r13 = embed(&r_matrix(variant, n, &ratio(0, 2))?, n, 0, 2);
    let first = &r12.commutator(&r13) + &r12.commutator(&embed(&r_matrix(variant, n, &ratio(1, 2))?, n, 1, 2));
    let last = match variant {
        RVariant::XxzMultiplicative => {
            let r23 = embed(&r_matrix(variant, n, &ratio(1, 2))?, n, 1, 2);
            r13.commutator(&r23)
        }
        RVariant::Twisted => {
            let r32 = embed(&r_matrix(variant, n, &ratio(2, 1))?, n, 2, 1);
            r32.commutator(&r13)
        }
    };
    Ok(&first + &last)
}

/// `tr_2(r(z) (1 ⊗ S))`.
pub fn partial_trace_action<T: Scalar>(r: &Matrix<T>, s: &Matrix<T>) -> Matrix<T> {
    let n = s.rows();
    Matrix::from_fn(n, n, |i, j| {
        let mut acc = T::zero();
        for k in 0..n {
            for l in 0..n {
                // (r (1⊗S))_{(i,k),(j,k)} summed over k
                acc = acc + r[(i * n + k, j * n + l)].clone() * s[(l, k)].clone();
            }
        }
        acc
    })
}
