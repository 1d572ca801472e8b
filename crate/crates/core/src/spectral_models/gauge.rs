use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Scalar};

fn twist_gaps<T: Scalar>(lambda: &[T]) -> Result<()> {
    super::check_distinct(lambda, "twist eigenvalues")
}

/// Lower unitriangular `g` with `g⁻¹(Λ + S̄)g = Λ`, where `S̄` is the
/// strictly lower part of `Σ_k ξ^k⊗η^k`, from the closed product formula.
pub fn gauge_matrix<T: Scalar>(lambda: &[T], xi: &Matrix<T>, eta: &Matrix<T>) -> Result<Matrix<T>> {
    let n = lambda.len();
    if xi.rows() != n || eta.cols() != n || xi.cols() != eta.rows() {
        return Err(Error::Dimension("gauge factors do not match the twist".into()));
    }
    twist_gaps(lambda)?;
    let mut g = Matrix::<T>::identity(n);
    for j in 0..n {
        let eta_j = eta.col(j);
        for i in j + 1..n {
            // row vector ξ_i (1 + η_{i-1}ξ_{i-1}/(λ_j-λ_{i-1})) ... (1 + η_{j+1}ξ_{j+1}/(λ_j-λ_{j+1}))
            let mut v = xi.row(i);
            for p in (j + 1..i).rev() {
                let eta_p = eta.col(p);
                let dot = v
                    .iter()
                    .zip(&eta_p)
                    .fold(T::zero(), |a, (x, y)| a + x.clone() * y.clone());
                let f = dot / (lambda[j].clone() - lambda[p].clone());
                let xi_p = xi.row(p);
                for (vk, xk) in v.iter_mut().zip(xi_p) {
                    *vk = vk.clone() + f.clone() * xk;
                }
            }
            let dot = v
                .iter()
                .zip(&eta_j)
                .fold(T::zero(), |a, (x, y)| a + x.clone() * y.clone());
            g[(i, j)] = dot / (lambda[j].clone() - lambda[i].clone());
        }
    }
    Ok(g)
}

/// The same gauge computed column by column from `S̄` alone.
pub fn gauge_matrix_recursive<T: Scalar>(lambda: &[T], s_lower: &Matrix<T>) -> Result<Matrix<T>> {
    let n = lambda.len();
    if s_lower.rows() != n || s_lower.cols() != n {
        return Err(Error::Dimension("gauge source does not match the twist".into()));
    }
    twist_gaps(lambda)?;
    let mut g = Matrix::<T>::identity(n);
    for j in 0..n {
        for k in 1..n - j {
            let mut acc = s_lower[(j + k, j)].clone();
            for d in 1..k {
                acc = acc + s_lower[(j + k, j + d)].clone() * g[(j + d, j)].clone();
            }
            g[(j + k, j)] = acc / (lambda[j].clone() - lambda[j + k].clone());
        }
    }
    Ok(g)
}
