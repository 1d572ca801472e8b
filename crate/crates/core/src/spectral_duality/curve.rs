use crate::error::{Error, Result};
use crate::exactnum::{char_poly, eval_poly, interpolate, Matrix, Scalar};
use crate::spectral_models::{MultiPoleLax, PoleSum};

/// `P(λ, z) = Σ c[i][j] λ^i z^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly<T> {
    pub coeffs: Vec<Vec<T>>,
}

impl<T: Scalar> BivariatePoly<T> {
    pub fn degree_lambda(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn degree_z(&self) -> usize {
        self.coeffs.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    pub fn eval(&self, lambda: &T, z: &T) -> T {
        let rows: Vec<T> = self.coeffs.iter().map(|r| eval_poly(r, z)).collect();
        eval_poly(&rows, lambda)
    }

    /// Swap the roles of the two variables.
    pub fn transpose(&self) -> Self {
        let a = self.coeffs.len();
        let b = self.coeffs.first().map_or(0, Vec::len);
        BivariatePoly {
            coeffs: (0..b)
                .map(|j| (0..a).map(|i| self.coeffs[i][j].clone()).collect())
                .collect(),
        }
    }

    /// Largest coefficient discrepancy; zero iff equal on exact backends.
    /// Missing coefficients count as zero.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let rows = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize, j: usize| {
            p.coeffs
                .get(i)
                .and_then(|r| r.get(j))
                .cloned()
                .unwrap_or_else(T::zero)
        };
        let mut worst: f64 = 0.0;
        for i in 0..rows {
            let cols = self
                .coeffs
                .get(i)
                .map_or(0, Vec::len)
                .max(other.coeffs.get(i).map_or(0, Vec::len));
            for j in 0..cols {
                let d = get(self, i, j) - get(other, i, j);
                if !d.is_zero() {
                    worst = worst.max(d.modulus().max(f64::MIN_POSITIVE));
                }
            }
        }
        worst
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BivariatePoly<U> {
        BivariatePoly {
            coeffs: self.coeffs.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }
}

/// Interpolation nodes `0, 1, -1, 2, -2, …` skipping the poles.
fn nodes<T: Scalar>(poles: &[T], count: usize) -> Vec<T> {
    let scale = poles.iter().map(T::modulus).fold(1.0, f64::max);
    let mut out = Vec::with_capacity(count);
    let mut k: i64 = 0;
    while out.len() < count {
        let v = if k % 2 == 0 { -(k / 2) } else { k / 2 + 1 };
        k += 1;
        let z = T::from_i64(v);
        // keep float nodes well away from the poles
        let clear = poles.iter().all(|p| {
            let d = z.clone() - p.clone();
            if T::EXACT {
                !d.is_zero()
            } else {
                d.modulus() > 1e-3 * scale
            }
        });
        if clear {
            out.push(z);
        }
    }
    out
}

fn cleared_column<T: Scalar>(sum: &PoleSum<T>, order: usize, z: &T) -> Result<Vec<T>> {
    let l = sum.evaluate(z)?;
    let mut factor = T::one();
    for p in &sum.poles {
        for _ in 0..order {
            factor = factor * (z.clone() - p.clone());
        }
    }
    // ascending powers of λ
    Ok(char_poly(&l)?
        .ascending()
        .into_iter()
        .map(|c| c * factor.clone())
        .collect())
}

/// `det(λ - L(z)) · ∏_k (z - z_k)^order` as a polynomial in `(λ, z)`.
///
/// The λ-dependence is exact from the characteristic polynomial; the
/// z-dependence is interpolated on `order·M + 1` nodes and, on exact
/// backends, confirmed at one further node.
pub fn spectral_poly_of<T: Scalar>(sum: &PoleSum<T>, order: usize) -> Result<BivariatePoly<T>> {
    let n = sum.size();
    let m = sum.poles.len();
    let count = order * m + 1;
    let zs = nodes(&sum.poles, count + 1);
    let mut samples = Vec::with_capacity(count + 1);
    for z in &zs {
        samples.push(cleared_column(sum, order, z)?);
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let ys: Vec<T> = samples[..count].iter().map(|s| s[i].clone()).collect();
        coeffs.push(interpolate(&zs[..count], &ys));
    }
    let poly = BivariatePoly { coeffs };
    if T::EXACT {
        let z = &zs[count];
        let check: Vec<T> = poly.coeffs.iter().map(|r| eval_poly(r, z)).collect();
        if check != samples[count] {
            return Err(Error::Invalid(format!(
                "cleared spectral polynomial exceeds z-degree {}",
                count - 1
            )));
        }
    }
    Ok(poly)
}

/// Cleared spectral polynomial `det(λ - L(z)) ∏(z - z_k)`.
pub fn spectral_poly<T: Scalar>(l: &MultiPoleLax<T>) -> Result<BivariatePoly<T>> {
    spectral_poly_of(&l.to_pole_sum(), 1)
}

/// Largest modulus of a 2×2 minor over all residues of `l`; zero iff every
/// residue has rank at most one.
pub fn residue_rank_defect<T: Scalar>(sum: &PoleSum<T>) -> f64 {
    sum.residues
        .iter()
        .map(Matrix::max_two_by_two_minor)
        .fold(0.0, f64::max)
}
