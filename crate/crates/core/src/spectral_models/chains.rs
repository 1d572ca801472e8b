use super::{check_distinct, check_nonzero, gauge_matrix_recursive, MultiPoleLax, SpectralKind};
use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Scalar};

/// One chain site: inhomogeneity and rank-one spin `B = x ⊗ y`.
///
/// For the XXZ chain `lower` holds the constant strictly lower part `B̄` of
/// the local Lax matrix `1 + B̄ + z_i B/(z - z_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Site<T> {
    pub inhomogeneity: T,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub lower: Option<Matrix<T>>,
}

impl<T: Scalar> Site<T> {
    fn spin(&self) -> Matrix<T> {
        Matrix::outer(&self.x, &self.y)
    }
}

fn check_sites<T: Scalar>(n: usize, sites: &[Site<T>]) -> Result<()> {
    for s in sites {
        if s.x.len() != n || s.y.len() != n {
            return Err(Error::Dimension("site spin does not match the twist".into()));
        }
        if let Some(b) = &s.lower {
            if b.rows() != n || b.cols() != n || b != &b.strictly_lower() {
                return Err(Error::Invalid("site constant part must be strictly lower N×N".into()));
            }
        }
    }
    let inh: Vec<T> = sites.iter().map(|s| s.inhomogeneity.clone()).collect();
    check_distinct(&inh, "inhomogeneities")
}

fn xxx_local<T: Scalar>(site: &Site<T>, lambda: &T) -> Result<Matrix<T>> {
    let d = lambda.clone() - site.inhomogeneity.clone();
    if d.is_zero() {
        return Err(Error::AtPole(0));
    }
    let n = site.x.len();
    Ok(&Matrix::identity(n) + &site.spin().scale(&(T::one() / d)))
}

fn xxz_local<T: Scalar>(site: &Site<T>, z: &T) -> Result<Matrix<T>> {
    let n = site.x.len();
    let d = z.clone() - site.inhomogeneity.clone();
    if d.is_zero() {
        return Err(Error::AtPole(0));
    }
    let mut m = &Matrix::identity(n) + &site.spin().scale(&(site.inhomogeneity.clone() / d));
    if let Some(b) = &site.lower {
        m = &m + b;
    }
    Ok(m)
}

/// Ordered product `L^{hi-1}(·) ⋯ L^{lo}(·)` of local matrices.
fn ordered<T: Scalar>(
    n: usize,
    sites: &[Site<T>],
    range: std::ops::Range<usize>,
    local: impl Fn(&Site<T>) -> Result<Matrix<T>>,
) -> Result<Matrix<T>> {
    let mut acc = Matrix::identity(n);
    for i in range {
        acc = &local(&sites[i])? * &acc;
    }
    Ok(acc)
}

/// `V L^M(λ) ⋯ L^1(λ)` by direct multiplication, `L^i(λ) = 1 + B^i/(λ - λ_i)`.
pub fn xxx_product<T: Scalar>(twist: &[T], sites: &[Site<T>], lambda: &T) -> Result<Matrix<T>> {
    let p = ordered(twist.len(), sites, 0..sites.len(), |s| xxx_local(s, lambda))?;
    Ok(p.diag_mul_left(twist))
}

/// The XXX monodromy in multi-pole form, with rank-one residues
/// `[∏_{j>i} L^j(λ_i)] B^i [∏_{j<i} L^j(λ_i)]`.
pub fn xxx_monodromy<T: Scalar>(twist: &[T], sites: &[Site<T>]) -> Result<MultiPoleLax<T>> {
    let n = twist.len();
    check_sites(n, sites)?;
    let m = sites.len();
    let mut xi = Matrix::zeros(n, m);
    let mut eta = Matrix::zeros(m, n);
    for i in 0..m {
        let at = &sites[i].inhomogeneity;
        let left = ordered(n, sites, i + 1..m, |s| xxx_local(s, at))?;
        let right = ordered(n, sites, 0..i, |s| xxx_local(s, at))?;
        let col = left.mul_vec(&sites[i].x);
        let row = right.vec_mul(&sites[i].y);
        for k in 0..n {
            xi[(k, i)] = col[k].clone();
            eta[(i, k)] = row[k].clone();
        }
    }
    let poles = sites.iter().map(|s| s.inhomogeneity.clone()).collect();
    MultiPoleLax::new(SpectralKind::XxxChain, twist.to_vec(), poles, xi, eta)
}

/// `V L^M(z) ⋯ L^1(z)` by direct multiplication, `L^i(z) = 1 + B̄^i + z_i B^i/(z - z_i)`.
pub fn xxz_product<T: Scalar>(twist: &[T], sites: &[Site<T>], z: &T) -> Result<Matrix<T>> {
    let p = ordered(twist.len(), sites, 0..sites.len(), |s| xxz_local(s, z))?;
    Ok(p.diag_mul_left(twist))
}

#[derive(Clone, Debug, PartialEq)]
pub struct XxzMonodromy<T> {
    /// `g⁻¹ T(z) g` in multi-pole form.
    pub lax: MultiPoleLax<T>,
    pub gauge: Matrix<T>,
}

/// XXZ monodromy gauged to `V(1 + Σ z_k S^k/(z - z_k))`.
///
/// `T(∞) = V(1 + Ū)` with `Ū` strictly lower; the gauge solves
/// `g⁻¹(V + VŪ)g = V`.
pub fn xxz_monodromy<T: Scalar>(twist: &[T], sites: &[Site<T>]) -> Result<XxzMonodromy<T>> {
    let n = twist.len();
    check_sites(n, sites)?;
    check_nonzero(twist, "twist entry")?;
    let poles: Vec<T> = sites.iter().map(|s| s.inhomogeneity.clone()).collect();
    check_nonzero(&poles, "inhomogeneity")?;
    let m = sites.len();
    let mut at_infinity = Matrix::identity(n);
    for s in sites {
        if let Some(b) = &s.lower {
            at_infinity = &(&Matrix::identity(n) + b) * &at_infinity;
        }
    }
    let u_bar = &at_infinity - &Matrix::identity(n);
    let s_bar = u_bar.diag_mul_left(twist);
    let g = gauge_matrix_recursive(twist, &s_bar)?;
    let gi = g.inverse()?;
    let vinv: Vec<T> = twist.iter().map(|v| T::one() / v.clone()).collect();
    let conj = (&gi.diag_mul_right(twist)).diag_mul_left(&vinv);
    let mut xi = Matrix::zeros(n, m);
    let mut eta = Matrix::zeros(m, n);
    for i in 0..m {
        let at = &sites[i].inhomogeneity;
        let left = ordered(n, sites, i + 1..m, |s| xxz_local(s, at))?;
        let right = ordered(n, sites, 0..i, |s| xxz_local(s, at))?;
        let col = conj.mul_vec(&left.mul_vec(&sites[i].x));
        let row = g.vec_mul(&right.vec_mul(&sites[i].y));
        for k in 0..n {
            xi[(k, i)] = col[k].clone();
            eta[(i, k)] = row[k].clone();
        }
    }
    let lax = MultiPoleLax::new(SpectralKind::XxzChain, twist.to_vec(), poles, xi, eta)?;
    Ok(XxzMonodromy { lax, gauge: g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;

    fn r(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn xxx_one_site() {
        let site = Site {
            inhomogeneity: r(0),
            x: vec![r(1), r(0)],
            y: vec![r(0), r(1)],
            lower: None,
        };
        let t = xxx_monodromy(&[r(1), r(1)], &[site]).unwrap();
        assert_eq!(
            t.evaluate(&r(2)).unwrap().to_rows(),
            vec![vec![r(1), q(1, 2)], vec![r(0), r(1)]]
        );
    }

    #[test]
    fn xxx_residue_form_matches_product() {
        let sites = vec![
            Site { inhomogeneity: r(1), x: vec![r(1), r(2), r(-1)], y: vec![q(1, 2), r(0), r(3)], lower: None },
            Site { inhomogeneity: r(-2), x: vec![r(0), r(1), r(1)], y: vec![r(2), r(-1), q(1, 3)], lower: None },
            Site { inhomogeneity: q(1, 2), x: vec![r(3), r(1), r(0)], y: vec![r(1), r(1), r(1)], lower: None },
        ];
        let twist = vec![r(2), q(-1, 3), r(5)];
        let t = xxx_monodromy(&twist, &sites).unwrap();
        for z in [r(7), q(-5, 2), q(11, 3)] {
            assert_eq!(t.evaluate(&z).unwrap(), xxx_product(&twist, &sites, &z).unwrap());
        }
    }

    #[test]
    fn xxz_residue_form_is_gauge_of_product() {
        let low = |v: i64| Matrix::from_rows(vec![vec![r(0), r(0)], vec![r(v), r(0)]]).unwrap();
        let sites = vec![
            Site { inhomogeneity: r(2), x: vec![r(1), r(3)], y: vec![q(1, 2), r(-1)], lower: Some(low(1)) },
            Site { inhomogeneity: q(-1, 2), x: vec![r(2), r(1)], y: vec![r(1), r(4)], lower: Some(low(-3)) },
        ];
        let twist = vec![r(3), q(1, 2)];
        let t = xxz_monodromy(&twist, &sites).unwrap();
        let gi = t.gauge.inverse().unwrap();
        for z in [r(5), q(-7, 3)] {
            let direct = &(&gi * &xxz_product(&twist, &sites, &z).unwrap()) * &t.gauge;
            assert_eq!(t.lax.evaluate(&z).unwrap(), direct);
        }
    }
}
