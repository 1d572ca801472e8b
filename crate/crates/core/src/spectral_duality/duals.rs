use super::curve::{spectral_poly, BivariatePoly};
use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Scalar};
use crate::spectral_models::{check_distinct, check_nonzero, MultiPoleLax, SpectralKind};

fn expect_kind<T>(l: &MultiPoleLax<T>, kind: SpectralKind) -> Result<()> {
    if l.kind != kind {
        return Err(Error::WrongKind {
            expected: kind.name().into(),
            got: l.kind.name().into(),
        });
    }
    Ok(())
}

/// Exchange twist and poles and swap the roles of `ξ` and `η`.
fn swap<T: Scalar>(l: &MultiPoleLax<T>, kind: SpectralKind) -> Result<MultiPoleLax<T>> {
    check_distinct(&l.twist, "twist entries")?;
    MultiPoleLax::new(kind, l.poles.clone(), l.twist.clone(), l.eta.clone(), l.xi.clone())
}

/// Rational Gaudin dual `Z + η(λ - Λ)⁻¹ξ`: M×M, twist `Z`, poles `λ_i`.
pub fn dual_rational_gaudin<T: Scalar>(l: &MultiPoleLax<T>) -> Result<MultiPoleLax<T>> {
    expect_kind(l, SpectralKind::RationalGaudin)?;
    swap(l, SpectralKind::RationalGaudin)
}

/// Reduced trigonometric Gaudin to the XXX chain `Z(1 + η(λ - Λ)⁻¹ξ)`.
pub fn dual_tgaudin_to_xxx<T: Scalar>(l: &MultiPoleLax<T>) -> Result<MultiPoleLax<T>> {
    expect_kind(l, SpectralKind::TrigGaudinReduced)?;
    check_nonzero(&l.poles, "trigonometric pole")?;
    swap(l, SpectralKind::XxxChain)
}

/// XXZ self-duality `Z(1 + ηV(λ - V)⁻¹ξ)`.
pub fn dual_xxz_chain<T: Scalar>(l: &MultiPoleLax<T>) -> Result<MultiPoleLax<T>> {
    expect_kind(l, SpectralKind::XxzChain)?;
    check_nonzero(&l.twist, "twist entry")?;
    check_nonzero(&l.poles, "inhomogeneity")?;
    swap(l, SpectralKind::XxzChain)
}

/// Dual for any kind that has one (the XXX chain is only a target).
pub fn dual_of<T: Scalar>(l: &MultiPoleLax<T>) -> Result<MultiPoleLax<T>> {
    match l.kind {
        SpectralKind::RationalGaudin => dual_rational_gaudin(l),
        SpectralKind::TrigGaudinReduced => dual_tgaudin_to_xxx(l),
        SpectralKind::XxzChain => dual_xxz_chain(l),
        SpectralKind::XxxChain => Err(Error::WrongKind {
            expected: "rational_gaudin, trig_gaudin_reduced or xxz_chain".into(),
            got: l.kind.name().into(),
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveComparison<T> {
    pub original: BivariatePoly<T>,
    /// The dual's polynomial with its variables exchanged.
    pub dual_swapped: BivariatePoly<T>,
    /// Largest coefficient discrepancy; exactly zero when the curves coincide
    /// on an exact backend.
    pub max_diff: f64,
}

/// Compare `P(λ, z)` of `l` with `P̃(z, λ)` of its dual.
pub fn compare_curves<T: Scalar>(l: &MultiPoleLax<T>, dual: &MultiPoleLax<T>) -> Result<CurveComparison<T>> {
    let original = spectral_poly(l)?;
    let dual_swapped = spectral_poly(dual)?.transpose();
    let max_diff = original.max_diff(&dual_swapped);
    Ok(CurveComparison {
        original,
        dual_swapped,
        max_diff,
    })
}

/// `det(1_N - XY)` and `det(1_M - YX)` for the factorization of
/// `det(λ - L(z))/det(λ - Λ)`; equal by the factor-swap identity.
pub fn factor_swap_dets<T: Scalar>(l: &MultiPoleLax<T>, lambda: &T, z: &T) -> Result<(T, T)> {
    let n = l.size();
    let m = l.num_poles();
    let lam_inv: Vec<T> = l
        .twist
        .iter()
        .map(|v| {
            let d = lambda.clone() - v.clone();
            if d.is_zero() {
                Err(Error::AtPole(0))
            } else {
                Ok(T::one() / d)
            }
        })
        .collect::<Result<_>>()?;
    let z_inv: Vec<T> = l
        .poles
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let d = z.clone() - p.clone();
            if d.is_zero() {
                Err(Error::AtPole(k))
            } else {
                Ok(T::one() / d)
            }
        })
        .collect::<Result<_>>()?;
    let mut x = l.xi.diag_mul_left(&lam_inv);
    if l.kind.chain() {
        x = x.diag_mul_left(&l.twist);
    }
    let mut y = l.eta.diag_mul_left(&z_inv);
    if l.kind.weighted() {
        y = y.diag_mul_left(&l.poles);
    }
    let dn = (&Matrix::identity(n) - &(&x * &y)).det()?;
    let dm = (&Matrix::identity(m) - &(&y * &x)).det()?;
    Ok((dn, dm))
}
