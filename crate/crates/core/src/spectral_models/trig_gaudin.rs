use super::{gauge_matrix, MultiPoleLax, SpectralKind};
use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Scalar};

/// Trigonometric Gaudin Lax matrix before gauging:
/// `Λ + S̄ + Σ z_k ξ^k⊗η^k/(z - z_k)` with `S̄` the strictly lower part of `Σ_k S^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigGaudinRaw<T> {
    pub twist: Vec<T>,
    pub poles: Vec<T>,
    pub xi: Matrix<T>,
    pub eta: Matrix<T>,
}

/// Reduced form together with the gauge that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedTrigGaudin<T> {
    pub lax: MultiPoleLax<T>,
    pub gauge: Matrix<T>,
}

impl<T: Scalar> TrigGaudinRaw<T> {
    pub fn new(twist: Vec<T>, poles: Vec<T>, xi: Matrix<T>, eta: Matrix<T>) -> Result<Self> {
        // reuse the shape and pole checks
        let l = MultiPoleLax::new(SpectralKind::TrigGaudinReduced, twist, poles, xi, eta)?;
        super::check_nonzero(&l.poles, "trigonometric pole")?;
        Ok(TrigGaudinRaw {
            twist: l.twist,
            poles: l.poles,
            xi: l.xi,
            eta: l.eta,
        })
    }

    /// `S̄`, the strictly lower part of `ξ η`.
    pub fn strictly_lower_sum(&self) -> Matrix<T> {
        (&self.xi * &self.eta).strictly_lower()
    }

    pub fn evaluate(&self, z: &T) -> Result<Matrix<T>> {
        let base = MultiPoleLax {
            kind: SpectralKind::TrigGaudinReduced,
            twist: self.twist.clone(),
            poles: self.poles.clone(),
            xi: self.xi.clone(),
            eta: self.eta.clone(),
        };
        Ok(&base.evaluate(z)? + &self.strictly_lower_sum())
    }

    /// Gauge away `S̄`: `ξ̆ = g⁻¹ξ`, `η̆ = ηg`.
    pub fn reduce(&self) -> Result<ReducedTrigGaudin<T>> {
        let g = gauge_matrix(&self.twist, &self.xi, &self.eta)?;
        let gi = g.inverse().map_err(|_| Error::Gauge("gauge is not invertible".into()))?;
        let lax = MultiPoleLax::new(
            SpectralKind::TrigGaudinReduced,
            self.twist.clone(),
            self.poles.clone(),
            &gi * &self.xi,
            &self.eta * &g,
        )?;
        Ok(ReducedTrigGaudin { lax, gauge: g })
    }
}
