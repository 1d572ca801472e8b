//! Multi-pole Lax matrices of Gaudin models and spin chains.

mod chains;
mod gauge;
mod rmatrix;
mod trig_gaudin;

pub use chains::{xxx_monodromy, xxx_product, xxz_monodromy, xxz_product, Site, XxzMonodromy};
pub use gauge::{gauge_matrix, gauge_matrix_recursive};
pub use rmatrix::{cybe_residual, embed, partial_trace_action, r_matrix, r_matrix_xxz_additive, RVariant};
pub use trig_gaudin::{ReducedTrigGaudin, TrigGaudinRaw};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Scalar};

/// Relative tolerance for pole proximity on the floating backend.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralKind {
    /// `Λ + Σ ξ^k⊗η^k/(z - z_k)`
    RationalGaudin,
    /// `Λ + Σ z_k ξ^k⊗η^k/(z - z_k)`
    TrigGaudinReduced,
    /// `V(1 + Σ ξ^k⊗η^k/(z - z_k))`
    XxxChain,
    /// `V(1 + Σ z_k ξ^k⊗η^k/(z - z_k))`
    XxzChain,
}

impl SpectralKind {
    pub const ALL: [SpectralKind; 4] = [
        SpectralKind::RationalGaudin,
        SpectralKind::TrigGaudinReduced,
        SpectralKind::XxxChain,
        SpectralKind::XxzChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpectralKind::RationalGaudin => "rational_gaudin",
            SpectralKind::TrigGaudinReduced => "trig_gaudin_reduced",
            SpectralKind::XxxChain => "xxx_chain",
            SpectralKind::XxzChain => "xxz_chain",
        }
    }

    pub fn from_name(s: &str) -> Option<SpectralKind> {
        SpectralKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Residues carry a factor `z_k`.
    pub fn weighted(self) -> bool {
        matches!(self, SpectralKind::TrigGaudinReduced | SpectralKind::XxzChain)
    }

    /// The twist multiplies the pole part from the left.
    pub fn chain(self) -> bool {
        matches!(self, SpectralKind::XxxChain | SpectralKind::XxzChain)
    }
}

impl std::fmt::Display for SpectralKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A multi-pole Lax matrix with diagonal twist and rank-one residues
/// `S^k = ξ^k ⊗ η^k`, where `ξ^k` is column `k` of the N×M matrix `xi` and
/// `η^k` is row `k` of the M×N matrix `eta`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoleLax<T> {
    pub kind: SpectralKind,
    pub twist: Vec<T>,
    pub poles: Vec<T>,
    pub xi: Matrix<T>,
    pub eta: Matrix<T>,
}

/// `C + Σ R_a/(z - z_a)` with arbitrary residues.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleSum<T> {
    pub constant: Matrix<T>,
    pub poles: Vec<T>,
    pub residues: Vec<Matrix<T>>,
}

pub fn check_distinct<T: Scalar>(v: &[T], what: &'static str) -> Result<()> {
    let scale = v.iter().map(T::modulus).fold(0.0, f64::max);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if (v[i].clone() - v[j].clone()).is_negligible(scale, POLE_TOL) {
                return Err(Error::Coincident { what, i, j });
            }
        }
    }
    Ok(())
}

pub fn check_nonzero<T: Scalar>(v: &[T], what: &'static str) -> Result<()> {
    let scale = v.iter().map(T::modulus).fold(0.0, f64::max);
    if v.iter().any(|x| x.is_negligible(scale, POLE_TOL)) {
        return Err(Error::ZeroValue(what));
    }
    Ok(())
}

impl<T: Scalar> MultiPoleLax<T> {
    pub fn new(
        kind: SpectralKind,
        twist: Vec<T>,
        poles: Vec<T>,
        xi: Matrix<T>,
        eta: Matrix<T>,
    ) -> Result<Self> {
        let (n, m) = (twist.len(), poles.len());
        if xi.rows() != n || xi.cols() != m || eta.rows() != m || eta.cols() != n {
            return Err(Error::Dimension(format!(
                "twist {n}, poles {m}, xi {}x{}, eta {}x{}",
                xi.rows(),
                xi.cols(),
                eta.rows(),
                eta.cols()
            )));
        }
        check_distinct(&poles, "poles")?;
        let l = MultiPoleLax {
            kind,
            twist,
            poles,
            xi,
            eta,
        };
        Ok(l)
    }

    pub fn size(&self) -> usize {
        self.twist.len()
    }

    pub fn num_poles(&self) -> usize {
        self.poles.len()
    }

    /// `S^k = ξ^k ⊗ η^k`.
    pub fn residue_factor(&self, k: usize) -> Matrix<T> {
        Matrix::outer(&self.xi.col(k), &self.eta.row(k))
    }

    pub fn twist_matrix(&self) -> Matrix<T> {
        Matrix::from_diag(&self.twist)
    }

    /// Rewrite as `C + Σ R_k/(z - z_k)`.
    pub fn to_pole_sum(&self) -> PoleSum<T> {
        let v = self.twist_matrix();
        let residues = (0..self.num_poles())
            .map(|k| {
                let mut r = self.residue_factor(k);
                if self.kind.weighted() {
                    r = r.scale(&self.poles[k]);
                }
                if self.kind.chain() {
                    r = r.diag_mul_left(&self.twist);
                }
                r
            })
            .collect();
        PoleSum {
            constant: v,
            poles: self.poles.clone(),
            residues,
        }
    }

    pub fn evaluate(&self, z: &T) -> Result<Matrix<T>> {
        self.to_pole_sum().evaluate(z)
    }

    /// Value at `z = ∞`.
    pub fn at_infinity(&self) -> Matrix<T> {
        self.twist_matrix()
    }
}

impl<T: Scalar> PoleSum<T> {
    pub fn size(&self) -> usize {
        self.constant.rows()
    }

    pub fn evaluate(&self, z: &T) -> Result<Matrix<T>> {
        let scale = self.poles.iter().map(T::modulus).fold(z.modulus(), f64::max);
        let mut acc = self.constant.clone();
        for (k, (zk, r)) in self.poles.iter().zip(&self.residues).enumerate() {
            let d = z.clone() - zk.clone();
            if d.is_negligible(scale, POLE_TOL) {
                return Err(Error::AtPole(k));
            }
            acc = &acc + &r.scale(&(T::one() / d));
        }
        Ok(acc)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> PoleSum<U> {
        PoleSum {
            constant: self.constant.map(f),
            poles: self.poles.iter().map(f).collect(),
            residues: self.residues.iter().map(|r| r.map(f)).collect(),
        }
    }

    /// `A⁻¹ (·) A` applied to every matrix coefficient.
    pub fn conjugate(&self, a: &Matrix<T>) -> Result<PoleSum<T>> {
        let ai = a.inverse()?;
        let c = |m: &Matrix<T>| &(&ai * m) * a;
        Ok(PoleSum {
            constant: c(&self.constant),
            poles: self.poles.clone(),
            residues: self.residues.iter().map(c).collect(),
        })
    }
}
