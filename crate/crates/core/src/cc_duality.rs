//! Gaudin and Schlesinger connections built from the rational CM Lax matrix,
//! and their quadratic Hamiltonians.

use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Scalar};
use crate::manybody::{cm_hamiltonian_closed_form, lax, ModelKind, PhasePoint};
use crate::spectral_models::{check_distinct, PoleSum};

/// Coefficients of `½ tr L(z)² = H_0 + Σ_a [C_a/(z-z_a)² + H_a/(z-z_a)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianExpansion<T> {
    pub casimirs: Vec<T>,
    pub hamiltonians: Vec<T>,
    pub h0: T,
}

fn tr_prod<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc = acc + a[(i, j)].clone() * b[(j, i)].clone();
        }
    }
    acc
}

/// `H_a = tr(C R_a) + Σ_{c≠a} tr(R_a R_c)/(z_a - z_c)`.
pub fn gaudin_hamiltonian<T: Scalar>(sum: &PoleSum<T>, a: usize) -> T {
    let mut h = tr_prod(&sum.constant, &sum.residues[a]);
    for c in 0..sum.poles.len() {
        if c != a {
            h = h + tr_prod(&sum.residues[a], &sum.residues[c])
                / (sum.poles[a].clone() - sum.poles[c].clone());
        }
    }
    h
}

/// Expand `½ tr L²` and confirm the expansion reproduces it at three points.
pub fn expand_hamiltonians<T: Scalar>(sum: &PoleSum<T>) -> Result<HamiltonianExpansion<T>> {
    check_distinct(&sum.poles, "poles")?;
    let half = T::from_ratio(1, 2);
    let m = sum.poles.len();
    let casimirs: Vec<T> = sum
        .residues
        .iter()
        .map(|r| tr_prod(r, r) * half.clone())
        .collect();
    let hamiltonians: Vec<T> = (0..m).map(|a| gaudin_hamiltonian(sum, a)).collect();
    let h0 = tr_prod(&sum.constant, &sum.constant) * half.clone();
    let exp = HamiltonianExpansion {
        casimirs,
        hamiltonians,
        h0,
    };
    let reach = sum.poles.iter().map(T::modulus).fold(0.0, f64::max).ceil() as i64;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for k in 1..=3 {
        let z = T::from_i64(reach + 2 * k + 1);
        let l = sum.evaluate(&z)?;
        let direct = tr_prod(&l, &l) * half.clone();
        let mut series = exp.h0.clone();
        for a in 0..m {
            let d = z.clone() - sum.poles[a].clone();
            series = series
                + exp.casimirs[a].clone() / (d.clone() * d.clone())
                + exp.hamiltonians[a].clone() / d;
        }
        let diff = direct.clone() - series;
        if !diff.is_zero() {
            worst = worst.max(diff.modulus());
        }
        scale = scale.max(direct.modulus());
    }
    let ok = if T::EXACT { worst == 0.0 } else { worst <= 1e-9 * scale };
    if !ok {
        return Err(Error::InconsistentExpansion(worst));
    }
    Ok(exp)
}

fn expect_cm<T: Scalar>(x: &PhasePoint<T>) -> Result<Matrix<T>> {
    lax(ModelKind::RationalCm, x)
}

/// `L^CM + Σ_a ν Ō^a/(z - q_a)` with `Ō^a_ij = -(1-δ_ij)δ_aj`.
pub fn gaudin_connection<T: Scalar>(x: &PhasePoint<T>) -> Result<PoleSum<T>> {
    let l = expect_cm(x)?;
    let n = x.n();
    let nu = x.coupling.clone();
    let residues = (0..n)
        .map(|a| Matrix::from_fn(n, n, |i, j| if j == a && i != a { -nu.clone() } else { T::zero() }))
        .collect();
    Ok(PoleSum {
        constant: l,
        poles: x.q.clone(),
        residues,
    })
}

/// The same with residues `O^a = νŌ^a - E_aa`.
pub fn schlesinger_connection<T: Scalar>(x: &PhasePoint<T>) -> Result<PoleSum<T>> {
    let mut s = gaudin_connection(x)?;
    for (a, r) in s.residues.iter_mut().enumerate() {
        r[(a, a)] = -T::one();
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CcReport<T> {
    pub h0: T,
    pub cm_hamiltonian: T,
    pub gaudin: HamiltonianExpansion<T>,
    pub schlesinger: HamiltonianExpansion<T>,
    /// `-p_a`, the exact value of the Schlesinger Hamiltonians.
    pub expected_schlesinger: Vec<T>,
    /// `-ν p_a`, the coupling-weighted form sometimes quoted.
    pub coupling_weighted: Vec<T>,
    /// `∂H^Sch_a/∂p_b` by exact differences.
    pub dh_dp: Matrix<T>,
    /// `∂H^Sch_a/∂q_b` by exact differences.
    pub dh_dq: Matrix<T>,
}

impl<T: Scalar> CcReport<T> {
    pub fn h0_matches(&self) -> bool {
        (self.h0.clone() - self.cm_hamiltonian.clone()).is_negligible(self.h0.modulus(), 1e-12)
    }

    pub fn gaudin_vanishes(&self) -> bool {
        self.gaudin
            .hamiltonians
            .iter()
            .all(|h| h.is_negligible(self.h0.modulus(), 1e-12))
    }

    pub fn schlesinger_matches(&self) -> bool {
        self.schlesinger
            .hamiltonians
            .iter()
            .zip(&self.expected_schlesinger)
            .all(|(h, e)| (h.clone() - e.clone()).is_negligible(e.modulus(), 1e-12))
    }

    /// `∂H_a/∂p_b = -δ_ab` and `∂H_a/∂q_b = 0`.
    pub fn canonical(&self) -> bool {
        let n = self.dh_dp.rows();
        let minus_id = Matrix::<T>::identity(n).scale(&-T::one());
        self.dh_dp.max_diff(&minus_id) <= if T::EXACT { 0.0 } else { 1e-9 }
            && self.dh_dq.max_modulus() <= if T::EXACT { 0.0 } else { 1e-9 }
    }

    pub fn all_hold(&self) -> bool {
        self.h0_matches() && self.gaudin_vanishes() && self.schlesinger_matches() && self.canonical()
    }
}

fn schlesinger_hamiltonians<T: Scalar>(x: &PhasePoint<T>) -> Result<Vec<T>> {
    Ok(expand_hamiltonians(&schlesinger_connection(x)?)?.hamiltonians)
}

/// Compare the Gaudin and Schlesinger Hamiltonians of the rational CM
/// connections with the CM data.
pub fn verify_cc_identifications<T: Scalar>(x: &PhasePoint<T>) -> Result<CcReport<T>> {
    let gaudin = expand_hamiltonians(&gaudin_connection(x)?)?;
    let schlesinger = expand_hamiltonians(&schlesinger_connection(x)?)?;
    let n = x.n();
    // H^Sch is affine in p; the unit difference is the derivative
    let mut dh_dp = Matrix::zeros(n, n);
    let mut dh_dq = Matrix::zeros(n, n);
    let step_q = T::from_ratio(1, 1009);
    for b in 0..n {
        let mut y = x.clone();
        y.p[b] = y.p[b].clone() + T::one();
        let hp = schlesinger_hamiltonians(&y)?;
        let mut y = x.clone();
        y.q[b] = y.q[b].clone() + step_q.clone();
        let hq = schlesinger_hamiltonians(&y)?;
        for a in 0..n {
            dh_dp[(a, b)] = hp[a].clone() - schlesinger.hamiltonians[a].clone();
            dh_dq[(a, b)] = (hq[a].clone() - schlesinger.hamiltonians[a].clone()) / step_q.clone();
        }
    }
    Ok(CcReport {
        h0: gaudin.h0.clone(),
        cm_hamiltonian: cm_hamiltonian_closed_form(ModelKind::RationalCm, x)?,
        expected_schlesinger: x.p.iter().map(|p| -p.clone()).collect(),
        coupling_weighted: x.p.iter().map(|p| -(x.coupling.clone() * p.clone())).collect(),
        gaudin,
        schlesinger,
        dh_dp,
        dh_dq,
    })
}
