use super::curve::spectral_poly;
use super::duals::dual_of;
use crate::error::{Error, Result};
use crate::exactnum::{eig_sorted, Matrix, Scalar, C64};
use crate::manybody::{lax, off_diagonal_ones, rational_rs_factor, trig_rs_factor, ModelKind, PhasePoint};
use crate::pq_duality::dualize;
use crate::spectral_models::{MultiPoleLax, PoleSum, SpectralKind};

/// The z-dependent gauge transform of the Lax matrix, by direct conjugation:
/// `(z-Q)L(z-Q)⁻¹` (rational CM), `(z-W)⁻¹L(z-W)` (CMS),
/// `(z-W)L(z-W)⁻¹` (trigonometric RS).
pub fn fictitious_gauge<T: Scalar>(kind: ModelKind, x: &PhasePoint<T>, z: &T) -> Result<Matrix<T>> {
    let l = lax(kind, x)?;
    let shift: Vec<T> = x.q.iter().map(|q| z.clone() - q.clone()).collect();
    if let Some(k) = shift.iter().position(T::is_zero) {
        return Err(Error::AtPole(k));
    }
    let inv: Vec<T> = shift.iter().map(|s| T::one() / s.clone()).collect();
    match kind {
        ModelKind::RationalCm | ModelKind::TrigRs => Ok(l.diag_mul_left(&shift).diag_mul_right(&inv)),
        ModelKind::TrigCms => Ok(l.diag_mul_left(&inv).diag_mul_right(&shift)),
        ModelKind::RationalRs => Err(no_fictitious(kind)),
    }
}

fn no_fictitious(kind: ModelKind) -> Error {
    Error::WrongKind {
        expected: "rational_cm, trig_cms or trig_rs".into(),
        got: kind.name().into(),
    }
}

/// The same transform written as `L + Σ_a R_a/(z - x_a)` with rank-one residues.
pub fn fictitious_pole_sum<T: Scalar>(kind: ModelKind, x: &PhasePoint<T>) -> Result<PoleSum<T>> {
    let l = lax(kind, x)?;
    let n = x.n();
    let nu = x.coupling.clone();
    let residues = match kind {
        ModelKind::RationalCm => (0..n)
            .map(|a| Matrix::from_fn(n, n, |i, j| if j == a && i != a { -nu.clone() } else { T::zero() }))
            .collect(),
        ModelKind::TrigCms => (0..n)
            .map(|a| {
                Matrix::from_fn(n, n, |i, j| {
                    if i == a && j != a {
                        -(nu.clone() * x.q[j].clone())
                    } else {
                        T::zero()
                    }
                })
            })
            .collect(),
        ModelKind::TrigRs => {
            // column a of [L, W]
            let lw = &l.diag_mul_right(&x.q) - &l.diag_mul_left(&x.q);
            (0..n)
                .map(|a| Matrix::from_fn(n, n, |i, j| if j == a { lw[(i, a)].clone() } else { T::zero() }))
                .collect()
        }
        ModelKind::RationalRs => return Err(no_fictitious(kind)),
    };
    Ok(PoleSum {
        constant: l,
        poles: x.q.clone(),
        residues,
    })
}

/// Multi-pole form of the transformed Lax matrix in the eigenbasis `Ψ` of `L`.
#[derive(Clone, Debug)]
pub struct FictitiousLax {
    pub lax: MultiPoleLax<C64>,
    pub psi: Matrix<C64>,
    pub eigenvalues: Vec<C64>,
}

/// `Ψ⁻¹ L'(z) Ψ` as a rational Gaudin (rational CM), reduced trigonometric
/// Gaudin (CMS) or XXZ (trigonometric RS) Lax matrix.
pub fn fictitious_lax(kind: ModelKind, x: &PhasePoint<C64>) -> Result<FictitiousLax> {
    let l = lax(kind, x)?;
    let e = eig_sorted(&l)?;
    let psi = e.vectors;
    let psi_inv = psi.inverse()?;
    let n = x.n();
    let nu = x.coupling;
    let o = off_diagonal_ones::<C64>(n);
    let (sk, xi, eta) = match kind {
        ModelKind::RationalCm => (SpectralKind::RationalGaudin, (&psi_inv * &o).scale(&-nu), psi.clone()),
        ModelKind::TrigCms => {
            let winv: Vec<C64> = x.q.iter().map(|w| C64::one() / w).collect();
            let eta = &o.diag_mul_left(&winv).diag_mul_right(&x.q) * &psi;
            (SpectralKind::TrigGaudinReduced, psi_inv.scale(&-nu), eta)
        }
        ModelKind::TrigRs => {
            let lw = &l.diag_mul_right(&x.q) - &l.diag_mul_left(&x.q);
            let xi = &(&psi_inv * &l.inverse()?) * &lw;
            let winv: Vec<C64> = x.q.iter().map(|w| C64::one() / w).collect();
            (SpectralKind::XxzChain, xi, psi.diag_mul_left(&winv))
        }
        ModelKind::RationalRs => return Err(no_fictitious(kind)),
    };
    let lax = MultiPoleLax::new(sk, e.values.clone(), x.q.clone(), xi, eta)?;
    Ok(FictitiousLax {
        lax,
        psi,
        eigenvalues: e.values,
    })
}

/// Stage residuals of the duality computed through the spectral route.
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub dual_kind: ModelKind,
    pub dual: PhasePoint<C64>,
    /// `(stage, relative residual)` in execution order.
    pub stages: Vec<(&'static str, f64)>,
    /// Largest relative coordinate distance from the direct map.
    pub agreement: f64,
}

fn rel(a: &Matrix<C64>, b: &Matrix<C64>) -> f64 {
    (a - b).frobenius() / b.frobenius().max(1.0)
}

fn sample_points(v: &[C64]) -> [C64; 2] {
    let r = v.iter().map(|x| x.norm()).fold(1.0, f64::max);
    [C64::new(2.0 * r + 1.0, 0.5), C64::new(-1.5 * r - 2.0, 1.25)]
}

fn first_row_gauge(k: &Matrix<C64>, target: &Matrix<C64>) -> Vec<C64> {
    let n = k.rows();
    let scale = target.max_modulus().max(1.0);
    let mut d = vec![C64::one(); n];
    for j in 1..n {
        if target[(0, j)].norm() > 1e-10 * scale && k[(0, j)].norm() > 1e-10 * scale {
            d[j] = k[(0, j)] / target[(0, j)];
        }
    }
    d
}

fn gauged_distance(k: &Matrix<C64>, target: &Matrix<C64>, d: &[C64]) -> f64 {
    let dinv: Vec<C64> = d.iter().map(|x| C64::one() / x).collect();
    rel(&k.diag_mul_left(d).diag_mul_right(&dinv), target)
}

/// Compute the action-angle dual through fictitious-parameter form, spectral
/// duality and inverse gauge, checking each stage and comparing with the
/// direct map.
pub fn pq_via_spectral(kind: ModelKind, x: &PhasePoint<C64>) -> Result<PipelineOutcome> {
    let mut stages = Vec::new();
    let f = fictitious_lax(kind, x).map_err(|e| e.at_stage("fictitious"))?;
    let psi = &f.psi;
    let psi_inv = psi.inverse()?;
    let zs = sample_points(&x.q);
    let mut worst: f64 = 0.0;
    for z in &zs {
        let direct = &(&psi_inv * &fictitious_gauge(kind, x, z)?) * psi;
        worst = worst.max(rel(&f.lax.evaluate(z)?, &direct));
    }
    stages.push(("fictitious-form", worst));

    let dual = dual_of(&f.lax).map_err(|e| e.at_stage("spectral-dual"))?;
    let c0 = spectral_poly(&f.lax)?;
    let c1 = spectral_poly(&dual)?.transpose();
    let scale = c0.coeffs.iter().flatten().map(|c| c.norm()).fold(1.0, f64::max);
    stages.push(("curve", c0.max_diff(&c1) / scale));

    // undo the λ-dependent gauge on the dual side
    let qt = Matrix::from_diag(&f.eigenvalues);
    let undo = |lam: &C64| -> Result<Matrix<C64>> {
        let shift = &Matrix::identity(x.n()).scale(lam) - &qt;
        let conj = &(&psi_inv * &dual.evaluate(lam)?) * psi;
        Ok(match kind {
            ModelKind::RationalCm | ModelKind::TrigRs => &(&shift * &conj) * &shift.inverse()?,
            _ => &(&shift.inverse()? * &conj) * &shift,
        })
    };
    let lams = sample_points(&f.eigenvalues);
    let k0 = undo(&lams[0])?;
    let k1 = undo(&lams[1])?;
    stages.push(("spectral-independence", rel(&k1, &k0)));

    let n = x.n();
    let (dual_point, target, d) = match kind {
        ModelKind::RationalCm => {
            let pt = PhasePoint::new(f.eigenvalues.clone(), k0.diag(), -x.coupling)?;
            let sums: Vec<C64> = (0..n).map(|j| psi.col(j).into_iter().sum::<C64>()).collect();
            let target = lax(ModelKind::RationalCm, &pt)?;
            (pt, target, sums)
        }
        ModelKind::TrigCms => {
            let u: Vec<C64> = (0..n)
                .map(|j| k0[(j, j)] / rational_rs_factor(&f.eigenvalues, &x.coupling, j))
                .collect();
            let pt = PhasePoint::new(f.eigenvalues.clone(), u, x.coupling)?;
            let target = lax(ModelKind::RationalRs, &pt)?;
            let d = first_row_gauge(&k0, &target);
            (pt, target, d)
        }
        ModelKind::TrigRs => {
            let tt = C64::one() / x.coupling;
            let u: Vec<C64> = (0..n)
                .map(|j| k0[(j, j)] / trig_rs_factor(&f.eigenvalues, &tt, j))
                .collect();
            let pt = PhasePoint::new(f.eigenvalues.clone(), u, tt)?;
            let target = lax(ModelKind::TrigRs, &pt)?;
            let d = first_row_gauge(&k0, &target);
            (pt, target, d)
        }
        ModelKind::RationalRs => return Err(no_fictitious(kind)),
    };
    stages.push(("dual-lax", gauged_distance(&k0, &target, &d)));

    let direct = dualize(kind, x)?;
    let mut agreement = (direct.dual.coupling - dual_point.coupling).norm();
    for i in 0..n {
        let dq = (direct.dual.q[i] - dual_point.q[i]).norm() / direct.dual.q[i].norm().max(1.0);
        let dp = (direct.dual.p[i] - dual_point.p[i]).norm() / direct.dual.p[i].norm().max(1.0);
        agreement = agreement.max(dq).max(dp);
    }
    Ok(PipelineOutcome {
        dual_kind: kind.dual(),
        dual: dual_point,
        stages,
        agreement,
    })
}
