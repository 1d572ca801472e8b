//! Action-angle duality maps between many-body systems, computed by
//! diagonalizing the Lax matrix.

use crate::error::{Error, Result};
use crate::exactnum::{eig_sorted, lex_order, Matrix, Scalar, C64, REAL_TIE_TOL};
use crate::manybody::{lax, rational_rs_factor, trig_rs_factor, ModelKind, PhasePoint};

/// Column sums or gauge entries below this (relative) are non-generic.
const GAUGE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct DualityResult {
    pub dual_kind: ModelKind,
    /// Dual point in the stored coordinates of `dual_kind`.
    pub dual: PhasePoint<C64>,
    /// Normalized eigenvector matrix of the input Lax matrix.
    pub psi: Matrix<C64>,
    /// `‖D K D⁻¹ - L_dual‖_F` after the diagonal gauge.
    pub residual: f64,
    /// `‖L_dual‖_F`, the scale for `residual`.
    pub reference: f64,
}

impl DualityResult {
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.reference.max(1.0)
    }
}

/// Diagonal gauge `d` with `d_0 = 1` fitted on the first row so that
/// `diag(d)·k·diag(d)⁻¹` matches `target` there.
fn first_row_gauge(k: &Matrix<C64>, target: &Matrix<C64>) -> Vec<C64> {
    let n = k.rows();
    let scale = target.max_modulus().max(1.0);
    let mut d = vec![C64::one(); n];
    for j in 1..n {
        // d_0 k_0j / d_j = t_0j
        if target[(0, j)].norm() > GAUGE_TOL * scale && k[(0, j)].norm() > GAUGE_TOL * scale {
            d[j] = k[(0, j)] / target[(0, j)];
        }
    }
    d
}

fn conjugate_diag(k: &Matrix<C64>, d: &[C64]) -> Matrix<C64> {
    let dinv: Vec<C64> = d.iter().map(|x| C64::one() / x).collect();
    k.diag_mul_left(d).diag_mul_right(&dinv)
}

fn finish(
    dual_kind: ModelKind,
    dual: PhasePoint<C64>,
    psi: Matrix<C64>,
    gauged: &Matrix<C64>,
) -> Result<DualityResult> {
    let target = lax(dual_kind, &dual).map_err(|e| e.at_stage("dual lax"))?;
    Ok(DualityResult {
        dual_kind,
        dual,
        psi,
        residual: (gauged - &target).frobenius(),
        reference: target.frobenius(),
    })
}

/// Rational CM self-duality: `q̃ = spec L`, `p̃ = diag(Ψ⁻¹QΨ)`, coupling `-ν`.
pub fn dualize_rational_cm(x: &PhasePoint<C64>) -> Result<DualityResult> {
    let l = lax(ModelKind::RationalCm, x)?;
    let e = eig_sorted(&l)?;
    let psi = e.vectors;
    let psi_inv = psi.inverse()?;
    let k = &psi_inv * &psi.diag_mul_left(&x.q);
    let n = x.n();
    let sums: Vec<C64> = (0..n)
        .map(|j| psi.col(j).into_iter().sum::<C64>())
        .collect();
    if let Some(j) = sums.iter().position(|s| s.norm() <= GAUGE_TOL) {
        return Err(Error::Gauge(format!("eigenvector {j} has vanishing column sum")));
    }
    let gauged = conjugate_diag(&k, &sums);
    let dual = PhasePoint::new(e.values, k.diag(), -x.coupling)?;
    finish(ModelKind::RationalCm, dual, psi, &gauged)
}

/// Trigonometric CMS to rational RS: `q̃ = spec L`, `ũ` from `diag(Ψ⁻¹WΨ)`.
pub fn dualize_cms_to_rrs(x: &PhasePoint<C64>) -> Result<DualityResult> {
    let l = lax(ModelKind::TrigCms, x)?;
    let e = eig_sorted(&l)?;
    let psi = e.vectors;
    let lt = &psi.inverse()? * &psi.diag_mul_left(&x.q);
    let nu = x.coupling;
    let qt = e.values;
    let mut u = Vec::with_capacity(qt.len());
    for j in 0..qt.len() {
        let b = rational_rs_factor(&qt, &nu, j);
        if b.norm() <= GAUGE_TOL {
            return Err(Error::Gauge(format!("dual RS factor {j} vanishes")));
        }
        u.push(lt[(j, j)] / b);
    }
    let dual = PhasePoint::new(qt, u, nu)?;
    let target = lax(ModelKind::RationalRs, &dual)?;
    let gauged = conjugate_diag(&lt, &first_row_gauge(&lt, &target));
    finish(ModelKind::RationalRs, dual, psi, &gauged)
}

/// Rational RS to trigonometric CMS: `w = spec L`, `p = diag(Φ⁻¹QΦ)`.
pub fn dualize_rrs_to_cms(x: &PhasePoint<C64>) -> Result<DualityResult> {
    let l = lax(ModelKind::RationalRs, x)?;
    let e = eig_sorted(&l)?;
    let phi = e.vectors;
    let k = &phi.inverse()? * &phi.diag_mul_left(&x.q);
    let dual = PhasePoint::new(e.values, k.diag(), x.coupling)?;
    let target = lax(ModelKind::TrigCms, &dual)?;
    let gauged = conjugate_diag(&k, &first_row_gauge(&k, &target));
    finish(ModelKind::TrigCms, dual, phi, &gauged)
}

/// Trigonometric RS self-duality: `w̃ = spec L`, `t̃ = 1/t`.
pub fn dualize_trig_rs(x: &PhasePoint<C64>) -> Result<DualityResult> {
    let l = lax(ModelKind::TrigRs, x)?;
    let e = eig_sorted(&l)?;
    let psi = e.vectors;
    let lt = &psi.inverse()? * &psi.diag_mul_left(&x.q);
    let tt = C64::one() / x.coupling;
    let wt = e.values;
    let mut u = Vec::with_capacity(wt.len());
    for j in 0..wt.len() {
        let c = trig_rs_factor(&wt, &tt, j);
        if c.norm() <= GAUGE_TOL {
            return Err(Error::Gauge(format!("dual RS factor {j} vanishes")));
        }
        u.push(lt[(j, j)] / c);
    }
    let dual = PhasePoint::new(wt, u, tt)?;
    let target = lax(ModelKind::TrigRs, &dual)?;
    let gauged = conjugate_diag(&lt, &first_row_gauge(&lt, &target));
    finish(ModelKind::TrigRs, dual, psi, &gauged)
}

/// Dispatch on `kind`.
pub fn dualize(kind: ModelKind, x: &PhasePoint<C64>) -> Result<DualityResult> {
    match kind {
        ModelKind::RationalCm => dualize_rational_cm(x),
        ModelKind::TrigCms => dualize_cms_to_rrs(x),
        ModelKind::RationalRs => dualize_rrs_to_cms(x),
        ModelKind::TrigRs => dualize_trig_rs(x),
    }
}

/// Reorder a point by lexicographic order of its positions.
pub fn sort_by_positions(x: &PhasePoint<C64>) -> PhasePoint<C64> {
    let scale = x.q.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let order = lex_order(&x.q, REAL_TIE_TOL * scale);
    PhasePoint {
        q: order.iter().map(|&i| x.q[i]).collect(),
        p: order.iter().map(|&i| x.p[i]).collect(),
        coupling: x.coupling,
    }
}

fn coord_distance(multiplicative: bool, a: C64, b: C64) -> f64 {
    if multiplicative {
        (a / b).ln().norm()
    } else {
        (a - b).norm() / a.norm().max(1.0)
    }
}

/// Apply the duality twice and return the largest coordinate discrepancy
/// from the starting point (relative for additive coordinates, logarithmic
/// for multiplicative ones).
pub fn involution_check(kind: ModelKind, x: &PhasePoint<C64>) -> Result<f64> {
    let once = dualize(kind, x)?;
    let twice = dualize(once.dual_kind, &once.dual)?;
    let a = sort_by_positions(x);
    let b = sort_by_positions(&twice.dual);
    let mut worst = coord_distance(kind.multiplicative_coupling(), a.coupling, b.coupling);
    for i in 0..a.n() {
        worst = worst
            .max(coord_distance(kind.multiplicative_positions(), a.q[i], b.q[i]))
            .max(coord_distance(kind.multiplicative_momenta(), a.p[i], b.p[i]));
    }
    Ok(worst)
}

/// Additive coordinate `k` (positions first) perturbed by `sign·h`; returns
/// the point and the additive step actually taken.
fn perturb(kind: ModelKind, x: &PhasePoint<C64>, k: usize, step: f64) -> PhasePoint<C64> {
    let n = x.n();
    let mut y = x.clone();
    let (slot, mult) = if k < n {
        (&mut y.q[k], kind.multiplicative_positions())
    } else {
        (&mut y.p[k - n], kind.multiplicative_momenta())
    };
    if mult {
        *slot *= C64::new(step, 0.0).exp();
    } else {
        *slot += C64::new(step, 0.0);
    }
    y
}

fn additive_step(kind: ModelKind, x: &PhasePoint<C64>, k: usize, h: f64) -> f64 {
    let n = x.n();
    let (v, mult) = if k < n {
        (x.q[k], kind.multiplicative_positions())
    } else {
        (x.p[k - n], kind.multiplicative_momenta())
    };
    if mult {
        h
    } else {
        h * v.norm().max(1.0)
    }
}

/// Reorder `y` so that its positions line up with those of `base`.
fn align(base: &PhasePoint<C64>, y: &PhasePoint<C64>) -> PhasePoint<C64> {
    let mut used = vec![false; y.n()];
    let mut out = base.clone();
    for i in 0..base.n() {
        let j = (0..y.n())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (y.q[a] - base.q[i])
                    .norm()
                    .total_cmp(&(y.q[b] - base.q[i]).norm())
            })
            .expect("same size");
        used[j] = true;
        out.q[i] = y.q[j];
        out.p[i] = y.p[j];
    }
    out
}

/// `‖JᵀΩJ + Ω‖_F` for the Jacobian `J` of the duality map in additive
/// canonical coordinates, by central differences with relative step `h`.
pub fn check_anticanonical(kind: ModelKind, x: &PhasePoint<C64>, h: f64) -> Result<f64> {
    let base = dualize(kind, x)?;
    let dk = base.dual_kind;
    let n = x.n();
    let m = 2 * n;
    let mut jac = Matrix::<C64>::zeros(m, m);
    for k in 0..m {
        let s = additive_step(kind, x, k, h);
        let plus = align(&base.dual, &dualize(kind, &perturb(kind, x, k, s))?.dual);
        let minus = align(&base.dual, &dualize(kind, &perturb(kind, x, k, -s))?.dual);
        for r in 0..m {
            let (a, b, mult) = if r < n {
                (plus.q[r], minus.q[r], dk.multiplicative_positions())
            } else {
                (plus.p[r - n], minus.p[r - n], dk.multiplicative_momenta())
            };
            let d = if mult { (a / b).ln() } else { a - b };
            jac[(r, k)] = d / C64::new(2.0 * s, 0.0);
        }
    }
    let omega = Matrix::<C64>::from_fn(m, m, |i, j| {
        if j == i + n {
            -C64::one()
        } else if i == j + n {
            C64::one()
        } else {
            C64::zero()
        }
    });
    let pulled = &(&jac.transpose() * &omega) * &jac;
    Ok((&pulled + &omega).frobenius())
}
