//! Time evolution: RK4 integration of the many-body Hamiltonian flows and of
//! the Gaudin flows, plus the Schlesinger compatibility residual.

use serde::Serialize;

use crate::cc_duality::{expand_hamiltonians, gaudin_hamiltonian};
use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Scalar, C64};
use crate::manybody::{hamiltonian, lax, ModelKind, PhasePoint};
use crate::spectral_duality::{spectral_poly_of, BivariatePoly};
use crate::spectral_models::PoleSum;

/// Trajectories abort when two positions come closer than this (relative).
pub const COLLISION_TOL: f64 = 1e-6;

/// `(∂H/∂q, ∂H/∂p)` in additive canonical coordinates.
pub fn hamiltonian_gradient(kind: ModelKind, q: &[C64], p: &[C64], nu: C64) -> (Vec<C64>, Vec<C64>) {
    let n = q.len();
    let mut dq = vec![C64::zero(); n];
    let mut dp = vec![C64::zero(); n];
    match kind {
        ModelKind::RationalCm => {
            dp.copy_from_slice(p);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let x = q[i] - q[j];
                        dq[i] += 2.0 * nu * nu / (x * x * x);
                    }
                }
            }
        }
        ModelKind::TrigCms => {
            dp.copy_from_slice(p);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let e = (q[i] - q[j]).exp();
                        let d = e - 1.0;
                        dq[i] += nu * nu * e * (e + 1.0) / (d * d * d);
                    }
                }
            }
        }
        ModelKind::RationalRs | ModelKind::TrigRs => {
            let t = (-nu).exp();
            // d/dx of the log of one factor of the RS product
            let g = |x: C64| -> C64 {
                if kind == ModelKind::RationalRs {
                    nu / (x * (x - nu))
                } else {
                    let e = x.exp();
                    t * e / (t * e - 1.0) - e / (e - 1.0)
                }
            };
            let log_factor = |x: C64| -> C64 {
                if kind == ModelKind::RationalRs {
                    ((x - nu) / x).ln()
                } else {
                    let e = x.exp();
                    ((t * e - 1.0) / (e - 1.0)).ln()
                }
            };
            let mut h = vec![C64::zero(); n];
            for j in 0..n {
                let mut lb = p[j];
                for k in 0..n {
                    if k != j {
                        lb += log_factor(q[j] - q[k]);
                    }
                }
                h[j] = lb.exp();
                dp[j] = h[j];
            }
            for j in 0..n {
                for k in 0..n {
                    if k != j {
                        let d = g(q[j] - q[k]);
                        dq[j] += h[j] * d;
                        dq[k] -= h[j] * d;
                    }
                }
            }
        }
    }
    (dq, dp)
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowSample {
    pub t: f64,
    /// `tr L^k`, `k = 1..N`, as `[re, im]`.
    pub invariants: Vec<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub samples: Vec<FlowSample>,
    /// `max_t |tr L^k(t) - tr L^k(0)|` for `k = 1..N`.
    pub drift: Vec<f64>,
    pub hamiltonian_drift: f64,
    pub steps: usize,
    pub dt: f64,
    pub order: u32,
    pub final_point: PhasePoint<C64>,
}

impl FlowResult {
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().copied().fold(self.hamiltonian_drift, f64::max)
    }
}

fn power_traces(l: &Matrix<C64>) -> Vec<C64> {
    let n = l.rows();
    let mut acc = l.clone();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        if k > 1 {
            acc = &acc * l;
        }
        out.push(acc.trace());
    }
    out
}

fn rk4_step(kind: ModelKind, y: &[C64], nu: C64, dt: f64) -> Vec<C64> {
    let n = y.len() / 2;
    let f = |s: &[C64]| -> Vec<C64> {
        let (dq, dp) = hamiltonian_gradient(kind, &s[..n], &s[n..], nu);
        dp.into_iter().chain(dq.into_iter().map(|v| -v)).collect()
    };
    let axpy = |a: &[C64], b: &[C64], h: f64| -> Vec<C64> { a.iter().zip(b).map(|(x, k)| x + k * h).collect() };
    let k1 = f(y);
    let k2 = f(&axpy(y, &k1, dt / 2.0));
    let k3 = f(&axpy(y, &k2, dt / 2.0));
    let k4 = f(&axpy(y, &k3, dt));
    (0..y.len())
        .map(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0))
        .collect()
}

fn check_collision(q: &[C64], t: f64) -> Result<()> {
    let scale = q.iter().map(|x| x.norm()).fold(1.0, f64::max);
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            if (q[i] - q[j]).norm() < COLLISION_TOL * scale || !(q[i] - q[j]).norm().is_finite() {
                return Err(Error::Collision { t });
            }
        }
    }
    Ok(())
}

/// Integrate `q̇ = ∂H/∂p`, `ṗ = -∂H/∂q` with classical RK4 and monitor the
/// spectral invariants of the Lax matrix. `sample_every` controls how often
/// samples are recorded (drift is tracked at every step).
pub fn evolve_manybody(
    kind: ModelKind,
    x: &PhasePoint<C64>,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<FlowResult> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Invalid("time step and horizon must be positive".into()));
    }
    let (q0, p0, nu) = x.to_additive(kind);
    let n = x.n();
    let mut y: Vec<C64> = q0.into_iter().chain(p0).collect();
    let steps = (t_end / dt).round() as usize;
    let lax_at = |y: &[C64]| -> Result<Matrix<C64>> {
        lax(kind, &PhasePoint::from_additive(kind, &y[..n], &y[n..], nu)?)
    };
    let ham_at = |y: &[C64]| -> Result<C64> {
        hamiltonian(kind, &PhasePoint::from_additive(kind, &y[..n], &y[n..], nu)?)
    };
    let inv0 = power_traces(&lax_at(&y)?);
    let h0 = ham_at(&y)?;
    let mut drift = vec![0.0; n];
    let mut hamiltonian_drift: f64 = 0.0;
    let sample = |t: f64, inv: &[C64]| FlowSample {
        t,
        invariants: inv.iter().map(|z| [z.re, z.im]).collect(),
    };
    let mut samples = vec![sample(0.0, &inv0)];
    let every = sample_every.max(1);
    for s in 1..=steps {
        y = rk4_step(kind, &y, nu, dt);
        let t = s as f64 * dt;
        check_collision(&y[..n], t)?;
        let inv = power_traces(&lax_at(&y)?);
        for k in 0..n {
            drift[k] = f64::max(drift[k], (inv[k] - inv0[k]).norm());
        }
        hamiltonian_drift = hamiltonian_drift.max((ham_at(&y)? - h0).norm());
        if s % every == 0 || s == steps {
            samples.push(sample(t, &inv));
        }
    }
    Ok(FlowResult {
        samples,
        drift,
        hamiltonian_drift,
        steps,
        dt,
        order: 4,
        final_point: PhasePoint::from_additive(kind, &y[..n], &y[n..], nu)?,
    })
}

/// Ratio of invariant drifts at `dt` and `dt/2`; close to 16 for a
/// fourth-order scheme.
pub fn convergence_ratio(kind: ModelKind, x: &PhasePoint<C64>, t_end: f64, dt: f64) -> Result<f64> {
    let coarse = evolve_manybody(kind, x, t_end, dt, usize::MAX)?;
    let fine = evolve_manybody(kind, x, t_end, dt / 2.0, usize::MAX)?;
    Ok(coarse.max_drift() / fine.max_drift())
}

/// Gaudin velocities for the flow generated by `H_a`:
/// `Ṡ^j = -[S^a, S^j]/(z_a - z_j)` for `j ≠ a` and
/// `Ṡ^a = Σ_{k≠a} [S^a, S^k]/(z_a - z_k) + [S^a, Λ]`.
pub fn gaudin_velocity<T: Scalar>(model: &PoleSum<T>, a: usize) -> Vec<Matrix<T>> {
    let s = &model.residues;
    let z = &model.poles;
    (0..s.len())
        .map(|j| {
            if j != a {
                s[a].commutator(&s[j]).scale(&(-T::one() / (z[a].clone() - z[j].clone())))
            } else {
                let mut acc = s[a].commutator(&model.constant);
                for k in 0..s.len() {
                    if k != a {
                        acc = &acc + &s[a].commutator(&s[k]).scale(&(T::one() / (z[a].clone() - z[k].clone())));
                    }
                }
                acc
            }
        })
        .collect()
}

/// `{H_a, S^b_kl}` from the Lie–Poisson bracket
/// `{S^a_ij, S^b_kl} = δ^{ab}(S^a_kj δ_il - S^a_il δ_kj)`, with the gradient of
/// `H_a` taken entry by entry. Agrees with [`gaudin_velocity`].
pub fn bracket_velocity<T: Scalar>(model: &PoleSum<T>, a: usize) -> Vec<Matrix<T>> {
    let m = model.residues.len();
    let n = model.size();
    let h = gaudin_hamiltonian(model, a);
    (0..m)
        .map(|b| {
            // H_a is affine in each S^b, so unit differences are exact derivatives
            let mut grad = Matrix::<T>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut bumped = model.clone();
                    bumped.residues[b][(i, j)] = bumped.residues[b][(i, j)].clone() + T::one();
                    grad[(i, j)] = gaudin_hamiltonian(&bumped, a) - h.clone();
                }
            }
            let s = &model.residues[b];
            Matrix::from_fn(n, n, |k, l| {
                let mut acc = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        if grad[(i, j)].is_zero() {
                            continue;
                        }
                        let mut br = T::zero();
                        if i == l {
                            br = br + s[(k, j)].clone();
                        }
                        if k == j {
                            br = br - s[(i, l)].clone();
                        }
                        acc = acc + grad[(i, j)].clone() * br;
                    }
                }
                acc
            })
        })
        .collect()
}

/// `κ̃ ∂_{z_a} L - κ̃ ∂_z M_a - [L, M_a]` at `z`, with `M_a = -S^a/(z - z_a)`
/// and `κ̃ ∂_{z_a} S^j` given by the Gaudin velocities. Vanishes identically.
pub fn schlesinger_residual<T: Scalar>(model: &PoleSum<T>, a: usize, z: &T, kappa: &T) -> Result<Matrix<T>> {
    let l = model.evaluate(z)?;
    let da = z.clone() - model.poles[a].clone();
    let m_a = model.residues[a].scale(&(-T::one() / da.clone()));
    let vel = gaudin_velocity(model, a);
    let mut lhs = Matrix::zeros(model.size(), model.size());
    for (j, v) in vel.iter().enumerate() {
        // ∂_{z_a} S^j = v/κ̃
        let dz = v.scale(&(T::one() / kappa.clone()));
        lhs = &lhs + &dz.scale(&(kappa.clone() / (z.clone() - model.poles[j].clone())));
    }
    // explicit z_a dependence of L cancels ∂_z M_a
    let explicit = model.residues[a].scale(&(kappa.clone() / (da.clone() * da.clone())));
    let dz_m = model.residues[a].scale(&(kappa.clone() / (da.clone() * da)));
    let lhs = &(&lhs + &explicit) - &dz_m;
    Ok(&lhs - &l.commutator(&m_a))
}

#[derive(Clone, Debug)]
pub struct GaudinFlowResult {
    pub casimir_drift: f64,
    pub hamiltonian_drift: f64,
    pub curve_drift: f64,
    pub steps: usize,
    pub final_model: PoleSum<C64>,
}

impl GaudinFlowResult {
    pub fn max_drift(&self) -> f64 {
        self.casimir_drift.max(self.hamiltonian_drift).max(self.curve_drift)
    }
}

fn gaudin_rk4(model: &PoleSum<C64>, a: usize, dt: f64) -> PoleSum<C64> {
    let shifted = |base: &PoleSum<C64>, k: &[Matrix<C64>], h: f64| {
        let mut m = base.clone();
        for (r, v) in m.residues.iter_mut().zip(k) {
            *r = &*r + &v.scale(&C64::new(h, 0.0));
        }
        m
    };
    let k1 = gaudin_velocity(model, a);
    let k2 = gaudin_velocity(&shifted(model, &k1, dt / 2.0), a);
    let k3 = gaudin_velocity(&shifted(model, &k2, dt / 2.0), a);
    let k4 = gaudin_velocity(&shifted(model, &k3, dt), a);
    let mut out = model.clone();
    for j in 0..out.residues.len() {
        let inc = &(&(&k1[j] + &k2[j].scale(&C64::new(2.0, 0.0))) + &k3[j].scale(&C64::new(2.0, 0.0))) + &k4[j];
        out.residues[j] = &out.residues[j] + &inc.scale(&C64::new(dt / 6.0, 0.0));
    }
    out
}

fn casimirs(model: &PoleSum<C64>) -> Vec<C64> {
    model
        .residues
        .iter()
        .flat_map(|r| {
            let mut acc = r.clone();
            (1..=r.rows())
                .map(|k| {
                    if k > 1 {
                        acc = &acc * r;
                    }
                    acc.trace()
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Integrate the Gaudin flow of `H_a` and track `tr (S^c)^k`, all `H_b`
/// and the spectral polynomial.
pub fn evolve_gaudin(model: &PoleSum<C64>, a: usize, t_end: f64, dt: f64) -> Result<GaudinFlowResult> {
    if a >= model.residues.len() {
        return Err(Error::Invalid(format!("flow index {a} out of range")));
    }
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Invalid("time step and horizon must be positive".into()));
    }
    let order = model
        .residues
        .iter()
        .map(|r| r.rank(1e-9))
        .max()
        .unwrap_or(0);
    let cas0 = casimirs(model);
    let ham0 = expand_hamiltonians(model)?.hamiltonians;
    let curve0: BivariatePoly<C64> = spectral_poly_of(model, order)?;
    let flat = |p: &BivariatePoly<C64>| p.coeffs.iter().flatten().copied().collect::<Vec<_>>();
    let curve0 = flat(&curve0);
    let steps = (t_end / dt).round() as usize;
    let mut cur = model.clone();
    let (mut cd, mut hd, mut sd) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..steps {
        cur = gaudin_rk4(&cur, a, dt);
        cd = cd.max(max_abs_diff(&casimirs(&cur), &cas0));
        hd = hd.max(max_abs_diff(&expand_hamiltonians(&cur)?.hamiltonians, &ham0));
        sd = sd.max(max_abs_diff(&flat(&spectral_poly_of(&cur, order)?), &curve0));
    }
    Ok(GaudinFlowResult {
        casimir_drift: cd,
        hamiltonian_drift: hd,
        curve_drift: sd,
        steps,
        final_model: cur,
    })
}
