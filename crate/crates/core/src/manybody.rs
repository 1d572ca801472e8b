//! Lax matrices, moment maps and Hamiltonians of the four many-body families.
//!
//! Coordinates are stored in the form in which the Lax matrix is rational:
//!
//! | kind          | `q`       | `p`       | `coupling`   |
//! |---------------|-----------|-----------|--------------|
//! | `RationalCm`  | q         | p         | ν            |
//! | `TrigCms`     | w = e^q   | p         | ν            |
//! | `RationalRs`  | q         | u = e^p   | ν            |
//! | `TrigRs`      | w = e^q   | u = e^p   | t = e^(-ν)   |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{char_poly, eigenvalues, poly_from_roots, Matrix, Scalar, C64};

/// Relative tolerance for coincidence tests on the floating backend.
pub const COINCIDENCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    RationalCm,
    TrigCms,
    RationalRs,
    TrigRs,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::RationalCm,
        ModelKind::TrigCms,
        ModelKind::RationalRs,
        ModelKind::TrigRs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::RationalCm => "rational_cm",
            ModelKind::TrigCms => "trig_cms",
            ModelKind::RationalRs => "rational_rs",
            ModelKind::TrigRs => "trig_rs",
        }
    }

    pub fn from_name(s: &str) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn multiplicative_positions(self) -> bool {
        matches!(self, ModelKind::TrigCms | ModelKind::TrigRs)
    }

    pub fn multiplicative_momenta(self) -> bool {
        matches!(self, ModelKind::RationalRs | ModelKind::TrigRs)
    }

    pub fn multiplicative_coupling(self) -> bool {
        self == ModelKind::TrigRs
    }

    pub fn is_rs(self) -> bool {
        self.multiplicative_momenta()
    }

    /// Kind of the action-angle dual.
    pub fn dual(self) -> ModelKind {
        match self {
            ModelKind::RationalCm => ModelKind::RationalCm,
            ModelKind::TrigCms => ModelKind::RationalRs,
            ModelKind::RationalRs => ModelKind::TrigCms,
            ModelKind::TrigRs => ModelKind::TrigRs,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A phase-space point in stored coordinates (see the module table).
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<T> {
    pub q: Vec<T>,
    pub p: Vec<T>,
    pub coupling: T,
}

impl<T: Scalar> PhasePoint<T> {
    pub fn new(q: Vec<T>, p: Vec<T>, coupling: T) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::Dimension(format!(
                "{} positions but {} momenta",
                q.len(),
                p.len()
            )));
        }
        if q.is_empty() {
            return Err(Error::Invalid("need at least one particle".into()));
        }
        Ok(PhasePoint { q, p, coupling })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    fn scale(&self) -> f64 {
        self.q
            .iter()
            .chain(self.p.iter())
            .map(T::modulus)
            .fold(self.coupling.modulus(), f64::max)
    }

    /// Check the genericity conditions under which the Lax matrix of `kind`
    /// is defined.
    pub fn validate(&self, kind: ModelKind) -> Result<()> {
        if self.q.len() != self.p.len() {
            return Err(Error::Dimension("positions and momenta differ in length".into()));
        }
        let s = self.scale();
        let n = self.n();
        let tiny = |x: &T| x.is_negligible(s, COINCIDENCE_TOL);
        if kind.multiplicative_positions() && self.q.iter().any(tiny) {
            return Err(Error::ZeroValue("exponentiated position"));
        }
        if kind == ModelKind::TrigRs && tiny(&self.coupling) {
            return Err(Error::ZeroValue("exponentiated coupling"));
        }
        for i in 0..n {
            for j in i + 1..n {
                if tiny(&(self.q[i].clone() - self.q[j].clone())) {
                    return Err(Error::Coincident {
                        what: "positions",
                        i,
                        j,
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let bad = match kind {
                    ModelKind::RationalRs => {
                        tiny(&(self.q[i].clone() - self.q[j].clone() + self.coupling.clone()))
                    }
                    ModelKind::TrigRs => {
                        tiny(&(self.q[i].clone() - self.coupling.clone() * self.q[j].clone()))
                    }
                    _ => false,
                };
                if bad {
                    return Err(Error::PoleCondition { i, j });
                }
            }
        }
        Ok(())
    }
}

impl PhasePoint<C64> {
    /// Build a stored point from additive coordinates `(q, p, ν)`.
    pub fn from_additive(kind: ModelKind, q: &[C64], p: &[C64], nu: C64) -> Result<Self> {
        let tq = |x: &C64| if kind.multiplicative_positions() { x.exp() } else { *x };
        let tp = |x: &C64| if kind.multiplicative_momenta() { x.exp() } else { *x };
        let coupling = if kind.multiplicative_coupling() { (-nu).exp() } else { nu };
        PhasePoint::new(q.iter().map(tq).collect(), p.iter().map(tp).collect(), coupling)
    }

    /// Additive coordinates `(q, p, ν)` on the principal branch of the logarithm.
    pub fn to_additive(&self, kind: ModelKind) -> (Vec<C64>, Vec<C64>, C64) {
        let q = self
            .q
            .iter()
            .map(|x| if kind.multiplicative_positions() { x.ln() } else { *x })
            .collect();
        let p = self
            .p
            .iter()
            .map(|x| if kind.multiplicative_momenta() { x.ln() } else { *x })
            .collect();
        let nu = if kind.multiplicative_coupling() {
            -self.coupling.ln()
        } else {
            self.coupling
        };
        (q, p, nu)
    }
}

impl<T: Scalar> PhasePoint<T> {
    pub fn to_c64(&self) -> PhasePoint<C64> {
        PhasePoint {
            q: self.q.iter().map(T::to_c64).collect(),
            p: self.p.iter().map(T::to_c64).collect(),
            coupling: self.coupling.to_c64(),
        }
    }
}

/// `∏_{k≠j} (q_j - q_k - ν)/(q_j - q_k)`.
pub fn rational_rs_factor<T: Scalar>(q: &[T], nu: &T, j: usize) -> T {
    let mut b = T::one();
    for (k, qk) in q.iter().enumerate() {
        if k != j {
            let d = q[j].clone() - qk.clone();
            b = b * (d.clone() - nu.clone()) / d;
        }
    }
    b
}

/// `∏_{k≠j} (t w_j - w_k)/(w_j - w_k)`.
pub fn trig_rs_factor<T: Scalar>(w: &[T], t: &T, j: usize) -> T {
    let mut c = T::one();
    for (k, wk) in w.iter().enumerate() {
        if k != j {
            c = c * (t.clone() * w[j].clone() - wk.clone()) / (w[j].clone() - wk.clone());
        }
    }
    c
}

/// The Lax matrix of `kind` at `x`.
pub fn lax<T: Scalar>(kind: ModelKind, x: &PhasePoint<T>) -> Result<Matrix<T>> {
    x.validate(kind)?;
    let n = x.n();
    let nu = &x.coupling;
    let q = &x.q;
    let m = match kind {
        ModelKind::RationalCm => Matrix::from_fn(n, n, |i, j| {
            if i == j {
                x.p[i].clone()
            } else {
                nu.clone() / (q[i].clone() - q[j].clone())
            }
        }),
        ModelKind::TrigCms => Matrix::from_fn(n, n, |i, j| {
            if i == j {
                x.p[i].clone()
            } else {
                nu.clone() / (T::one() - q[i].clone() / q[j].clone())
            }
        }),
        ModelKind::RationalRs => {
            let col: Vec<T> = (0..n)
                .map(|j| x.p[j].clone() * rational_rs_factor(q, nu, j))
                .collect();
            Matrix::from_fn(n, n, |i, j| {
                // the diagonal is written as its ν → 0 limit
                let c = if i == j {
                    T::one()
                } else {
                    nu.clone() / (q[i].clone() - q[j].clone() + nu.clone())
                };
                c * col[j].clone()
            })
        }
        ModelKind::TrigRs => {
            let t = nu;
            let col: Vec<T> = (0..n)
                .map(|j| x.p[j].clone() * trig_rs_factor(q, t, j))
                .collect();
            Matrix::from_fn(n, n, |i, j| {
                let c = if i == j {
                    T::one()
                } else {
                    (T::one() - t.clone()) * q[i].clone()
                        / (q[i].clone() - t.clone() * q[j].clone())
                };
                c * col[j].clone()
            })
        }
    };
    Ok(m)
}

/// `Ō = eᵀ⊗e - 1`: zero diagonal, ones elsewhere.
pub fn off_diagonal_ones<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| if i == j { T::zero() } else { T::one() })
}

/// The moment-map residual; identically zero on valid input.
pub fn moment_residual<T: Scalar>(kind: ModelKind, x: &PhasePoint<T>) -> Result<Matrix<T>> {
    let l = lax(kind, x)?;
    let n = x.n();
    let nu = x.coupling.clone();
    let qd = Matrix::from_diag(&x.q);
    let o = off_diagonal_ones::<T>(n);
    Ok(match kind {
        ModelKind::RationalCm => &qd.commutator(&l) - &o.scale(&nu),
        ModelKind::TrigCms => {
            let wlw = l.diag_mul_left(&x.q).diag_mul_right(
                &x.q.iter().map(|w| T::one() / w.clone()).collect::<Vec<_>>(),
            );
            &(&l - &wlw) - &o.scale(&nu)
        }
        ModelKind::RationalRs => {
            let lhs = &l.scale(&nu) + &qd.commutator(&l);
            let d = l.diag();
            Matrix::from_fn(n, n, |i, j| lhs[(i, j)].clone() - nu.clone() * d[j].clone())
        }
        ModelKind::TrigRs => {
            let t = nu;
            let winv: Vec<T> = x.q.iter().map(|w| T::one() / w.clone()).collect();
            let conj = l.diag_mul_left(&winv).diag_mul_right(&x.q);
            let d = l.diag();
            Matrix::from_fn(n, n, |i, j| {
                l[(i, j)].clone()
                    - t.clone() * conj[(i, j)].clone()
                    - (T::one() - t.clone()) * d[j].clone()
            })
        }
    })
}

/// Result of the trigonometric RS spectrum check on `L e^{-Q} L^{-1} e^{Q}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrsSpectrum {
    /// `rank(M - t·1) - 1`; zero when the rank-one structure holds.
    pub rank_defect: i64,
    /// Largest coefficient error of the characteristic polynomial of `M`
    /// against `(λ - t)^{N-1}(λ - t^{1-N})`; exactly zero on exact backends.
    pub charpoly_residual: f64,
    /// Distance between the numerically computed spectrum of `M` and the
    /// predicted multiset; computed on the floating backend only.
    pub spectrum_residual: Option<f64>,
}

// greedy matching is adequate: the predicted multiset has two distinct values
fn spectrum_distance(mut numeric: Vec<C64>, mut expect: Vec<C64>) -> f64 {
    let key = |z: &C64| (z.re, z.im);
    numeric.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
    let mut worst: f64 = 0.0;
    for z in &numeric {
        let (k, d) = expect
            .iter()
            .enumerate()
            .map(|(k, e)| (k, (e - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        worst = worst.max(d);
        expect.remove(k);
    }
    worst
}

pub fn trs_spectrum_check<T: Scalar>(x: &PhasePoint<T>) -> Result<TrsSpectrum> {
    let l = lax(ModelKind::TrigRs, x)?;
    let n = x.n();
    let t = x.coupling.clone();
    let winv: Vec<T> = x.q.iter().map(|w| T::one() / w.clone()).collect();
    let linv = l.inverse()?;
    let m = &l.diag_mul_right(&winv) * &linv.diag_mul_right(&x.q);
    let shifted = &m - &Matrix::identity(n).scale(&t);
    let rank = shifted.rank(1e-9) as i64;
    let mut tpow = T::one();
    for _ in 0..n - 1 {
        tpow = tpow * t.clone();
    }
    let top = T::one() / tpow;
    let mut roots = vec![t.clone(); n - 1];
    roots.push(top.clone());
    let predicted = poly_from_roots(&roots);
    let cp = char_poly(&m)?;
    let spectrum_residual = if T::EXACT {
        None
    } else {
        Some(spectrum_distance(eigenvalues(&m.to_c64())?, roots.iter().map(T::to_c64).collect()))
    };
    Ok(TrsSpectrum {
        rank_defect: rank - 1,
        charpoly_residual: cp.max_diff(&predicted),
        spectrum_residual,
    })
}

/// The Hamiltonian: `½ tr L²` for the CM families, `tr L` for the RS families.
pub fn hamiltonian<T: Scalar>(kind: ModelKind, x: &PhasePoint<T>) -> Result<T> {
    let l = lax(kind, x)?;
    Ok(if kind.is_rs() {
        l.trace()
    } else {
        (&l * &l).trace() / T::from_i64(2)
    })
}

/// `tr L^{-1}`, the second RS Hamiltonian.
pub fn inverse_hamiltonian<T: Scalar>(kind: ModelKind, x: &PhasePoint<T>) -> Result<T> {
    Ok(lax(kind, x)?.inverse()?.trace())
}

/// Closed-form CM Hamiltonians, `½Σp² - Σ_{i<j} ν²/(q_i-q_j)²` and its
/// trigonometric analogue written in `w`.
pub fn cm_hamiltonian_closed_form<T: Scalar>(kind: ModelKind, x: &PhasePoint<T>) -> Result<T> {
    x.validate(kind)?;
    let half = T::from_ratio(1, 2);
    let mut h = x
        .p
        .iter()
        .fold(T::zero(), |acc, p| acc + p.clone() * p.clone())
        * half;
    let nu2 = x.coupling.clone() * x.coupling.clone();
    for i in 0..x.n() {
        for j in i + 1..x.n() {
            let term = match kind {
                ModelKind::RationalCm => {
                    let d = x.q[i].clone() - x.q[j].clone();
                    nu2.clone() / (d.clone() * d)
                }
                ModelKind::TrigCms => {
                    // 1/(4 sinh²(q_ij/2)) = w_i w_j/(w_i - w_j)²
                    let d = x.q[i].clone() - x.q[j].clone();
                    nu2.clone() * x.q[i].clone() * x.q[j].clone() / (d.clone() * d)
                }
                _ => {
                    return Err(Error::WrongKind {
                        expected: "a CM kind".into(),
                        got: kind.name().into(),
                    })
                }
            };
            h = h - term;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;

    fn r(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn pt(q: &[i64], p: &[i64], nu: i64) -> PhasePoint<Rational> {
        PhasePoint::new(
            q.iter().map(|&v| r(v)).collect(),
            p.iter().map(|&v| r(v)).collect(),
            r(nu),
        )
        .unwrap()
    }

    #[test]
    fn rational_cm_example() {
        let x = pt(&[0, 1], &[2, 3], 1);
        let l = lax(ModelKind::RationalCm, &x).unwrap();
        assert_eq!(l.to_rows(), vec![vec![r(2), r(-1)], vec![r(1), r(3)]]);
        assert!(moment_residual(ModelKind::RationalCm, &x).unwrap().is_zero());
    }

    #[test]
    fn trig_cms_example() {
        let x = pt(&[1, 2], &[0, 0], 1);
        let l = lax(ModelKind::TrigCms, &x).unwrap();
        assert_eq!(l.to_rows(), vec![vec![r(0), r(2)], vec![r(-1), r(0)]]);
        assert!(moment_residual(ModelKind::TrigCms, &x).unwrap().is_zero());
    }

    #[test]
    fn rational_rs_example() {
        let x = pt(&[0, 2], &[1, 1], 1);
        let l = lax(ModelKind::RationalRs, &x).unwrap();
        let h = Rational::from_ratio(1, 2);
        assert_eq!(
            l.to_rows(),
            vec![vec![Rational::from_ratio(3, 2), -h.clone()], vec![h.clone(), h]]
        );
        assert!(moment_residual(ModelKind::RationalRs, &x).unwrap().is_zero());
    }

    #[test]
    fn trig_rs_single_particle() {
        let x = PhasePoint::new(vec![r(3)], vec![Rational::from_ratio(5, 7)], Rational::from_ratio(1, 2)).unwrap();
        let l = lax(ModelKind::TrigRs, &x).unwrap();
        assert_eq!(l.to_rows(), vec![vec![Rational::from_ratio(5, 7)]]);
        let s = trs_spectrum_check(&x).unwrap();
        assert_eq!(s.rank_defect, 0);
        assert_eq!(s.charpoly_residual, 0.0);
    }

    #[test]
    fn trig_rs_spectrum_structure() {
        let x = PhasePoint::new(
            vec![r(1), r(3), Rational::from_ratio(-1, 2)],
            vec![r(2), Rational::from_ratio(1, 3), r(-1)],
            Rational::from_ratio(2, 5),
        )
        .unwrap();
        assert!(moment_residual(ModelKind::TrigRs, &x).unwrap().is_zero());
        let s = trs_spectrum_check(&x).unwrap();
        assert_eq!(s.rank_defect, 0);
        assert_eq!(s.charpoly_residual, 0.0);
        assert_eq!(s.spectrum_residual, None);
        let r = trs_spectrum_check(&x.to_c64()).unwrap().spectrum_residual.unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn coincident_positions_rejected() {
        let x = pt(&[1, 1], &[0, 0], 1);
        assert_eq!(
            lax(ModelKind::RationalCm, &x),
            Err(Error::Coincident { what: "positions", i: 0, j: 1 })
        );
    }

    #[test]
    fn rs_pole_condition_rejected() {
        let x = pt(&[0, 1], &[1, 1], 1);
        assert_eq!(lax(ModelKind::RationalRs, &x), Err(Error::PoleCondition { i: 0, j: 1 }));
    }

    #[test]
    fn hamiltonians_match_closed_forms() {
        let x = pt(&[0, 1, 3], &[2, 3, -1], 2);
        for kind in [ModelKind::RationalCm, ModelKind::TrigCms] {
            let y = if kind == ModelKind::TrigCms { pt(&[1, 2, 5], &[2, 3, -1], 2) } else { x.clone() };
            assert_eq!(hamiltonian(kind, &y).unwrap(), cm_hamiltonian_closed_form(kind, &y).unwrap());
        }
    }

    #[test]
    fn free_particles_at_zero_coupling() {
        let x = pt(&[0, 1], &[2, 3], 0);
        assert_eq!(hamiltonian(ModelKind::RationalCm, &x).unwrap(), Rational::from_ratio(13, 2));
        assert_eq!(hamiltonian(ModelKind::RationalRs, &x).unwrap(), r(5));
    }
}
