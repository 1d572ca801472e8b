//! Seeded random instances.
//!
//! Every instance draws from its own ChaCha8 stream, keyed by the run seed,
//! the check family and the instance index, so results do not depend on
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exactnum::{eig_sorted, Matrix, QComplex, Rational, Scalar, C64};
use crate::manybody::{lax, ModelKind, PhasePoint};
use crate::spectral_models::{MultiPoleLax, PoleSum, Site, SpectralKind, TrigGaudinRaw};

/// Bound on numerators and denominators of random rationals.
pub const RATIONAL_BOUND: i64 = 97;

/// Minimum eigenvalue separation (relative to the Lax scale) of generated
/// floating instances.
pub const MIN_EIGEN_GAP: f64 = 1e-2;

/// Largest accepted `‖Ψ‖‖Ψ⁻¹‖` for generated floating instances.
pub const MAX_CONDITION: f64 = 1e6;

pub fn rng_for(seed: u64, family: &str, index: u64) -> ChaCha8Rng {
    // FNV-1a of the family name keeps families on separate streams
    let tag = family
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag);
    rng.set_stream(index);
    rng
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(
        rng.gen_range(-RATIONAL_BOUND..=RATIONAL_BOUND).into(),
        rng.gen_range(1..=RATIONAL_BOUND).into(),
    )
}

pub fn random_nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let r = random_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn random_gaussian(rng: &mut impl Rng) -> QComplex {
    QComplex::new(random_rational(rng), random_rational(rng))
}

fn distinct_rationals(rng: &mut impl Rng, n: usize, nonzero: bool) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    while out.len() < n {
        let r = random_rational(rng);
        if (nonzero && r.is_zero()) || out.contains(&r) {
            continue;
        }
        out.push(r);
    }
    out
}

fn rational_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<Rational> {
    Matrix::from_fn(rows, cols, |_, _| random_rational(rng))
}

/// Random exact phase point satisfying the genericity conditions of `kind`.
pub fn exact_point(kind: ModelKind, n: usize, rng: &mut impl Rng) -> PhasePoint<Rational> {
    loop {
        let q = distinct_rationals(rng, n, kind.multiplicative_positions());
        let p: Vec<Rational> = (0..n)
            .map(|_| {
                if kind.multiplicative_momenta() {
                    random_nonzero_rational(rng)
                } else {
                    random_rational(rng)
                }
            })
            .collect();
        let coupling = random_nonzero_rational(rng);
        if kind == ModelKind::TrigRs && coupling == Rational::one() {
            continue;
        }
        let x = PhasePoint::new(q, p, coupling).expect("matching lengths");
        if x.validate(kind).is_ok() {
            return x;
        }
    }
}

/// Random exact multi-pole Lax matrix of the given kind with distinct twist
/// and pole values (nonzero where the kind needs it).
pub fn exact_multipole(kind: SpectralKind, n: usize, m: usize, rng: &mut impl Rng) -> MultiPoleLax<Rational> {
    let nonzero = kind.weighted() || kind.chain();
    let twist = distinct_rationals(rng, n, nonzero);
    let poles = distinct_rationals(rng, m, nonzero);
    let xi = rational_matrix(rng, n, m);
    let eta = rational_matrix(rng, m, n);
    MultiPoleLax::new(kind, twist, poles, xi, eta).expect("distinct poles")
}

pub fn exact_trig_gaudin(n: usize, m: usize, rng: &mut impl Rng) -> TrigGaudinRaw<Rational> {
    let twist = distinct_rationals(rng, n, false);
    let poles = distinct_rationals(rng, m, true);
    TrigGaudinRaw::new(twist, poles, rational_matrix(rng, n, m), rational_matrix(rng, m, n)).expect("generic")
}

/// Twist and sites of a chain; XXZ sites carry a random strictly lower
/// constant part.
pub fn exact_chain(n: usize, m: usize, xxz: bool, rng: &mut impl Rng) -> (Vec<Rational>, Vec<Site<Rational>>) {
    let twist = distinct_rationals(rng, n, true);
    let inh = distinct_rationals(rng, m, xxz);
    let sites = inh
        .into_iter()
        .map(|inhomogeneity| Site {
            inhomogeneity,
            x: (0..n).map(|_| random_rational(rng)).collect(),
            y: (0..n).map(|_| random_rational(rng)).collect(),
            lower: xxz.then(|| rational_matrix(rng, n, n).strictly_lower()),
        })
        .collect();
    (twist, sites)
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn complex_in(rng: &mut impl Rng, re: f64, im: f64) -> C64 {
    C64::new(uniform(rng, -re, re), uniform(rng, -im, im))
}

/// Lax spectrum is separated and the eigenvector matrix is well conditioned.
pub fn is_well_posed(kind: ModelKind, x: &PhasePoint<C64>) -> bool {
    if x.validate(kind).is_err() {
        return false;
    }
    let Ok(l) = lax(kind, x) else { return false };
    let scale = l.max_modulus().max(1.0);
    let Ok(e) = eig_sorted(&l) else { return false };
    let n = e.values.len();
    for i in 0..n {
        for j in i + 1..n {
            if (e.values[i] - e.values[j]).norm() < MIN_EIGEN_GAP * scale {
                return false;
            }
        }
    }
    let Ok(inv) = e.vectors.inverse() else { return false };
    e.vectors.frobenius() * inv.frobenius() <= MAX_CONDITION
}

/// Random complex point in stored coordinates, drawn in additive
/// coordinates around an ordered grid and filtered by [`is_well_posed`].
pub fn float_point(kind: ModelKind, n: usize, rng: &mut impl Rng) -> PhasePoint<C64> {
    loop {
        let q: Vec<C64> = (0..n)
            .map(|k| C64::new(-1.5 + 1.2 * k as f64 + uniform(rng, -0.2, 0.2), uniform(rng, -0.3, 0.3)))
            .collect();
        let p: Vec<C64> = (0..n).map(|_| complex_in(rng, 0.8, 0.3)).collect();
        let nu = C64::new(uniform(rng, 0.4, 0.9), uniform(rng, -0.2, 0.2));
        let Ok(x) = PhasePoint::from_additive(kind, &q, &p, nu) else { continue };
        if is_well_posed(kind, &x) {
            return x;
        }
    }
}

/// Point for time integration: widely spaced real positions, small momenta,
/// a repulsive (imaginary) coupling for CM kinds and a small real coupling
/// for RS kinds.
pub fn flow_point(kind: ModelKind, n: usize, rng: &mut impl Rng) -> PhasePoint<C64> {
    loop {
        let q: Vec<C64> = (0..n)
            .map(|k| C64::new(-2.0 + 2.0 * k as f64 + uniform(rng, -0.2, 0.2), 0.0))
            .collect();
        let p: Vec<C64> = (0..n).map(|_| C64::new(uniform(rng, -0.3, 0.3), 0.0)).collect();
        let nu = if kind.is_rs() {
            C64::new(uniform(rng, 0.2, 0.4), 0.0)
        } else {
            C64::new(0.0, uniform(rng, 0.5, 1.0))
        };
        let Ok(x) = PhasePoint::from_additive(kind, &q, &p, nu) else { continue };
        if x.validate(kind).is_ok() {
            return x;
        }
    }
}

/// Rational Gaudin model with real separated poles and small rank-one
/// residues, for time integration.
pub fn gaudin_flow_model(n: usize, m: usize, rng: &mut impl Rng) -> PoleSum<C64> {
    let twist: Vec<C64> = (0..n).map(|k| C64::new(k as f64 + uniform(rng, -0.2, 0.2), 0.0)).collect();
    let poles: Vec<C64> = (0..m).map(|k| C64::new(3.0 * k as f64 - 3.0, 0.0)).collect();
    let residues = (0..m)
        .map(|_| {
            let x: Vec<C64> = (0..n).map(|_| complex_in(rng, 0.5, 0.2)).collect();
            let y: Vec<C64> = (0..n).map(|_| complex_in(rng, 0.5, 0.2)).collect();
            Matrix::outer(&x, &y)
        })
        .collect();
    PoleSum {
        constant: Matrix::from_diag(&twist),
        poles,
        residues,
    }
}

/// Floating copy of a random exact multi-pole Lax matrix.
pub fn float_multipole(kind: SpectralKind, n: usize, m: usize, rng: &mut impl Rng) -> Result<MultiPoleLax<C64>> {
    let e = exact_multipole(kind, n, m, rng);
    let f = |r: &Rational| r.to_c64();
    MultiPoleLax::new(kind, e.twist.iter().map(f).collect(), e.poles.iter().map(f).collect(), e.xi.map(f), e.eta.map(f))
}
