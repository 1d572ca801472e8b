//! Named verification suites over seeded random instances.

use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cc_duality::verify_cc_identifications;
use crate::error::{Error, Result};
use crate::exactnum::{char_poly, eigenvalues, lex_order, Matrix, Rational, Scalar, C64, REAL_TIE_TOL};
use crate::flows::{bracket_velocity, convergence_ratio, evolve_gaudin, evolve_manybody, gaudin_velocity, schlesinger_residual};
use crate::generate::{
    exact_chain, exact_multipole, exact_point, exact_trig_gaudin, float_point, flow_point, gaudin_flow_model,
    random_nonzero_rational, random_rational, rng_for,
};
use crate::io::{digest, lax_to_json, matrix_to_json, point_to_json, vec_to_json, JsonScalar};
use crate::manybody::{lax, moment_residual, trs_spectrum_check, ModelKind, PhasePoint};
use crate::pq_duality::{check_anticanonical, dualize, involution_check};
use crate::report::{CheckRow, DualityReport};
use crate::spectral_duality::{
    compare_curves, dual_rational_gaudin, dual_tgaudin_to_xxx, dual_xxz_chain, fictitious_gauge,
    fictitious_pole_sum, pq_via_spectral, residue_rank_defect,
};
use crate::spectral_models::{
    cybe_residual, gauge_matrix, gauge_matrix_recursive, xxx_monodromy, xxx_product, xxz_monodromy, xxz_product,
    MultiPoleLax, RVariant, SpectralKind,
};

/// Environment variable that sets the worker count.
pub const THREADS_ENV: &str = "DUALITY_LAB_THREADS";

/// Step size of the central differences in the anticanonicity check.
pub const ANTICANONICAL_STEP: f64 = 1e-5;

/// Horizon and step of the invariant-drift flows.
pub const FLOW_T_END: f64 = 1.0;
pub const FLOW_DT: f64 = 1e-3;
/// Coarse step of the order check; the fine run uses half of it.
pub const ORDER_DT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MomentMaps,
    PqDuality,
    Anticanonical,
    SpectralCurves,
    Ybe,
    GaugeLemma,
    CcDuality,
    Flows,
    PqViaSpectral,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::MomentMaps,
        Suite::PqDuality,
        Suite::Anticanonical,
        Suite::SpectralCurves,
        Suite::Ybe,
        Suite::GaugeLemma,
        Suite::CcDuality,
        Suite::Flows,
        Suite::PqViaSpectral,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::MomentMaps => "moment-maps",
            Suite::PqDuality => "pq-duality",
            Suite::Anticanonical => "anticanonical",
            Suite::SpectralCurves => "spectral-curves",
            Suite::Ybe => "ybe",
            Suite::GaugeLemma => "gauge-lemma",
            Suite::CcDuality => "cc-duality",
            Suite::Flows => "flows",
            Suite::PqViaSpectral => "pq-via-spectral",
        }
    }

    pub fn from_id(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.id() == s)
    }

    /// Parse a suite name; `all` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::from_id(s)
            .map(|x| vec![x])
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }

    pub fn default_n(self) -> SizeRange {
        let (min, max) = match self {
            Suite::MomentMaps | Suite::CcDuality => (2, 6),
            Suite::PqDuality | Suite::Flows | Suite::PqViaSpectral => (2, 4),
            Suite::Anticanonical => (2, 3),
            Suite::SpectralCurves => (1, 4),
            Suite::Ybe => (1, 3),
            Suite::GaugeLemma => (1, 6),
        };
        SizeRange { min, max }
    }

    pub fn default_m(self) -> SizeRange {
        match self {
            Suite::SpectralCurves => SizeRange { min: 1, max: 4 },
            Suite::Flows => SizeRange { min: 2, max: 3 },
            _ => SizeRange { min: 1, max: 3 },
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::MomentMaps | Suite::GaugeLemma => 50,
            Suite::PqDuality | Suite::Anticanonical | Suite::Ybe | Suite::CcDuality => 20,
            Suite::SpectralCurves => 25,
            Suite::PqViaSpectral => 10,
            Suite::Flows => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

/// Inclusive size range, written `lo..hi`; a single number `k` means `1..k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl SizeRange {
    pub fn values(self) -> Vec<usize> {
        (self.min..=self.max).collect()
    }
}

impl FromStr for SizeRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<SizeRange> {
        let bad = || Error::Invalid(format!("bad size range `{s}` (use `k` or `lo..hi`)"));
        let (min, max) = match s.split_once("..") {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => (1, s.trim().parse().map_err(|_| bad())?),
        };
        if min == 0 || min > max {
            return Err(bad());
        }
        Ok(SizeRange { min, max })
    }
}

impl TryFrom<String> for SizeRange {
    type Error = Error;
    fn try_from(s: String) -> Result<SizeRange> {
        s.parse()
    }
}

impl From<SizeRange> for String {
    fn from(r: SizeRange) -> String {
        format!("{}..{}", r.min, r.max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    pub n: Option<SizeRange>,
    pub m: Option<SizeRange>,
    /// Instances per check; sizes cycle over the N (then M) range.
    pub trials: Option<usize>,
    pub seed: u64,
    pub backend: Option<Backend>,
    /// Overrides the tolerance of every floating check.
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    /// Record wall time in the report (makes reports non-reproducible).
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: "all".into(),
            n: None,
            m: None,
            trials: None,
            seed: 0,
            backend: None,
            tol: None,
            threads: None,
            timing: false,
        }
    }
}

impl SuiteConfig {
    pub fn new(suite: &str) -> SuiteConfig {
        SuiteConfig {
            suite: suite.into(),
            ..SuiteConfig::default()
        }
    }
}

struct Ctx {
    seed: u64,
    backend: Backend,
    tol: Option<f64>,
}

impl Ctx {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// One generated instance: its index, sizes and digest.
#[derive(Clone)]
struct Inst {
    index: usize,
    n: usize,
    m: Option<usize>,
    digest: String,
}

impl Inst {
    fn row(&self, id: impl Into<String>, r: Result<f64>, tol: f64, exact: bool) -> CheckRow {
        let row = match r {
            Ok(x) => CheckRow::measured(id, self.index, self.n, &self.digest, x, tol, exact),
            Err(e) => CheckRow::failed(id, self.index, self.n, &self.digest, &e, tol, exact),
        };
        match self.m {
            Some(m) => row.with_m(m),
            None => row,
        }
    }
}

#[derive(Clone, Copy)]
struct Job {
    index: usize,
    n: usize,
    m: usize,
}

fn jobs(trials: usize, ns: &[usize], ms: &[usize]) -> Vec<Job> {
    (0..trials)
        .map(|index| Job {
            index,
            n: ns[index % ns.len()],
            m: ms[(index / ns.len()) % ms.len()],
        })
        .collect()
}

/// Residual of a matrix that should vanish: exact zero test or relative size.
fn mat_residual<T: Scalar>(m: &Matrix<T>, scale: f64) -> f64 {
    m.max_diff(&Matrix::zeros(m.rows(), m.cols())) / if T::EXACT { 1.0 } else { scale.max(1.0) }
}

fn scalar_residual<T: Scalar>(x: &T, scale: f64) -> f64 {
    if x.is_zero() {
        0.0
    } else if T::EXACT {
        x.modulus().max(f64::MIN_POSITIVE)
    } else {
        x.modulus() / scale.max(1.0)
    }
}

fn point_digest<T: JsonScalar>(kind: ModelKind, x: &PhasePoint<T>) -> String {
    digest(&point_to_json(kind, x))
}

/// Exact rationals avoiding `avoid` and each other.
fn fresh_rationals(rng: &mut impl Rng, avoid: &[Rational], k: usize, nonzero: bool) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    while out.len() < k {
        let r = if nonzero { random_nonzero_rational(rng) } else { random_rational(rng) };
        if !avoid.contains(&r) && !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

fn lax_c64(l: &MultiPoleLax<Rational>) -> MultiPoleLax<C64> {
    let f = |x: &Rational| x.to_c64();
    MultiPoleLax {
        kind: l.kind,
        twist: l.twist.iter().map(f).collect(),
        poles: l.poles.iter().map(f).collect(),
        xi: l.xi.map(f),
        eta: l.eta.map(f),
    }
}

// ---- moment maps ----

fn moment_rows(ctx: &Ctx, kind: ModelKind, job: Job) -> Vec<CheckRow> {
    let id = format!("moment-map/{}", kind.name());
    let mut rng = rng_for(ctx.seed, &id, job.index as u64);
    match ctx.backend {
        Backend::Exact => {
            let x = exact_point(kind, job.n, &mut rng);
            let inst = Inst {
                index: job.index,
                n: job.n,
                m: None,
                digest: point_digest(kind, &x),
            };
            let mut rows = vec![inst.row(&id, moment_residual(kind, &x).map(|r| mat_residual(&r, 1.0)), 0.0, true)];
            if kind == ModelKind::TrigRs {
                let s = trs_spectrum_check(&x);
                let r = s.map(|s| if s.rank_defect != 0 { f64::INFINITY } else { s.charpoly_residual });
                rows.push(inst.row("moment-map/trig_rs/spectrum", r, 0.0, true));
            }
            rows
        }
        Backend::Float => {
            let x = float_point(kind, job.n, &mut rng);
            let inst = Inst {
                index: job.index,
                n: job.n,
                m: None,
                digest: point_digest(kind, &x),
            };
            let r = lax(kind, &x).and_then(|l| Ok(mat_residual(&moment_residual(kind, &x)?, l.max_modulus().powi(2))));
            vec![inst.row(&id, r, ctx.tol(1e-10), false)]
        }
    }
}

// ---- action-angle maps ----

fn sorted(v: &[C64]) -> Vec<C64> {
    lex_order(v, REAL_TIE_TOL).into_iter().map(|i| v[i]).collect()
}

fn pq_rows(ctx: &Ctx, kind: ModelKind, job: Job) -> Vec<CheckRow> {
    let group = format!("pq/{}", kind.name());
    let mut rng = rng_for(ctx.seed, &group, job.index as u64);
    let x = float_point(kind, job.n, &mut rng);
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: None,
        digest: point_digest(kind, &x),
    };
    let d = dualize(kind, &x);
    let mut rows = vec![
        inst.row(format!("{group}/dual-lax"), d.as_ref().map(|d| d.relative_residual()).map_err(Clone::clone), ctx.tol(1e-8), false),
        inst.row(format!("{group}/involution"), involution_check(kind, &x), ctx.tol(1e-7), false),
    ];
    if kind == ModelKind::RationalCm {
        // dual positions are the spectrum of L, and the dual Lax matrix has
        // the original positions as its spectrum
        let r = d.and_then(|d| {
            let dist = |a: &[C64], b: &[C64]| {
                let (a, b) = (sorted(a), sorted(b));
                let scale = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
                a.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / scale
            };
            let forward = dist(&d.dual.q, &eigenvalues(&lax(ModelKind::RationalCm, &x)?)?);
            let back = dist(&eigenvalues(&lax(ModelKind::RationalCm, &d.dual)?)?, &x.q);
            Ok(forward.max(back))
        });
        rows.push(inst.row(format!("{group}/eigenvalues"), r, ctx.tol(1e-9), false));
    }
    rows
}

fn anticanonical_rows(ctx: &Ctx, kind: ModelKind, job: Job) -> Vec<CheckRow> {
    let id = format!("anticanonical/{}", kind.name());
    let mut rng = rng_for(ctx.seed, &id, job.index as u64);
    let x = float_point(kind, job.n, &mut rng);
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: None,
        digest: point_digest(kind, &x),
    };
    vec![inst.row(&id, check_anticanonical(kind, &x, ANTICANONICAL_STEP), ctx.tol(1e-5), false)]
}

// ---- spectral duality ----

fn curve_residual<T: Scalar>(l: &MultiPoleLax<T>, dual: &MultiPoleLax<T>) -> Result<f64> {
    let c = compare_curves(l, dual)?;
    let scale = c.original.coeffs.iter().flatten().map(T::modulus).fold(1.0, f64::max);
    Ok(if T::EXACT { c.max_diff } else { c.max_diff / scale })
}

fn curve_rows(ctx: &Ctx, family: &str, job: Job) -> Vec<CheckRow> {
    let id = format!("curve/{family}");
    let mut rng = rng_for(ctx.seed, &id, job.index as u64);
    let (n, m) = (job.n, job.m);
    let built: Result<(MultiPoleLax<Rational>, MultiPoleLax<Rational>)> = (|| match family {
        "rational_gaudin" => {
            let l = exact_multipole(SpectralKind::RationalGaudin, n, m, &mut rng);
            let d = dual_rational_gaudin(&l)?;
            Ok((l, d))
        }
        "trig_gaudin_to_xxx" => {
            let l = exact_trig_gaudin(n, m, &mut rng).reduce()?.lax;
            let d = dual_tgaudin_to_xxx(&l)?;
            Ok((l, d))
        }
        _ => {
            let (twist, sites) = exact_chain(n, m, true, &mut rng);
            let l = xxz_monodromy(&twist, &sites)?.lax;
            let d = dual_xxz_chain(&l)?;
            Ok((l, d))
        }
    })();
    let (l, d) = match built {
        Ok(x) => x,
        Err(e) => {
            let inst = Inst { index: job.index, n, m: Some(m), digest: String::new() };
            return vec![inst.row(&id, Err(e), ctx.tol(1e-9), ctx.backend == Backend::Exact)];
        }
    };
    let inst = Inst {
        index: job.index,
        n,
        m: Some(m),
        digest: digest(&lax_to_json(&l)),
    };
    match ctx.backend {
        Backend::Exact => vec![inst.row(&id, curve_residual(&l, &d), 0.0, true)],
        Backend::Float => vec![inst.row(&id, curve_residual(&lax_c64(&l), &lax_c64(&d)), ctx.tol(1e-9), false)],
    }
}

// ---- gauge lemma and chain residues ----

fn gauge_rows_t<T: Scalar + JsonScalar>(
    ctx: &Ctx,
    job: Job,
    twist: Vec<T>,
    xi: Matrix<T>,
    eta: Matrix<T>,
    exact: bool,
) -> Vec<CheckRow> {
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: Some(job.m),
        digest: digest(&serde_json::json!({
            "twist": vec_to_json(&twist), "xi": matrix_to_json(&xi), "eta": matrix_to_json(&eta)
        })),
    };
    let tol = ctx.tol(1e-10);
    let s = (&xi * &eta).strictly_lower();
    let g = gauge_matrix(&twist, &xi, &eta);
    let rec = g.as_ref().map_err(Clone::clone).and_then(|g| {
        let g2 = gauge_matrix_recursive(&twist, &s)?;
        Ok(mat_residual(&(g - &g2), g.max_modulus()))
    });
    let conj = g.and_then(|g| {
        let lam = Matrix::from_diag(&twist);
        let c = &(&g.inverse()? * &(&lam + &s)) * &g;
        Ok(mat_residual(&(&c - &lam), lam.max_modulus()))
    });
    vec![
        inst.row("gauge/closed-vs-recursive", rec, tol, exact),
        inst.row("gauge/conjugation", conj, tol, exact),
    ]
}

fn gauge_rows(ctx: &Ctx, job: Job) -> Vec<CheckRow> {
    let mut rng = rng_for(ctx.seed, "gauge", job.index as u64);
    let l = exact_multipole(SpectralKind::RationalGaudin, job.n, job.m, &mut rng);
    match ctx.backend {
        Backend::Exact => gauge_rows_t(ctx, job, l.twist, l.xi, l.eta, true),
        Backend::Float => {
            let l = lax_c64(&l);
            gauge_rows_t(ctx, job, l.twist, l.xi, l.eta, false)
        }
    }
}

/// Multi-pole forms against direct products (always exact).
fn chain_rows(ctx: &Ctx, job: Job) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for (family, xxz) in [("xxx", false), ("xxz", true)] {
        let id = format!("chain/{family}-residues");
        let mut rng = rng_for(ctx.seed, &id, job.index as u64);
        let (twist, sites) = exact_chain(job.n, job.m, xxz, &mut rng);
        let inh: Vec<Rational> = sites.iter().map(|s| s.inhomogeneity.clone()).collect();
        let zs = fresh_rationals(&mut rng, &inh, 2, true);
        let inst = Inst {
            index: job.index,
            n: job.n,
            m: Some(job.m),
            digest: digest(&serde_json::json!({
                "twist": vec_to_json(&twist),
                "inhomogeneities": vec_to_json(&inh),
                "x": sites.iter().map(|s| vec_to_json(&s.x)).collect::<Vec<_>>(),
                "y": sites.iter().map(|s| vec_to_json(&s.y)).collect::<Vec<_>>(),
                "lower": sites.iter().map(|s| s.lower.as_ref().map(matrix_to_json)).collect::<Vec<_>>(),
            })),
        };
        let r = (|| -> Result<f64> {
            let mut worst: f64 = 0.0;
            if xxz {
                let mono = xxz_monodromy(&twist, &sites)?;
                let gi = mono.gauge.inverse()?;
                for z in &zs {
                    let direct = &(&gi * &xxz_product(&twist, &sites, z)?) * &mono.gauge;
                    worst = worst.max(direct.max_diff(&mono.lax.evaluate(z)?));
                }
            } else {
                let mono = xxx_monodromy(&twist, &sites)?;
                for z in &zs {
                    worst = worst.max(xxx_product(&twist, &sites, z)?.max_diff(&mono.evaluate(z)?));
                }
            }
            Ok(worst)
        })();
        rows.push(inst.row(id, r, 0.0, true));
    }
    let id = "trig-gaudin/reduction";
    let mut rng = rng_for(ctx.seed, id, job.index as u64);
    let raw = exact_trig_gaudin(job.n, job.m, &mut rng);
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: Some(job.m),
        digest: digest(&serde_json::json!({
            "twist": vec_to_json(&raw.twist), "poles": vec_to_json(&raw.poles),
            "xi": matrix_to_json(&raw.xi), "eta": matrix_to_json(&raw.eta)
        })),
    };
    let zs = fresh_rationals(&mut rng, &raw.poles, 2, false);
    let r = (|| -> Result<f64> {
        let red = raw.reduce()?;
        let gi = red.gauge.inverse()?;
        let mut worst: f64 = 0.0;
        for z in &zs {
            let direct = &(&gi * &raw.evaluate(z)?) * &red.gauge;
            worst = worst.max(direct.max_diff(&red.lax.evaluate(z)?));
        }
        Ok(worst)
    })();
    rows.push(inst.row(id, r, 0.0, true));
    rows
}

// ---- classical Yang–Baxter ----

fn ybe_rows(ctx: &Ctx, variant: RVariant, job: Job) -> Vec<CheckRow> {
    let id = format!("cybe/{}", variant.name());
    let mut rng = rng_for(ctx.seed, &id, job.index as u64);
    let z = fresh_rationals(&mut rng, &[], 3, true);
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: None,
        digest: digest(&vec_to_json(&z)),
    };
    let r = match ctx.backend {
        Backend::Exact => cybe_residual(variant, job.n, [&z[0], &z[1], &z[2]]).map(|m| mat_residual(&m, 1.0)),
        Backend::Float => {
            let c: Vec<C64> = z.iter().map(Rational::to_c64).collect();
            cybe_residual(variant, job.n, [&c[0], &c[1], &c[2]]).map(|m| {
                let scale = z.iter().map(|x| x.modulus()).fold(1.0, f64::max);
                mat_residual(&m, scale * scale)
            })
        }
    };
    vec![inst.row(id, r, ctx.tol(1e-10), ctx.backend == Backend::Exact)]
}

// ---- classical-classical duality ----

fn cc_rows_t<T: Scalar + JsonScalar>(ctx: &Ctx, job: Job, x: &PhasePoint<T>) -> Vec<CheckRow> {
    let exact = T::EXACT;
    let tol = ctx.tol(1e-10);
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: None,
        digest: point_digest(ModelKind::RationalCm, x),
    };
    let ids = ["cc/h0-equals-cm", "cc/gaudin-hamiltonians-vanish", "cc/schlesinger-equals-minus-p", "cc/schlesinger-canonical"];
    let rep = match verify_cc_identifications(x) {
        Ok(r) => r,
        Err(e) => return ids.iter().map(|id| inst.row(*id, Err(e.clone()), tol, exact)).collect(),
    };
    let scale = rep.h0.modulus();
    let worst = |v: Vec<T>, s: f64| v.iter().map(|h| scalar_residual(h, s)).fold(0.0, f64::max);
    let sch: Vec<T> = rep
        .schlesinger
        .hamiltonians
        .iter()
        .zip(&rep.expected_schlesinger)
        .map(|(h, e)| h.clone() - e.clone())
        .collect();
    let n = x.n();
    let minus_id = Matrix::<T>::identity(n).scale(&-T::one());
    let canon = mat_residual(&(&rep.dh_dp - &minus_id), 1.0).max(mat_residual(&rep.dh_dq, 1.0));
    vec![
        inst.row(ids[0], Ok(scalar_residual(&(rep.h0.clone() - rep.cm_hamiltonian.clone()), scale)), tol, exact),
        inst.row(ids[1], Ok(worst(rep.gaudin.hamiltonians.clone(), scale)), tol, exact),
        inst.row(ids[2], Ok(worst(sch, scale)), tol, exact),
        inst.row(ids[3], Ok(canon), if exact { 0.0 } else { ctx.tol(1e-6) }, exact),
    ]
}

fn cc_rows(ctx: &Ctx, job: Job) -> Vec<CheckRow> {
    let mut rng = rng_for(ctx.seed, "cc", job.index as u64);
    let x = exact_point(ModelKind::RationalCm, job.n, &mut rng);
    match ctx.backend {
        Backend::Exact => cc_rows_t(ctx, job, &x),
        Backend::Float => cc_rows_t(ctx, job, &x.to_c64()),
    }
}

// ---- flows ----

fn flow_rows(ctx: &Ctx, kind: ModelKind, job: Job) -> Vec<CheckRow> {
    let group = format!("flow/{}", kind.name());
    let mut rng = rng_for(ctx.seed, &group, job.index as u64);
    let x = flow_point(kind, job.n, &mut rng);
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: None,
        digest: point_digest(kind, &x),
    };
    let drift = evolve_manybody(kind, &x, FLOW_T_END, FLOW_DT, usize::MAX).map(|f| f.max_drift());
    let ratio = convergence_ratio(kind, &x, FLOW_T_END, ORDER_DT);
    // a fourth-order method halves the error by 16; accept ratios in [8, 32]
    let order_row = match ratio {
        Ok(r) => inst
            .row(format!("{group}/rk4-order"), Ok((r.log2() - 4.0).abs()), 1.0, false)
            .with_note(format!("drift ratio {r:.3}")),
        Err(e) => inst.row(format!("{group}/rk4-order"), Err(e), 1.0, false),
    };
    vec![inst.row(format!("{group}/invariant-drift"), drift, ctx.tol(1e-7), false), order_row]
}

fn gaudin_flow_rows(ctx: &Ctx, job: Job) -> Vec<CheckRow> {
    let mut rng = rng_for(ctx.seed, "flow/gaudin", job.index as u64);
    let model = gaudin_flow_model(job.n, job.m, &mut rng);
    let a = job.index % job.m;
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: Some(job.m),
        digest: digest(&serde_json::json!({
            "constant": matrix_to_json(&model.constant),
            "poles": vec_to_json(&model.poles),
            "residues": model.residues.iter().map(matrix_to_json).collect::<Vec<Value>>(),
            "flow": a,
        })),
    };
    let r = evolve_gaudin(&model, a, FLOW_T_END, FLOW_DT).map(|f| f.max_drift());
    let mut rows = vec![inst.row("flow/gaudin/invariants", r, ctx.tol(1e-7), false)];

    // exact identities on a rational model
    let mut rng = rng_for(ctx.seed, "flow/gaudin-exact", job.index as u64);
    let l = exact_multipole(SpectralKind::RationalGaudin, job.n, job.m, &mut rng);
    let sum = l.to_pole_sum();
    let exact_inst = Inst {
        digest: digest(&lax_to_json(&l)),
        ..inst
    };
    let vel = gaudin_velocity(&sum, a);
    let br = bracket_velocity(&sum, a);
    let worst = vel.iter().zip(&br).map(|(u, v)| u.max_diff(v)).fold(0.0, f64::max);
    rows.push(exact_inst.row("flow/gaudin/bracket", Ok(worst), 0.0, true));
    let zs = fresh_rationals(&mut rng, &sum.poles, 2, false);
    let kappa = random_nonzero_rational(&mut rng);
    let r = zs.iter().try_fold(0.0f64, |acc, z| {
        Ok(acc.max(mat_residual(&schlesinger_residual(&sum, a, z, &kappa)?, 1.0)))
    });
    rows.push(exact_inst.row("flow/schlesinger/residual", r, 0.0, true));
    rows
}

// ---- spectral route to the action-angle maps ----

fn pipeline_rows(ctx: &Ctx, kind: ModelKind, job: Job) -> Vec<CheckRow> {
    let group = format!("pipeline/{}", kind.name());
    let mut rng = rng_for(ctx.seed, &group, job.index as u64);
    let x = float_point(kind, job.n, &mut rng);
    let inst = Inst {
        index: job.index,
        n: job.n,
        m: None,
        digest: point_digest(kind, &x),
    };
    let tol = ctx.tol(1e-8);
    let mut rows = Vec::new();
    match pq_via_spectral(kind, &x) {
        Ok(out) => {
            for (stage, r) in &out.stages {
                rows.push(inst.row(format!("{group}/{stage}"), Ok(*r), tol, false));
            }
            rows.push(inst.row(format!("{group}/agreement"), Ok(out.agreement), tol, false));
        }
        Err(e) => rows.push(inst.row(format!("{group}/agreement"), Err(e), tol, false)),
    }

    // exact statements on a rational point
    let y = exact_point(kind, job.n, &mut rng);
    let exact_inst = Inst {
        digest: point_digest(kind, &y),
        ..inst
    };
    let zs = fresh_rationals(&mut rng, &y.q, 3, false);
    let pole_form = fictitious_pole_sum(kind, &y).and_then(|s| {
        let mut worst: f64 = 0.0;
        for z in &zs {
            worst = worst.max(s.evaluate(z)?.max_diff(&fictitious_gauge(kind, &y, z)?));
        }
        Ok((worst, residue_rank_defect(&s)))
    });
    let (pf, rank) = match pole_form {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e.clone()), Err(e)),
    };
    rows.push(exact_inst.row(format!("{group}/pole-form"), pf, 0.0, true));
    rows.push(exact_inst.row(format!("{group}/rank-one-residues"), rank, 0.0, true));
    // characteristic polynomial of the fictitious Lax matrix at several z
    let indep = fictitious_pole_sum(kind, &y).and_then(|s| {
        let base = char_poly(&lax(kind, &y)?)?;
        let mut worst: f64 = 0.0;
        for z in &zs {
            worst = worst.max(char_poly(&s.evaluate(z)?)?.max_diff(&base));
        }
        Ok(worst)
    });
    rows.push(exact_inst.row(format!("{group}/z-independence"), indep, 0.0, true));
    rows
}

fn suite_rows(ctx: &Ctx, suite: Suite, cfg: &SuiteConfig) -> Vec<CheckRow> {
    let ns = cfg.n.unwrap_or_else(|| suite.default_n()).values();
    let ms = cfg.m.unwrap_or_else(|| suite.default_m()).values();
    let trials = cfg.trials.unwrap_or_else(|| suite.default_trials());
    let js = jobs(trials, &ns, &ms);
    let per_kind = |kinds: &[ModelKind], f: fn(&Ctx, ModelKind, Job) -> Vec<CheckRow>| -> Vec<CheckRow> {
        let tasks: Vec<(ModelKind, Job)> = kinds.iter().flat_map(|k| js.iter().map(move |j| (*k, *j))).collect();
        tasks.par_iter().flat_map_iter(|(k, j)| f(ctx, *k, *j)).collect()
    };
    let plain = |f: &(dyn Fn(&Ctx, Job) -> Vec<CheckRow> + Sync)| -> Vec<CheckRow> {
        js.par_iter().flat_map_iter(|j| f(ctx, *j)).collect()
    };
    let three = [ModelKind::RationalCm, ModelKind::TrigCms, ModelKind::TrigRs];
    match suite {
        Suite::MomentMaps => per_kind(&ModelKind::ALL, moment_rows),
        Suite::PqDuality => per_kind(&ModelKind::ALL, pq_rows),
        Suite::Anticanonical => per_kind(&three, anticanonical_rows),
        Suite::SpectralCurves => ["rational_gaudin", "trig_gaudin_to_xxx", "xxz_chain"]
            .par_iter()
            .flat_map_iter(|fam| js.iter().flat_map(move |j| curve_rows(ctx, fam, *j)))
            .collect(),
        Suite::Ybe => [RVariant::XxzMultiplicative, RVariant::Twisted]
            .par_iter()
            .flat_map_iter(|v| js.iter().flat_map(move |j| ybe_rows(ctx, *v, *j)))
            .collect(),
        Suite::GaugeLemma => {
            let mut rows = plain(&gauge_rows);
            rows.extend(plain(&chain_rows));
            rows
        }
        Suite::CcDuality => plain(&cc_rows),
        Suite::Flows => {
            let mut rows = per_kind(&ModelKind::ALL, flow_rows);
            rows.extend(plain(&gaudin_flow_rows));
            rows
        }
        Suite::PqViaSpectral => per_kind(&three, pipeline_rows),
    }
}

fn default_backend(suite: Suite) -> Backend {
    match suite {
        Suite::PqDuality | Suite::Anticanonical | Suite::Flows | Suite::PqViaSpectral => Backend::Float,
        _ => Backend::Exact,
    }
}

fn thread_count(cfg: &SuiteConfig) -> Result<Option<usize>> {
    if let Some(t) = cfg.threads {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Invalid(format!("{THREADS_ENV} must be a positive integer, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

/// Run the suite named in `cfg` and collect a report. Reports depend only
/// on the configuration, not on the thread count, unless timing is enabled.
pub fn run_suite(cfg: &SuiteConfig) -> Result<DualityReport> {
    let suites = Suite::parse_list(&cfg.suite)?;
    if cfg.trials == Some(0) {
        return Err(Error::Invalid("trials must be positive".into()));
    }
    if let Some(t) = cfg.tol {
        if !(t > 0.0) {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
    }
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_count(cfg)? {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| Error::Invalid(e.to_string()))?;
    let rows = pool.install(|| {
        suites
            .iter()
            .flat_map(|s| {
                let ctx = Ctx {
                    seed: cfg.seed,
                    backend: cfg.backend.unwrap_or_else(|| default_backend(*s)),
                    tol: cfg.tol,
                };
                suite_rows(&ctx, *s, cfg)
            })
            .collect::<Vec<_>>()
    });
    let backend = cfg.backend.map_or("default", Backend::name);
    let mut report = DualityReport::new(&cfg.suite, cfg.seed, backend, rows);
    if cfg.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges_parse() {
        assert_eq!("2..4".parse::<SizeRange>().unwrap(), SizeRange { min: 2, max: 4 });
        assert_eq!("3".parse::<SizeRange>().unwrap(), SizeRange { min: 1, max: 3 });
        assert!("4..2".parse::<SizeRange>().is_err());
        assert!("0".parse::<SizeRange>().is_err());
    }

    #[test]
    fn jobs_cycle_over_sizes() {
        let js = jobs(7, &[1, 2, 3], &[5, 6]);
        let sizes: Vec<_> = js.iter().map(|j| (j.n, j.m)).collect();
        assert_eq!(sizes, vec![(1, 5), (2, 5), (3, 5), (1, 6), (2, 6), (3, 6), (1, 5)]);
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(run_suite(&SuiteConfig::new("nope")), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn small_ybe_run_passes() {
        let cfg = SuiteConfig {
            trials: Some(2),
            ..SuiteConfig::new("ybe")
        };
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.pass);
    }

    #[test]
    fn config_roundtrips_through_json() {
        let cfg = SuiteConfig {
            n: Some(SizeRange { min: 2, max: 3 }),
            backend: Some(Backend::Float),
            ..SuiteConfig::new("flows")
        };
        let s = serde_json::to_string(&cfg).unwrap();
        assert!(s.contains("\"2..3\""));
        assert_eq!(serde_json::from_str::<SuiteConfig>(&s).unwrap(), cfg);
    }
}
