//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.

use std::time::{Duration, Instant};

use duality_core::report::DualityReport;
use duality_core::suite::{run_suite, Backend, SizeRange, SuiteConfig};

const SEED: u64 = 20240917;

struct Expect {
    /// Check id, required instance count and the tolerance ceiling (0 for exact).
    checks: Vec<(String, usize, f64)>,
    n: (usize, usize),
    budget: Option<Duration>,
}

fn config(suite: &str, n: (usize, usize), m: Option<(usize, usize)>, trials: usize, backend: Option<Backend>) -> SuiteConfig {
    SuiteConfig {
        n: Some(SizeRange { min: n.0, max: n.1 }),
        m: m.map(|(min, max)| SizeRange { min, max }),
        trials: Some(trials),
        seed: SEED,
        backend,
        ..SuiteConfig::new(suite)
    }
}

fn run(cfg: &SuiteConfig) -> Result<(DualityReport, Duration), String> {
    let start = Instant::now();
    let rep = run_suite(cfg).map_err(|e| e.to_string())?;
    Ok((rep, start.elapsed()))
}

fn judge(cfg: SuiteConfig, expect: Expect) -> Result<String, String> {
    let (rep, took) = run(&cfg)?;
    if let Some(budget) = expect.budget {
        if took > budget {
            return Err(format!("took {took:.2?}, budget {budget:?}"));
        }
    }
    let mut worst = 0f64;
    for (id, count, tol) in &expect.checks {
        let rows: Vec<_> = rep.rows.iter().filter(|r| &r.check_id == id).collect();
        if rows.len() != *count {
            return Err(format!("{id}: {} instances, wanted {count}", rows.len()));
        }
        for r in rows {
            if r.n < expect.n.0 || r.n > expect.n.1 {
                return Err(format!("{id}#{}: N = {} outside range", r.instance, r.n));
            }
            let Some(res) = r.residual else {
                return Err(format!("{id}#{}: {}", r.instance, r.note.clone().unwrap_or_default()));
            };
            let ok = if *tol == 0.0 { r.exact && res == 0.0 } else { res <= *tol && r.pass };
            if !ok {
                return Err(format!("{id}#{}: residual {res:e} (limit {tol:e})", r.instance));
            }
            if *tol > 0.0 {
                worst = worst.max(res);
            }
        }
    }
    if !rep.pass {
        let f = rep.failures().next().expect("a failing row");
        return Err(format!("{}#{} failed", f.check_id, f.instance));
    }
    Ok(format!("{} rows, max float residual {worst:.2e}, {took:.2?}", rep.rows.len()))
}

fn ids(prefix: &str, names: &[&str], suffix: &str, count: usize, tol: f64) -> Vec<(String, usize, f64)> {
    names.iter().map(|k| (format!("{prefix}{k}{suffix}"), count, tol)).collect()
}

const MODEL_KINDS: [&str; 4] = ["rational_cm", "rational_rs", "trig_cms", "trig_rs"];
const PIPELINE_KINDS: [&str; 3] = ["rational_cm", "trig_cms", "trig_rs"];

fn ac1() -> Result<String, String> {
    judge(
        config("moment-maps", (2, 6), None, 50, Some(Backend::Exact)),
        Expect {
            checks: ids("moment-map/", &MODEL_KINDS, "", 50, 0.0),
            n: (2, 6),
            budget: Some(Duration::from_secs(10)),
        },
    )
}

fn ac2() -> Result<String, String> {
    let checks = vec![
        ("pq/rational_cm/dual-lax".to_string(), 20, 1e-8),
        ("pq/rational_cm/involution".to_string(), 20, 1e-7),
        ("pq/rational_cm/eigenvalues".to_string(), 20, 1e-9),
    ];
    judge(config("pq-duality", (2, 4), None, 20, None), Expect { checks, n: (2, 4), budget: None })
}

fn ac3() -> Result<String, String> {
    judge(
        config("anticanonical", (2, 3), None, 20, None),
        Expect {
            checks: ids("anticanonical/", &PIPELINE_KINDS, "", 20, 1e-5),
            n: (2, 3),
            budget: None,
        },
    )
}

fn ac4() -> Result<String, String> {
    judge(
        config("spectral-curves", (1, 4), Some((1, 4)), 25, Some(Backend::Exact)),
        Expect {
            checks: ids("curve/", &["rational_gaudin", "trig_gaudin_to_xxx", "xxz_chain"], "", 25, 0.0),
            n: (1, 4),
            budget: Some(Duration::from_secs(30)),
        },
    )
}

fn ac5() -> Result<String, String> {
    judge(
        config("gauge-lemma", (1, 6), Some((1, 3)), 50, Some(Backend::Exact)),
        Expect {
            checks: ids("gauge/", &["closed-vs-recursive", "conjugation"], "", 50, 0.0),
            n: (1, 6),
            budget: None,
        },
    )
}

fn ac6() -> Result<String, String> {
    judge(
        config("ybe", (1, 3), None, 20, Some(Backend::Exact)),
        Expect {
            checks: ids("cybe/", &["xxz_multiplicative", "twisted"], "", 20, 0.0),
            n: (1, 3),
            budget: None,
        },
    )
}

fn ac7() -> Result<String, String> {
    let mut checks = ids("pipeline/", &PIPELINE_KINDS, "/agreement", 10, 1e-8);
    checks.extend(ids("pipeline/", &PIPELINE_KINDS, "/z-independence", 10, 0.0));
    judge(config("pq-via-spectral", (2, 4), None, 10, None), Expect { checks, n: (2, 4), budget: None })
}

fn ac8() -> Result<String, String> {
    judge(
        config("cc-duality", (2, 6), None, 20, Some(Backend::Exact)),
        Expect {
            checks: ids(
                "cc/",
                &["h0-equals-cm", "gaudin-hamiltonians-vanish", "schlesinger-equals-minus-p", "schlesinger-canonical"],
                "",
                20,
                0.0,
            ),
            n: (2, 6),
            budget: None,
        },
    )
}

fn ac9() -> Result<String, String> {
    let trials = 3;
    let mut checks = ids("flow/", &MODEL_KINDS, "/invariant-drift", trials, 1e-7);
    // rk4-order residual is |log2(ratio) - 4|, at most 1 exactly when the ratio is in [8, 32]
    checks.extend(ids("flow/", &MODEL_KINDS, "/rk4-order", trials, 1.0));
    checks.push(("flow/gaudin/invariants".into(), trials, 1e-7));
    checks.push(("flow/schlesinger/residual".into(), trials, 0.0));
    judge(config("flows", (2, 4), Some((2, 3)), trials, None), Expect { checks, n: (2, 4), budget: None })
}

fn ac10() -> Result<String, String> {
    let cfg = SuiteConfig {
        trials: Some(4),
        seed: SEED,
        ..SuiteConfig::new("all")
    };
    let (a, _) = run(&cfg)?;
    let (b, _) = run(&cfg)?;
    let (a, b) = (a.to_json(), b.to_json());
    if a != b {
        return Err("reports differ between runs".into());
    }
    Ok(format!("{} bytes identical", a.len()))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Result<String, String>); 10] = [
        ("AC1", "moment-map identities", ac1),
        ("AC2", "rational CM duality", ac2),
        ("AC3", "anticanonical maps", ac3),
        ("AC4", "spectral-curve coincidence", ac4),
        ("AC5", "gauge lemma", ac5),
        ("AC6", "classical Yang-Baxter", ac6),
        ("AC7", "duality via spectral curves", ac7),
        ("AC8", "classical-classical duality", ac8),
        ("AC9", "flows", ac9),
        ("AC10", "determinism", ac10),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {id:<5} {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:<5} {name}: {why}");
            }
        }
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
