use duality_core::suite::{run_suite, Backend, SizeRange, SuiteConfig};
use duality_core::Error;

#[test]
fn exact_moment_maps_small_run() {
    let cfg = SuiteConfig {
        n: Some(SizeRange { min: 1, max: 4 }),
        trials: Some(10),
        seed: 42,
        backend: Some(Backend::Exact),
        ..SuiteConfig::new("moment-maps")
    };
    let rep = run_suite(&cfg).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.backend, "exact");
    assert!(rep.rows.iter().all(|r| r.exact && r.residual == Some(0.0)));
    assert!(rep.wall_time_ms.is_none());
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let base = SuiteConfig {
        trials: Some(3),
        seed: 7,
        ..SuiteConfig::new("all")
    };
    let one = run_suite(&SuiteConfig { threads: Some(1), ..base.clone() }).unwrap();
    let four = run_suite(&SuiteConfig { threads: Some(4), ..base }).unwrap();
    assert_eq!(one.to_json(), four.to_json());
}

#[test]
fn seeds_change_instances() {
    let cfg = |seed| SuiteConfig {
        trials: Some(2),
        seed,
        ..SuiteConfig::new("ybe")
    };
    let a = run_suite(&cfg(1)).unwrap();
    let b = run_suite(&cfg(2)).unwrap();
    assert_ne!(a.rows[0].instance_digest, b.rows[0].instance_digest);
}

#[test]
fn bad_configs_are_rejected() {
    assert!(matches!(run_suite(&SuiteConfig::new("nope")), Err(Error::UnknownSuite(_))));
    let zero = SuiteConfig {
        trials: Some(0),
        ..SuiteConfig::new("ybe")
    };
    assert!(run_suite(&zero).is_err());
    let tol = SuiteConfig {
        tol: Some(0.0),
        ..SuiteConfig::new("pq-duality")
    };
    assert!(run_suite(&tol).is_err());
}

#[test]
fn tight_tolerance_fails_float_checks() {
    let cfg = SuiteConfig {
        trials: Some(2),
        tol: Some(1e-300),
        ..SuiteConfig::new("anticanonical")
    };
    let rep = run_suite(&cfg).unwrap();
    assert!(!rep.pass);
    assert!(rep.summary.iter().all(|s| s.failures > 0));
}
