//! Check rows and the report written by the suite runner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One checked property on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check_id: String,
    pub instance: usize,
    /// Matrix size N.
    pub n: usize,
    /// Number of poles or sites, where the check has them.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    pub instance_digest: String,
    /// `None` when the check could not be evaluated.
    pub residual: Option<f64>,
    /// 0 for exact checks.
    pub tolerance: f64,
    pub exact: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckRow {
    /// A row that passes when `residual <= tolerance` (`== 0` on exact checks).
    pub fn measured(check_id: impl Into<String>, instance: usize, n: usize, digest: &str, residual: f64, tolerance: f64, exact: bool) -> CheckRow {
        let pass = if exact { residual == 0.0 } else { residual <= tolerance };
        CheckRow {
            check_id: check_id.into(),
            instance,
            n,
            m: None,
            instance_digest: digest.to_string(),
            residual: Some(residual),
            tolerance: if exact { 0.0 } else { tolerance },
            exact,
            pass,
            note: None,
        }
    }

    /// A failed row for a check that raised an error.
    pub fn failed(check_id: impl Into<String>, instance: usize, n: usize, digest: &str, err: &Error, tolerance: f64, exact: bool) -> CheckRow {
        CheckRow {
            check_id: check_id.into(),
            instance,
            n,
            m: None,
            instance_digest: digest.to_string(),
            residual: None,
            tolerance: if exact { 0.0 } else { tolerance },
            exact,
            pass: false,
            note: Some(err.to_string()),
        }
    }

    pub fn with_m(mut self, m: usize) -> CheckRow {
        self.m = Some(m);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckRow {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check_id: String,
    pub instances: usize,
    pub failures: usize,
    /// Largest residual over evaluated instances.
    pub max_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub suite: String,
    pub seed: u64,
    pub backend: String,
    pub rows: Vec<CheckRow>,
    pub summary: Vec<CheckSummary>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

impl DualityReport {
    /// Sort rows by `(check_id, instance)` and fill in the summary.
    pub fn new(suite: &str, seed: u64, backend: &str, mut rows: Vec<CheckRow>) -> DualityReport {
        rows.sort_by(|a, b| a.check_id.cmp(&b.check_id).then(a.instance.cmp(&b.instance)));
        let mut summary: Vec<CheckSummary> = Vec::new();
        for r in &rows {
            if summary.last().map(|s| s.check_id != r.check_id).unwrap_or(true) {
                summary.push(CheckSummary {
                    check_id: r.check_id.clone(),
                    instances: 0,
                    failures: 0,
                    max_residual: None,
                });
            }
            let s = summary.last_mut().expect("pushed above");
            s.instances += 1;
            s.failures += usize::from(!r.pass);
            if let Some(x) = r.residual {
                s.max_residual = Some(s.max_residual.map_or(x, |m: f64| m.max(x)));
            }
        }
        let pass = rows.iter().all(|r| r.pass);
        DualityReport {
            suite: suite.to_string(),
            seed,
            backend: backend.to_string(),
            rows,
            summary,
            pass,
            wall_time_ms: None,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_id", "instance", "n", "m", "instance_digest", "residual", "tolerance", "exact", "pass", "note"])
            .map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.check_id.clone(),
                r.instance.to_string(),
                r.n.to_string(),
                r.m.map(|m| m.to_string()).unwrap_or_default(),
                r.instance_digest.clone(),
                r.residual.map(|x| format!("{x:e}")).unwrap_or_default(),
                format!("{:e}", r.tolerance),
                r.exact.to_string(),
                r.pass.to_string(),
                r.note.clone().unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Human-readable per-check summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.summary {
            let worst = s.max_residual.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "n/a".into());
            out.push_str(&format!(
                "{} {:<44} {:>4} instances  max residual {}\n",
                if s.failures == 0 { "PASS" } else { "FAIL" },
                s.check_id,
                s.instances,
                worst
            ));
        }
        out.push_str(&format!("{}: {}\n", self.suite, if self.pass { "PASS" } else { "FAIL" }));
        out
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}
