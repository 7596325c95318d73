//! Result tables and their CSV/JSON forms.
//!
//! CSV layout: `#` header lines (experiment, anchor, config echo), one column
//! header row, payload rows, and a final `# sha256:` line over the column
//! header and payload rows. Nothing run-dependent (wall time, thread count)
//! goes into the file; that lives in the JSON sidecar.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// One summary cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    /// Values for the experiment's parameter columns, in column order.
    pub params: Vec<String>,
    pub stat: String,
    pub value: f64,
    pub ci: Option<(f64, f64)>,
    pub n_reps: u64,
}

/// A property asserted by an experiment, emitted as a `check:` row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub experiment: String,
    /// What the experiment exercises, in words.
    pub anchor: String,
    pub config: String,
    pub param_names: Vec<String>,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
}

impl ExperimentResult {
    pub fn new(experiment: &str, anchor: &str, config: String, param_names: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            anchor: anchor.to_string(),
            config,
            param_names: param_names.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, params: &[String], stat: &str, value: f64, ci: Option<(f64, f64)>, n_reps: u64) {
        debug_assert_eq!(params.len(), self.param_names.len());
        self.rows.push(Row { params: params.to_vec(), stat: stat.to_string(), value, ci, n_reps });
    }

    pub fn check(&mut self, name: &str, pass: bool) {
        self.checks.push(Check { name: name.to_string(), pass });
    }

    /// First row matching `stat` whose parameters equal `params`.
    pub fn find(&self, params: &[&str], stat: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.stat == stat && r.params.iter().map(String::as_str).eq(params.iter().copied()))
    }

    pub fn value(&self, params: &[&str], stat: &str) -> Option<f64> {
        self.find(params, stat).map(|r| r.value)
    }

    pub fn check_passed(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.pass)
    }

    fn payload_lines(&self) -> Vec<String> {
        let mut lines = Vec::with_capacity(self.rows.len() + self.checks.len() + 1);
        let mut header = vec!["experiment".to_string()];
        header.extend(self.param_names.iter().cloned());
        header.extend(["stat", "value", "ci_lo", "ci_hi", "n_reps"].map(String::from));
        lines.push(header.join(","));
        let blank = vec![String::new(); self.param_names.len()];
        for r in &self.rows {
            let (lo, hi) = r.ci.map_or((String::new(), String::new()), |(a, b)| (fmt_f64(a), fmt_f64(b)));
            let mut f = vec![self.experiment.clone()];
            f.extend(r.params.iter().cloned());
            f.extend([r.stat.clone(), fmt_f64(r.value), lo, hi, r.n_reps.to_string()]);
            lines.push(f.join(","));
        }
        for c in &self.checks {
            let mut f = vec![self.experiment.clone()];
            f.extend(blank.iter().cloned());
            let v = if c.pass { "1" } else { "0" };
            f.extend([format!("check:{}", c.name), v.to_string(), String::new(), String::new(), String::new()]);
            lines.push(f.join(","));
        }
        lines
    }

    pub fn to_csv(&self) -> String {
        let payload = self.payload_lines();
        let mut out = String::new();
        out.push_str(&format!("# experiment: {}\n", self.experiment));
        out.push_str(&format!("# anchor: {}\n", self.anchor));
        out.push_str(&format!("# config: {}\n", self.config));
        for l in &payload {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&format!("# sha256: {}\n", checksum(&payload)));
        out
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("results always serialize");
        v["sha256"] = checksum(&self.payload_lines()).into();
        let mut s = serde_json::to_string_pretty(&v).expect("results always serialize");
        s.push('\n');
        s
    }

    pub fn checksum(&self) -> String {
        checksum(&self.payload_lines())
    }
}

fn checksum(lines: &[String]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Run metadata written next to a result file.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub experiment: String,
    pub seed: u64,
    pub version: &'static str,
    pub wall_time_s: f64,
    pub threads: usize,
    pub sha256: String,
}

/// Shortest decimal that reads back to the same `f64` (at most 17
/// significant digits); scientific notation outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn fmt_params(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt_f64(v)).collect()
}
