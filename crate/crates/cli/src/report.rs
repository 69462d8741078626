//! Machine-readable reports and their independent re-verification.
//!
//! Node indices in reports are 1-based, like model files. Rationals are
//! `"p"` or `"p/q"` strings. Everything except `timing` is a deterministic
//! function of the model and the command line.

use herd_core::positivity::{verify_dual, verify_primal, Certificate, HerdabilityVerdict};
use herd_core::rational::{format_vector, parse_rational};
use herd_core::system::{controllability_matrix, SystemPair};
use herd_core::{Rational, RationalMatrix};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::Model;

pub const SCHEMA_VERSION: u32 = 1;

/// Keys whose values (recursively) are node indices.
const NODE_KEYS: [&str; 9] = [
    "clusters",
    "follower",
    "leader",
    "leaders",
    "layers",
    "parent",
    "first",
    "second",
    "permutation",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    pub m: usize,
}

impl ModelSummary {
    pub fn of(model: &Model) -> Self {
        Self {
            name: model.metadata.name.clone(),
            n: model.pair.n(),
            m: model.pair.m(),
        }
    }
}

/// The pair a certificate is about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Subject {
    /// `(A, B)` exactly as in the model file.
    Model,
    /// `A` from the model with a selection input on these 1-based nodes.
    Leaders { leaders: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Primal,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub subject: Subject,
    pub herdable: bool,
    pub method: String,
    pub kind: CertificateKind,
    pub vector: Vec<String>,
}

impl CertificateEntry {
    pub fn new(subject: Subject, verdict: &HerdabilityVerdict) -> Self {
        let (kind, vector) = match &verdict.certificate {
            Certificate::Primal(u) => (CertificateKind::Primal, u),
            Certificate::Dual(y) => (CertificateKind::Dual, y),
        };
        Self {
            subject,
            herdable: verdict.herdable,
            method: verdict.method.clone(),
            kind,
            vector: format_vector(vector),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub x0: Vec<String>,
    pub threshold: String,
    /// `inputs[t]` is `u(t)`.
    pub inputs: Vec<Vec<String>>,
    pub final_state: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub index_base: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub herdable: Option<bool>,
    #[serde(default)]
    pub certificates: Vec<CertificateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanRecord>,
    #[serde(default)]
    pub details: Value,
    #[serde(default)]
    pub inconsistencies: Vec<String>,
    #[serde(default)]
    pub timing: Timing,
}

impl Report {
    pub fn new(command: &str, model: Option<&Model>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            index_base: 1,
            model: model.map(ModelSummary::of),
            herdable: None,
            certificates: Vec::new(),
            plan: None,
            details: Value::Null,
            inconsistencies: Vec::new(),
            timing: Timing::default(),
        }
    }

    /// Stores `value` as the details, with node indices made 1-based.
    pub fn set_details<T: Serialize>(&mut self, value: &T) {
        let mut v = serde_json::to_value(value).expect("report details serialize");
        to_one_based(&mut v);
        self.details = v;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// JSON without the timing field, for determinism checks.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(map) = &mut v {
            map.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("reports serialize")
    }
}

fn shift_all(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                *value = Value::from(i + 1);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(shift_all),
        Value::Object(map) => map.values_mut().for_each(shift_all),
        _ => {}
    }
}

/// Adds one to every integer stored under a node-index key.
pub fn to_one_based(value: &mut Value) {
    match value {
        Value::Array(items) => items.iter_mut().for_each(to_one_based),
        Value::Object(map) => {
            for (key, v) in map.iter_mut() {
                if NODE_KEYS.contains(&key.as_str()) {
                    shift_all(v);
                } else {
                    to_one_based(v);
                }
            }
        }
        _ => {}
    }
}

/// Result of re-checking a report against its model.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, message: String) {
        self.failures.push(message);
    }
}

fn parse_strings(values: &[String], what: &str) -> Result<Vec<Rational>, String> {
    values
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|e| format!("{what}[{i}]: {e}")))
        .collect()
}

fn subject_pair(model: &Model, subject: &Subject) -> Result<SystemPair, String> {
    match subject {
        Subject::Model => Ok(model.pair.clone()),
        Subject::Leaders { leaders } => {
            let n = model.pair.n();
            if leaders.iter().any(|&l| l == 0 || l > n) {
                return Err(format!("leaders {leaders:?} out of range 1..={n}"));
            }
            let zero_based: Vec<usize> = leaders.iter().map(|l| l - 1).collect();
            SystemPair::with_leaders(model.pair.a().clone(), &zero_based).map_err(|e| e.to_string())
        }
    }
}

fn check_certificate(model: &Model, entry: &CertificateEntry) -> Result<(), String> {
    let pair = subject_pair(model, &entry.subject)?;
    let r = controllability_matrix(&pair);
    let vector = parse_strings(&entry.vector, "vector")?;
    let ok = match entry.kind {
        CertificateKind::Primal => entry.herdable && verify_primal(&r, &vector),
        CertificateKind::Dual => !entry.herdable && verify_dual(&r, &vector),
    };
    if ok {
        Ok(())
    } else {
        Err(format!(
            "{:?} certificate (herdable = {}) does not verify",
            entry.kind, entry.herdable
        ))
    }
}

fn step(a: &RationalMatrix, b: &RationalMatrix, x: &[Rational], u: &[Rational]) -> Result<Vec<Rational>, String> {
    let drift = a.mul_vec(x).map_err(|e| e.to_string())?;
    let push = b.mul_vec(u).map_err(|e| e.to_string())?;
    Ok(drift.into_iter().zip(push).map(|(p, q)| p + q).collect())
}

fn check_plan(model: &Model, plan: &PlanRecord) -> Result<(), String> {
    let (a, b) = (model.pair.a(), model.pair.b());
    let mut x = parse_strings(&plan.x0, "x0")?;
    let h = parse_rational(&plan.threshold).map_err(|e| format!("threshold: {e}"))?;
    for (t, u) in plan.inputs.iter().enumerate() {
        let u = parse_strings(u, &format!("inputs[{t}]"))?;
        x = step(a, b, &x, &u)?;
    }
    let claimed = parse_strings(&plan.final_state, "final_state")?;
    if x != claimed {
        return Err(format!(
            "simulated final state {:?} differs from the reported one",
            format_vector(&x)
        ));
    }
    if let Some(i) = x.iter().position(|v| *v < h) {
        return Err(format!("final state entry {} is below the threshold", i + 1));
    }
    Ok(())
}

/// Re-checks every certificate and plan in `report` using exact matrix
/// arithmetic on `model`.
pub fn verify_report(report: &Report, model: &Model) -> Verification {
    let mut out = Verification::default();
    if let Some(summary) = &report.model {
        if (summary.n, summary.m) != (model.pair.n(), model.pair.m()) {
            out.fail(format!(
                "report is for a {}x{} model, got {}x{}",
                summary.n,
                summary.m,
                model.pair.n(),
                model.pair.m()
            ));
            return out;
        }
    }
    for (k, entry) in report.certificates.iter().enumerate() {
        out.checked += 1;
        if let Err(e) = check_certificate(model, entry) {
            out.fail(format!("certificates[{k}]: {e}"));
        }
    }
    if let (Some(herdable), Some(entry)) = (
        report.herdable,
        report.certificates.iter().find(|c| c.subject == Subject::Model),
    ) {
        if entry.herdable != herdable {
            out.fail("top-level verdict disagrees with the model certificate".into());
        }
    }
    if let Some(plan) = &report.plan {
        out.checked += 1;
        if let Err(e) = check_plan(model, plan) {
            out.fail(format!("plan: {e}"));
        }
    }
    out
}
