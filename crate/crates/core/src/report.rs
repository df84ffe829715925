//! Deterministic JSON certificate records and convergence CSV tables.
//!
//! The JSON writer is hand-rolled so field order and float rendering never
//! depend on a serializer's defaults: every float is printed with 17
//! significant digits (`{:.16e}`), which round-trips exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::onebody::{BindingCertificate, ConvergenceStudy, SolveResult};

pub const SCHEMA_VERSION: &str = "1";
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Binding,
    Lemma1,
    Theorem,
    Hypothesis,
}

impl RecordKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RecordKind::Binding => "binding",
            RecordKind::Lemma1 => "lemma1",
            RecordKind::Theorem => "theorem",
            RecordKind::Hypothesis => "hypothesis",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRecord {
    pub kind: RecordKind,
    /// Which check within the kind (e.g. `h2`, `trial_state`, `solve`).
    pub label: String,
    /// Hash of the canonical JSON of the job section that produced it.
    pub digest: String,
    pub values: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
    pub notes: Vec<String>,
    pub version: String,
}

impl CertificateRecord {
    pub fn new(kind: RecordKind, label: impl Into<String>, digest: impl Into<String>) -> Self {
        Self {
            kind,
            label: label.into(),
            digest: digest.into(),
            values: BTreeMap::new(),
            flags: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            pass: true,
            notes: Vec::new(),
            version: TOOLKIT_VERSION.to_string(),
        }
    }

    pub fn value(mut self, name: &str, v: f64) -> Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn flag(mut self, name: &str, v: bool) -> Self {
        self.flags.insert(name.to_string(), v);
        self
    }

    pub fn tolerance(mut self, name: &str, v: f64) -> Self {
        self.tolerances.insert(name.to_string(), v);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    /// A binding certificate together with the solve it came from.
    pub fn binding(digest: &str, cert: &BindingCertificate, solve: Option<&SolveResult>) -> Self {
        let mut r = Self::new(RecordKind::Binding, "solve", digest)
            .value("e0", cert.e0)
            .value("lower_bound", cert.lower_bound)
            .flag("binding_positive", cert.binding_positive)
            .tolerance("e0", cert.tolerance)
            .note(cert.caveat.clone());
        for g in &cert.grids {
            r = r.note(format!("grid d={} L={} N={}", g.dim, g.length, g.points));
        }
        if let Some(s) = solve {
            r = r
                .value("residual", s.residual)
                .value("iterations", s.iterations as f64)
                .value("boundary_mass", s.boundary_mass)
                .flag("converged", s.converged);
            r.notes.extend(s.notes.iter().cloned());
            r.pass = s.converged;
        }
        r
    }
}

/// Lowercase hex SHA-256 of the canonical (key-sorted, compact) JSON of `value`.
pub fn digest_of<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Numeric(e.to_string()))?;
    let text = serde_json::to_string(&v).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

fn float(out: &mut String, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Numeric(format!("non-finite value {x} in report")));
    }
    write!(out, "{x:.16e}").unwrap();
    Ok(())
}

fn string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}

fn float_map(out: &mut String, m: &BTreeMap<String, f64>) -> Result<()> {
    out.push('{');
    for (i, (k, v)) in m.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        string(out, k);
        out.push(':');
        float(out, *v)?;
    }
    out.push('}');
    Ok(())
}

fn record(out: &mut String, r: &CertificateRecord) -> Result<()> {
    out.push_str("{\"kind\":");
    string(out, r.kind.as_str());
    out.push_str(",\"label\":");
    string(out, &r.label);
    out.push_str(",\"digest\":");
    string(out, &r.digest);
    out.push_str(",\"values\":");
    float_map(out, &r.values)?;
    out.push_str(",\"flags\":{");
    for (i, (k, v)) in r.flags.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        string(out, k);
        out.push(':');
        out.push_str(if *v { "true" } else { "false" });
    }
    out.push_str("},\"tolerances\":");
    float_map(out, &r.tolerances)?;
    out.push_str(",\"pass\":");
    out.push_str(if r.pass { "true" } else { "false" });
    out.push_str(",\"notes\":[");
    for (i, n) in r.notes.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        string(out, n);
    }
    out.push_str("],\"version\":");
    string(out, &r.version);
    out.push('}');
    Ok(())
}

/// Renders records as a JSON document; one record per line.
pub fn emit_json(records: &[CertificateRecord]) -> Result<String> {
    let mut out = String::from("{\"schema\":\"1\",\"records\":[");
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('\n');
        record(&mut out, r)?;
    }
    if !records.is_empty() {
        out.push('\n');
    }
    out.push_str("]}");
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    schema: String,
    records: Vec<CertificateRecord>,
}

pub fn parse_json(text: &str) -> Result<Vec<CertificateRecord>> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Config(format!("report: {e}")))?;
    if doc.schema != SCHEMA_VERSION {
        return Err(Error::Config(format!("unsupported report schema {:?}", doc.schema)));
    }
    Ok(doc.records)
}

pub const CSV_HEADER: &str = "L,N,eigenvalue,residual,iterations";

/// One row per grid of a convergence study.
pub fn emit_convergence_csv(study: &ConvergenceStudy) -> Result<String> {
    if study.rows.is_empty() {
        return Err(Error::Empty("convergence study"));
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &study.rows {
        float(&mut out, row.grid.length)?;
        write!(out, ",{},", row.grid.points).unwrap();
        float(&mut out, row.eigenvalue)?;
        out.push(',');
        float(&mut out, row.residual)?;
        writeln!(out, ",{}", row.iterations).unwrap();
    }
    Ok(out)
}
