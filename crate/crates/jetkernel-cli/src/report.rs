//! Experiment reports: a versioned JSON envelope plus plot-ready CSV tables,
//! all written atomically (temp file then rename).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use jetkernel_core::kernel::KernelReport;

use crate::document::SCHEMA_VERSION;

/// The note attached to every report computed over the rationals in place of
/// an uncountable base field.
pub const SURROGATE_NOTE: &str = "computed over exact surrogate fields (arbitrary-precision \
    rationals or F_p); 'very general' is sampled as seeded uniform integer coefficients in \
    [-B, B]";

/// The envelope every command writes. Re-running the recorded inputs
/// reproduces the results bit for bit.
#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub kind: String,
    pub tool_version: String,
    pub field: String,
    pub surrogate_note: String,
    pub inputs: Value,
    pub results: Value,
}

impl ExperimentReport {
    pub fn new(kind: &str, field: String, inputs: Value, results: Value) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            field,
            surrogate_note: SURROGATE_NOTE.to_string(),
            inputs,
            results,
        }
    }
}

/// Writes bytes atomically: a temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
    Ok(())
}

pub fn write_report(dir: &Path, name: &str, report: &ExperimentReport) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    let json = serde_json::to_string_pretty(report)?;
    write_atomic(&path, json.as_bytes())?;
    Ok(path)
}

/// Writes a kernel-scan dims table as CSV with columns
/// `degree,dim,stabilized`; `stabilized` is true from the flagged degree on.
pub fn write_scan_csv(dir: &Path, name: &str, report: &KernelReport) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    let mut out = String::from("degree,dim,stabilized\n");
    for (&degree, &dim) in &report.dims {
        let stabilized = report.stabilized_at.map_or(false, |s| degree >= s);
        out.push_str(&format!("{degree},{dim},{stabilized}\n"));
    }
    write_atomic(&path, out.as_bytes())?;
    Ok(path)
}

/// Serializes a dims map into a JSON object keyed by degree.
pub fn dims_json(report: &KernelReport) -> Value {
    let map: BTreeMap<String, usize> =
        report.dims.iter().map(|(&n, &d)| (n.to_string(), d)).collect();
    serde_json::to_value(map).expect("plain map serializes")
}
