//! `jetkernel scan-family`: sample a family and scan every sample's kernel.

use std::path::PathBuf;

use anyhow::{anyhow, bail};
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use jetkernel_core::family::{instantiate, jitter, sample, FamilySpec, SamplePoint};
use jetkernel_core::kernel::{kernel_scan_with, KernelReport, ScanOptions};

use crate::document::{FamilyDocument, SCHEMA_VERSION};
use crate::report::{dims_json, write_report, write_scan_csv, ExperimentReport};

#[derive(Debug, Args)]
pub struct ScanFamilyArgs {
    /// Family document (.json); alternative to --mode and friends
    #[arg(long, conflicts_with = "mode")]
    pub family: Option<PathBuf>,
    /// Family mode: universal | constant-coefficient | triangular-unit |
    /// zero-constant-term-triangular | subspace-l
    #[arg(long)]
    pub mode: Option<String>,
    /// Rank of the operator matrix
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Number of variables
    #[arg(long, default_value_t = 1)]
    pub nvars: usize,
    /// Order bound N
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Coefficient degree bound M
    #[arg(long, default_value_t = 2)]
    pub coefdeg: usize,
    /// Number of seeded samples
    #[arg(long, default_value_t = 20)]
    pub samples: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coefficient bound B (values drawn from [-B, B])
    #[arg(long, default_value_t = 10)]
    pub bound: i64,
    /// Largest degree to scan
    #[arg(long, default_value_t = 12)]
    pub nmax: usize,
    /// Also scan a +/-1 jittered copy of each sample, seeded by this value
    #[arg(long)]
    pub jitter: Option<u64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn build_spec(args: &ScanFamilyArgs) -> anyhow::Result<FamilySpec> {
    if let Some(path) = &args.family {
        let text = std::fs::read_to_string(path)?;
        let doc: FamilyDocument = serde_json::from_str(&text)?;
        return doc.to_spec();
    }
    let Some(mode) = &args.mode else {
        bail!("either --family or --mode is required");
    };
    let mut doc = FamilyDocument {
        schema_version: SCHEMA_VERSION,
        mode: mode.clone(),
        r: args.r,
        nvars: args.nvars,
        order: args.order,
        coefdeg: args.coefdeg,
        diagonal: None,
    };
    if mode == "triangular-unit" {
        // Seeded nonzero diagonal polynomials; explicit control is available
        // through a family document.
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0xD1A6);
        let diagonal: Vec<String> = (0..args.r)
            .map(|_| {
                super::random_nonzero_poly(&mut rng, args.nvars, args.coefdeg, args.bound)
                    .to_string()
            })
            .collect();
        doc.diagonal = Some(diagonal);
    }
    doc.to_spec()
}

fn point_json(point: &SamplePoint) -> serde_json::Value {
    let values: std::collections::BTreeMap<String, i64> =
        point.values.iter().map(|(k, &v)| (k.to_string(), v)).collect();
    json!({ "seed": point.seed, "bound": point.bound, "values": values })
}

fn scan_summary(report: &KernelReport) -> serde_json::Value {
    json!({
        "dims": dims_json(report),
        "stabilized_at": report.stabilized_at,
    })
}

pub fn run(args: &ScanFamilyArgs) -> anyhow::Result<i32> {
    let spec = build_spec(args)?;
    println!(
        "scanning {} samples of a K = {} parameter family (seed {}, bound {})",
        args.samples,
        spec.parameter_count(),
        args.seed,
        args.bound
    );

    let options = ScanOptions { keep_bases: false, ..ScanOptions::default() };
    let outcomes: Vec<anyhow::Result<serde_json::Value>> = (0..args.samples)
        .into_par_iter()
        .map(|k| {
            let point = sample(&spec, args.seed.wrapping_add(k), args.bound);
            let d = instantiate(&point)?;
            let report = kernel_scan_with(&d, args.nmax, &options)?;
            let mut entry = json!({
                "sample": k,
                "point": point_json(&point),
                "scan": scan_summary(&report),
            });
            if let Some(jseed) = args.jitter {
                let jpoint = jitter(&point, jseed.wrapping_add(k));
                let jd = instantiate(&jpoint)?;
                let jreport = kernel_scan_with(&jd, args.nmax, &options)?;
                entry["jitter"] = json!({
                    "seed": jseed.wrapping_add(k),
                    "point": point_json(&jpoint),
                    "scan": scan_summary(&jreport),
                });
            }
            Ok((report, entry))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            r.and_then(|(report, entry)| {
                let name = format!("sample_{k:03}.csv");
                write_scan_csv(&args.out, &name, &report)?;
                Ok(entry)
            })
        })
        .collect();

    let mut results = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        results.push(o.map_err(|e| anyhow!(e))?);
    }
    for entry in &results {
        let k = &entry["sample"];
        let dims = &entry["scan"]["dims"];
        println!("  sample {k}: dims {dims}");
    }

    let inputs = json!({
        "mode": args.mode,
        "family_file": args.family.as_ref().map(|p| p.display().to_string()),
        "r": args.r, "nvars": args.nvars, "order": args.order, "coefdeg": args.coefdeg,
        "samples": args.samples, "seed": args.seed, "bound": args.bound,
        "nmax": args.nmax, "jitter": args.jitter,
    });
    let envelope = ExperimentReport::new(
        "scan-family",
        "rationals".into(),
        inputs,
        json!({ "samples": results }),
    );
    let path = write_report(&args.out, "scan_family_report.json", &envelope)?;
    println!("  wrote {} and per-sample CSVs", path.display());
    Ok(0)
}
