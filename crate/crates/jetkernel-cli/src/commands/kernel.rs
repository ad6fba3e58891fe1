//! `jetkernel kernel`: scan the degree-truncated kernel of one operator.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use jetkernel_core::kernel::{kernel_scan_with, ScanOptions};

use crate::document::read_operator_file;
use crate::report::{dims_json, write_report, write_scan_csv, ExperimentReport};

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Operator file (.dop or .json)
    #[arg(long)]
    pub op: PathBuf,
    /// Largest degree to scan
    #[arg(long, default_value_t = 12)]
    pub nmax: usize,
    /// Plateau length required to flag stabilization
    #[arg(long, default_value_t = 3)]
    pub plateau: usize,
    /// Output directory for the report and CSV
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(args: &KernelArgs) -> anyhow::Result<i32> {
    let d = read_operator_file(&args.op)?;
    let options = ScanOptions { plateau: args.plateau, keep_bases: true };
    let report = kernel_scan_with(&d, args.nmax, &options)?;

    println!("kernel scan of {} over {}", args.op.display(), d.field().name());
    for (&n, &dim) in &report.dims {
        println!("  degree {n:3}  dim {dim}");
    }
    match report.stabilized_at {
        Some(n) => println!(
            "  stabilized at degree {n} (plateau >= {}); kernel dimension >= {}",
            args.plateau,
            report.dim_at(args.nmax)
        ),
        None => println!(
            "  no stabilization flag; kernel dimension >= {} (observed at degree {})",
            report.dim_at(args.nmax),
            args.nmax
        ),
    }

    let bases: BTreeMap<String, Vec<String>> = report
        .bases
        .iter()
        .map(|(&n, basis)| {
            (n.to_string(), basis.iter().map(|v| v.to_string()).collect())
        })
        .collect();
    let envelope = ExperimentReport::new(
        "kernel-scan",
        d.field().name(),
        json!({
            "op": args.op.display().to_string(),
            "nmax": args.nmax,
            "plateau": args.plateau,
        }),
        json!({
            "dims": dims_json(&report),
            "stabilized_at": report.stabilized_at,
            "bases": bases,
            "notes": report.notes,
        }),
    );
    let json_path = write_report(&args.out, "kernel_report.json", &envelope)?;
    let csv_path = write_scan_csv(&args.out, "kernel_scan.csv", &report)?;
    println!("  wrote {} and {}", json_path.display(), csv_path.display());
    Ok(0)
}
