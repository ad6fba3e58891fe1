//! `jetkernel modp`: compare an integer-coefficient operator's rational
//! kernel profile with its reductions mod a list of primes.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use jetkernel_core::family::{denominator_primes, reduce_mod_p};
use jetkernel_core::field::FieldSpec;
use jetkernel_core::kernel::{kernel_scan_with, ScanOptions};

use crate::document::read_operator_file;
use crate::report::{dims_json, write_report, write_scan_csv, ExperimentReport};

#[derive(Debug, Args)]
pub struct ModpArgs {
    /// Operator file over the rationals (.dop or .json)
    #[arg(long)]
    pub op: PathBuf,
    /// Primes to reduce at
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5, 7, 11, 13])]
    pub primes: Vec<u64>,
    /// Largest degree to scan
    #[arg(long, default_value_t = 8)]
    pub nmax: usize,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(args: &ModpArgs) -> anyhow::Result<i32> {
    let d = read_operator_file(&args.op)?;
    if d.field() != FieldSpec::Rationals {
        anyhow::bail!("modp expects an operatorial over the rationals");
    }
    let options = ScanOptions { keep_bases: false, ..ScanOptions::default() };
    let rational = kernel_scan_with(&d, args.nmax, &options)?;
    let bad = denominator_primes(&d);
    println!("rational dims: {:?}", rational.dims.values().collect::<Vec<_>>());
    if !bad.is_empty() {
        println!("bad primes (divide a denominator): {bad:?}");
    }

    let mut per_prime = Vec::new();
    for &p in &args.primes {
        if bad.contains(&p) {
            println!("  p = {p}: skipped (bad prime)");
            per_prime.push(json!({ "p": p, "skipped": "divides a denominator" }));
            continue;
        }
        let dp = reduce_mod_p(&d, p)?;
        let report = kernel_scan_with(&dp, args.nmax, &options)?;
        // Specialization: slice dimensions can only grow under reduction.
        let ok = report
            .dims
            .iter()
            .all(|(&n, &dim)| dim >= rational.dim_at(n));
        println!(
            "  p = {p}: dims {:?}  specialization {}",
            report.dims.values().collect::<Vec<_>>(),
            if ok { "respected" } else { "VIOLATED" }
        );
        write_scan_csv(&args.out, &format!("modp_{p}.csv"), &report)?;
        per_prime.push(json!({
            "p": p,
            "dims": dims_json(&report),
            "specialization_respected": ok,
        }));
    }
    write_scan_csv(&args.out, "modp_rational.csv", &rational)?;

    let envelope = ExperimentReport::new(
        "mod-p-specialization",
        "rationals".into(),
        json!({
            "op": args.op.display().to_string(),
            "primes": args.primes,
            "nmax": args.nmax,
        }),
        json!({
            "rational_dims": dims_json(&rational),
            "bad_primes": bad,
            "per_prime": per_prime,
        }),
    );
    let path = write_report(&args.out, "modp_report.json", &envelope)?;
    println!("  wrote {} and per-field CSVs", path.display());
    Ok(0)
}
