//! `jetkernel semicont`: scan the pencil `D0 + t D1` over integer parameters
//! and report the special locus where the kernel dimension jumps.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use jetkernel_core::field::Scalar;
use jetkernel_core::kernel::semicontinuity_scan;

use crate::document::read_operator_file;
use crate::report::{write_atomic, write_report, ExperimentReport};

#[derive(Debug, Args)]
pub struct SemicontArgs {
    /// Base operator D0 (.dop or .json)
    #[arg(long)]
    pub op: PathBuf,
    /// Direction operator D1 (.dop or .json)
    #[arg(long)]
    pub op2: PathBuf,
    /// Scan t = 0..=tmax
    #[arg(long, default_value_t = 9)]
    pub tmax: i64,
    /// Degree bound for each kernel computation
    #[arg(long, default_value_t = 8)]
    pub nmax: usize,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(args: &SemicontArgs) -> anyhow::Result<i32> {
    let d0 = read_operator_file(&args.op)?;
    let d1 = read_operator_file(&args.op2)?;
    let field = d0.field();
    let ts: Vec<Scalar> = (0..=args.tmax).map(|t| field.integer(t)).collect();
    let table = semicontinuity_scan(&d0, &d1, &ts, args.nmax)?;

    println!(
        "pencil scan at degree {} over t = 0..={} ({})",
        args.nmax,
        args.tmax,
        field.name()
    );
    for (t, dim) in &table.rows {
        println!("  t = {t:4}  dim {dim}");
    }
    println!("  generic dimension on this sample: {}", table.generic_dim);
    if table.special.is_empty() {
        println!("  special locus: empty (constant family on this sample)");
    } else {
        let special: Vec<String> = table.special.iter().map(|t| t.to_string()).collect();
        println!("  special locus: {{{}}}", special.join(", "));
    }

    let mut csv = String::from("t,dim\n");
    for (t, dim) in &table.rows {
        csv.push_str(&format!("{t},{dim}\n"));
    }
    write_atomic(&args.out.join("semicont_table.csv"), csv.as_bytes())?;

    let envelope = ExperimentReport::new(
        "semicontinuity-scan",
        field.name(),
        json!({
            "op": args.op.display().to_string(),
            "op2": args.op2.display().to_string(),
            "tmax": args.tmax,
            "nmax": args.nmax,
        }),
        json!({
            "rows": table.rows.iter().map(|(t, d)| json!([t.to_string(), d])).collect::<Vec<_>>(),
            "generic_dim": table.generic_dim,
            "special": table.special.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        }),
    );
    let path = write_report(&args.out, "semicont_report.json", &envelope)?;
    println!("  wrote {} and semicont_table.csv", path.display());
    Ok(0)
}
