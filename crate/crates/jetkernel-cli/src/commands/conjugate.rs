//! `jetkernel conjugate`: conjugate an operator by a seeded unitriangular
//! matrix, write the result, and verify kernel transport at one degree.

use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use jetkernel_core::family::sample_unitriangular_matrix;
use jetkernel_core::field::FieldSpec;
use jetkernel_core::kernel::kernel_basis;
use jetkernel_core::transform::conjugate_glr;

use crate::document::{read_operator_file, to_dop_text, OperatorDocument};
use crate::dsl::print_matrix_operator;
use crate::report::{write_atomic, write_report, ExperimentReport};

#[derive(Debug, Args)]
pub struct ConjugateArgs {
    /// Operator file over the rationals (.dop or .json)
    #[arg(long)]
    pub op: PathBuf,
    /// Seed for the unitriangular matrix
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coefficient bound for the matrix entries
    #[arg(long, default_value_t = 5)]
    pub bound: i64,
    /// Degree bound for the matrix entries
    #[arg(long, default_value_t = 1)]
    pub coefdeg: usize,
    /// Degree at which kernel transport is checked
    #[arg(long, default_value_t = 6)]
    pub nmax: usize,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(args: &ConjugateArgs) -> anyhow::Result<i32> {
    let d = read_operator_file(&args.op)?;
    if d.field() != FieldSpec::Rationals {
        anyhow::bail!("conjugate expects an operator over the rationals");
    }
    let a = sample_unitriangular_matrix(d.rank(), d.nvars(), args.coefdeg, args.seed, args.bound)?;
    let conjugated = conjugate_glr(&d, &a)?;

    println!("conjugated operator: {}", print_matrix_operator(&conjugated));

    // Transport check: kernel vectors of D, moved through A^-1, must lie in
    // the kernel of the conjugated operator.
    let kernel = kernel_basis(&d, args.nmax)?;
    let mut transported_ok = true;
    for v in &kernel {
        let moved = a.apply_inverse(v)?;
        if !conjugated.apply(&moved)?.is_zero() {
            transported_ok = false;
            println!("  transport FAILED for kernel vector {v}");
        }
    }
    println!(
        "  transport check at degree {}: {} kernel vector(s), {}",
        args.nmax,
        kernel.len(),
        if transported_ok { "all transported" } else { "violations found" }
    );

    let dop = to_dop_text(&conjugated);
    let dop_path = args.out.join("conjugated.dop");
    write_atomic(&dop_path, dop.as_bytes())?;
    let doc = OperatorDocument::from_operator(&conjugated);
    write_atomic(
        &args.out.join("conjugated.json"),
        serde_json::to_string_pretty(&doc)?.as_bytes(),
    )?;

    let a_entries: Vec<Vec<String>> = (0..a.rank())
        .map(|i| (0..a.rank()).map(|j| a.forward_entry(i, j).to_string()).collect())
        .collect();
    let envelope = ExperimentReport::new(
        "conjugate",
        "rationals".into(),
        json!({
            "op": args.op.display().to_string(),
            "seed": args.seed,
            "bound": args.bound,
            "coefdeg": args.coefdeg,
            "nmax": args.nmax,
        }),
        json!({
            "matrix": a_entries,
            "conjugated": print_matrix_operator(&conjugated),
            "kernel_dim_checked": kernel.len(),
            "transport_ok": transported_ok,
        }),
    );
    let path = write_report(&args.out, "conjugate_report.json", &envelope)?;
    println!("  wrote {}, {} and conjugated.json", path.display(), dop_path.display());
    Ok(if transported_ok { 0 } else { 2 })
}
