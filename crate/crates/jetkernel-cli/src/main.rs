//! jetkernel: exact kernels of matrix differential operators with polynomial
//! coefficients, from the command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification failure
//! (a suite found a counterexample).

mod commands;
mod document;
mod dsl;
mod report;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "jetkernel",
    version,
    about = "Exact polynomial kernels of matrix differential operators",
    long_about = "Exact computer algebra for matrices of linear differential operators with \
                  polynomial coefficients: degree-truncated kernel scans, zero-kernel \
                  certificates, seeded family experiments, semicontinuity and mod-p studies."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan the degree-truncated kernel of one operator
    Kernel(commands::kernel::KernelArgs),
    /// Sample an operator family and scan every sample
    ScanFamily(commands::scan_family::ScanFamilyArgs),
    /// Run a seeded verification suite (exit 2 on counterexample)
    Verify(commands::verify::VerifyArgs),
    /// Scan the pencil D0 + t*D1 and report the special locus
    Semicont(commands::semicont::SemicontArgs),
    /// Compare rational kernels with reductions mod primes
    Modp(commands::modp::ModpArgs),
    /// Conjugate by a seeded unitriangular matrix and check transport
    Conjugate(commands::conjugate::ConjugateArgs),
}

fn configure_threads() {
    if let Ok(value) = std::env::var("JETKERNEL_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(0) | Err(_) => {} // 0 or unparsable: let rayon pick
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    // Dying quietly on a closed pipe (e.g. `jetkernel ... | head`) beats a
    // panic from println.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successes; everything else is usage error 1.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let outcome = match &cli.command {
        Command::Kernel(args) => commands::kernel::run(args),
        Command::ScanFamily(args) => commands::scan_family::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::Semicont(args) => commands::semicont::run(args),
        Command::Modp(args) => commands::modp::run(args),
        Command::Conjugate(args) => commands::conjugate::run(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
