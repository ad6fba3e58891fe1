//! `jetkernel verify`: seeded verification suites over structured families.
//!
//! Exit code 0 when every sample behaves as the suite demands, 2 when a
//! counterexample is found (the report lists each one).

use std::path::PathBuf;

use anyhow::bail;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use jetkernel_core::family::{
    constant_annihilating_sample, instantiate, sample, subspace_l_family, triangular_unit_family,
    zero_constant_term_triangular_family,
};
use jetkernel_core::field::FieldSpec;
use jetkernel_core::jet::{base_change_check, op_to_jet_map, taylor_jet, JetElement};
use jetkernel_core::kernel::{kernel_scan_with, zero_kernel_certificate, ScanOptions};
use jetkernel_core::multiindex::monomials_up_to;
use jetkernel_core::poly::{Poly, PolyVec};
use jetkernel_core::family::universal_family;

use crate::report::{write_report, ExperimentReport};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite: lem2411 | lem1121 | prop1124 | subspaceL | basechange | jetcorr
    #[arg(long)]
    pub suite: String,
    /// Number of seeded samples
    #[arg(long, default_value_t = 50)]
    pub samples: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coefficient bound B
    #[arg(long, default_value_t = 10)]
    pub bound: i64,
    /// Largest degree to scan (suite-specific default when omitted)
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Primes for the base-change suite
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5])]
    pub primes: Vec<u64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

struct SuiteOutcome {
    checked: u64,
    counterexamples: Vec<String>,
    detail: String,
}

fn no_bases() -> ScanOptions {
    ScanOptions { keep_bases: false, ..ScanOptions::default() }
}

/// Lower-triangular samples with nonzero order-0 diagonals: zero kernel at
/// every degree, certificate at the top degree.
fn suite_lem2411(args: &VerifyArgs, nmax: usize) -> anyhow::Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut cases = Vec::new();
    for k in 0..args.samples {
        let r = rng.gen_range(1..=3usize);
        let nvars = rng.gen_range(1..=2usize);
        let n = rng.gen_range(0..=2usize);
        let m = rng.gen_range(0..=2usize);
        let diagonal: Vec<Poly> =
            (0..r).map(|_| super::random_nonzero_poly(&mut rng, nvars, m, args.bound)).collect();
        cases.push((k, nvars, n, m, diagonal));
    }
    let counterexamples: Vec<String> = cases
        .par_iter()
        .filter_map(|(k, nvars, n, m, diagonal)| {
            let spec = triangular_unit_family(*nvars, diagonal.clone(), *n, *m).ok()?;
            let d = match instantiate(&sample(&spec, args.seed.wrapping_add(*k), args.bound)) {
                Ok(d) => d,
                Err(e) => return Some(format!("sample {k}: {e}")),
            };
            match kernel_scan_with(&d, nmax, &no_bases()) {
                Ok(report) => {
                    if let Some((&deg, &dim)) = report.dims.iter().find(|&(_, &dim)| dim > 0) {
                        return Some(format!("sample {k}: dim {dim} at degree {deg}"));
                    }
                }
                Err(e) => return Some(format!("sample {k}: {e}")),
            }
            match zero_kernel_certificate(&d, nmax) {
                Ok(Some(_)) => None,
                Ok(None) => Some(format!("sample {k}: no certificate at degree {nmax}")),
                Err(e) => Some(format!("sample {k}: {e}")),
            }
        })
        .collect();
    Ok(SuiteOutcome {
        checked: args.samples,
        detail: format!("{} nonzero kernels", counterexamples.len()),
        counterexamples,
    })
}

/// Derivative-diagonal samples with constant-annihilating lower entries:
/// kernel is exactly the r constant unit vectors at every degree.
fn suite_lem1121(args: &VerifyArgs, nmax: usize) -> anyhow::Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let q = FieldSpec::Rationals;
    let mut counterexamples = Vec::new();
    for k in 0..args.samples {
        let r = (k as usize % 3) + 1;
        let n = rng.gen_range(1..=2usize);
        let m = rng.gen_range(0..=2usize);
        let spec = zero_constant_term_triangular_family(r, n, m)?;
        let d = instantiate(&sample(&spec, args.seed.wrapping_add(k), args.bound))?;
        let report = kernel_scan_with(&d, nmax, &ScanOptions::default())?;
        if let Some((&deg, &dim)) = report.dims.iter().find(|&(_, &dim)| dim != r) {
            counterexamples.push(format!("sample {k}: dim {dim} != {r} at degree {deg}"));
            continue;
        }
        'outer: for (&deg, basis) in &report.bases {
            for (idx, v) in basis.iter().enumerate() {
                for (component, entry) in v.entries().iter().enumerate() {
                    let expected =
                        if component == idx { Poly::one(1, q) } else { Poly::zero(1, q) };
                    if entry != &expected {
                        counterexamples.push(format!(
                            "sample {k}: degree-{deg} basis differs from the constant unit vectors"
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome {
        checked: args.samples,
        detail: format!("{} deviations from constant kernels", counterexamples.len()),
        counterexamples,
    })
}

/// Constant-annihilating full-matrix perturbations of a derivative-diagonal
/// base point: constants stay in the kernel and the sampled dimension equals
/// the base point's value r.
fn suite_prop1124(args: &VerifyArgs, nmax: usize) -> anyhow::Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let q = FieldSpec::Rationals;
    let mut counterexamples = Vec::new();
    for k in 0..args.samples {
        let r = (k as usize % 3) + 1;
        let n = rng.gen_range(1..=2usize);
        let m = rng.gen_range(0..=2usize);
        let d = constant_annihilating_sample(r, n, m, args.seed.wrapping_add(k), args.bound)?;
        for unit in 0..r {
            let e = PolyVec::monomial(r, 1, q, unit, jetkernel_core::multiindex::MultiIndex::zero(1))?;
            if !d.apply(&e)?.is_zero() {
                counterexamples.push(format!("sample {k}: constant vector e_{unit} escapes"));
            }
        }
        let report = kernel_scan_with(&d, nmax, &no_bases())?;
        if let Some((&deg, &dim)) = report.dims.iter().find(|&(_, &dim)| dim != r) {
            counterexamples.push(format!(
                "sample {k}: dim {dim} != {r} at degree {deg} (special member)"
            ));
        }
    }
    Ok(SuiteOutcome {
        checked: args.samples,
        detail: format!("{} special members", counterexamples.len()),
        counterexamples,
    })
}

/// Subspace-L samples: kernel contains all x1-polynomial vectors, so
/// dims(n) >= r (n + 1).
fn suite_subspace_l(args: &VerifyArgs, nmax: usize) -> anyhow::Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut cases = Vec::new();
    for k in 0..args.samples {
        let n = rng.gen_range(1..=2usize);
        let m = rng.gen_range(0..=2usize);
        cases.push((k, n, m));
    }
    let counterexamples: Vec<String> = cases
        .par_iter()
        .filter_map(|&(k, n, m)| {
            let spec = subspace_l_family(2, 2, n, m).ok()?;
            let d = match instantiate(&sample(&spec, args.seed.wrapping_add(k), args.bound)) {
                Ok(d) => d,
                Err(e) => return Some(format!("sample {k}: {e}")),
            };
            // Spot check: x1^3 in the first component dies.
            let spot = PolyVec::new(vec![
                Poly::monomial(
                    2,
                    jetkernel_core::multiindex::MultiIndex::new(vec![3, 0]),
                    FieldSpec::Rationals.one(),
                )
                .unwrap(),
                Poly::zero(2, FieldSpec::Rationals),
            ])
            .unwrap();
            match d.apply(&spot) {
                Ok(img) if img.is_zero() => {}
                Ok(_) => return Some(format!("sample {k}: (x1^3, 0) is not annihilated")),
                Err(e) => return Some(format!("sample {k}: {e}")),
            }
            match kernel_scan_with(&d, nmax, &no_bases()) {
                Ok(report) => report.dims.iter().find(|&(&deg, &dim)| dim < 2 * (deg + 1)).map(
                    |(&deg, &dim)| {
                        format!("sample {k}: dim {dim} < {} at degree {deg}", 2 * (deg + 1))
                    },
                ),
                Err(e) => Some(format!("sample {k}: {e}")),
            }
        })
        .collect();
    Ok(SuiteOutcome {
        checked: args.samples,
        detail: format!("{} bound violations", counterexamples.len()),
        counterexamples,
    })
}

/// Base-change: native-F_p and reduced-from-Q jet presentations agree.
fn suite_basechange(args: &VerifyArgs, nmax: usize) -> anyhow::Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut counterexamples = Vec::new();
    let mut checked = 0u64;
    for k in 0..args.samples {
        let nvars = rng.gen_range(1..=2usize);
        let truncation = rng.gen_range(0..=nmax.min(3));
        let count = rng.gen_range(1..=3usize);
        let relators: Vec<Poly> = (0..count)
            .map(|_| super::random_nonzero_poly(&mut rng, nvars, 3, args.bound))
            .collect();
        for &p in &args.primes {
            let report = base_change_check(&relators, truncation, p)?;
            checked += 1;
            if !report.all_equal() {
                counterexamples
                    .push(format!("relator set {k} at p = {p}: presentations differ"));
            }
        }
    }
    Ok(SuiteOutcome {
        checked,
        detail: format!("{} mismatches", counterexamples.len()),
        counterexamples,
    })
}

/// Jet correspondence: the operator action equals the jet-map factorization
/// through the truncated Taylor map, on sampled operators and vectors.
fn suite_jetcorr(args: &VerifyArgs, _nmax: usize) -> anyhow::Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let q = FieldSpec::Rationals;
    let mut counterexamples = Vec::new();
    for k in 0..args.samples {
        let r = rng.gen_range(1..=2usize);
        let nvars = rng.gen_range(1..=2usize);
        let n = rng.gen_range(0..=2usize);
        let m = rng.gen_range(0..=2usize);
        let spec = universal_family(r, nvars, n, m)?;
        let d = instantiate(&sample(&spec, args.seed.wrapping_add(k), args.bound))?;
        let order = d.order().unwrap_or(0);
        let map = op_to_jet_map(&d);
        for _ in 0..20 {
            let v = random_vec(&mut rng, r, nvars, 8, args.bound, q)?;
            let jets: Vec<JetElement> = v
                .entries()
                .iter()
                .map(|f| taylor_jet(f, order))
                .collect::<Result<_, _>>()?;
            if d.apply(&v)? != map.evaluate(&jets)? {
                counterexamples.push(format!("operator {k}: factorization mismatch"));
                break;
            }
        }
    }
    Ok(SuiteOutcome {
        checked: args.samples,
        detail: format!("{} factorization mismatches", counterexamples.len()),
        counterexamples,
    })
}

fn random_vec(
    rng: &mut ChaCha8Rng,
    r: usize,
    nvars: usize,
    max_degree: usize,
    bound: i64,
    field: FieldSpec,
) -> anyhow::Result<PolyVec> {
    let monos = monomials_up_to(nvars, max_degree);
    let mut entries = Vec::with_capacity(r);
    for _ in 0..r {
        let k = rng.gen_range(0..=4usize);
        let terms: Vec<_> = (0..k)
            .map(|_| {
                let index = monos[rng.gen_range(0..monos.len())].clone();
                (index, field.integer(rng.gen_range(-bound..=bound)))
            })
            .collect();
        entries.push(Poly::from_terms(nvars, field, terms)?);
    }
    Ok(PolyVec::new(entries)?)
}

pub fn run(args: &VerifyArgs) -> anyhow::Result<i32> {
    let (default_nmax, runner): (usize, fn(&VerifyArgs, usize) -> anyhow::Result<SuiteOutcome>) =
        match args.suite.as_str() {
            "lem2411" => (12, suite_lem2411),
            "lem1121" => (12, suite_lem1121),
            "prop1124" => (12, suite_prop1124),
            "subspaceL" => (8, suite_subspace_l),
            "basechange" => (3, suite_basechange),
            "jetcorr" => (8, suite_jetcorr),
            other => bail!(
                "unknown suite {other:?}: use lem2411, lem1121, prop1124, subspaceL, \
                 basechange or jetcorr"
            ),
        };
    let nmax = args.nmax.unwrap_or(default_nmax);
    let outcome = runner(args, nmax)?;

    println!(
        "verify {}: {} checks, {} counterexample(s) ({})",
        args.suite,
        outcome.checked,
        outcome.counterexamples.len(),
        outcome.detail
    );
    for c in &outcome.counterexamples {
        println!("  counterexample: {c}");
    }

    let envelope = ExperimentReport::new(
        "verify",
        "rationals".into(),
        json!({
            "suite": args.suite,
            "samples": args.samples,
            "seed": args.seed,
            "bound": args.bound,
            "nmax": nmax,
            "primes": args.primes,
        }),
        json!({
            "checked": outcome.checked,
            "summary": outcome.detail,
            "counterexamples": outcome.counterexamples,
        }),
    );
    let path = write_report(&args.out, &format!("verify_{}.json", args.suite), &envelope)?;
    println!("  wrote {}", path.display());

    Ok(if outcome.counterexamples.is_empty() { 0 } else { 2 })
}
