//! Shared fixtures for the criterion benchmarks.

use jetkernel_core::family::{instantiate, sample, triangular_unit_family, universal_family};
use jetkernel_core::field::FieldSpec;
use jetkernel_core::multiindex::monomials_up_to;
use jetkernel_core::operator::MatrixOperator;
use jetkernel_core::poly::Poly;

/// A seeded dense-ish polynomial in `nvars` variables of degree `<= degree`.
pub fn fixture_poly(nvars: usize, degree: usize, seed: i64) -> Poly {
    let q = FieldSpec::Rationals;
    let terms = monomials_up_to(nvars, degree)
        .into_iter()
        .enumerate()
        .map(|(k, index)| (index, q.integer((seed + k as i64) % 11 - 5)));
    Poly::from_terms(nvars, q, terms).unwrap()
}

/// A seeded universal-family operator.
pub fn fixture_operator(r: usize, nvars: usize, order: usize, coefdeg: usize) -> MatrixOperator {
    let spec = universal_family(r, nvars, order, coefdeg).unwrap();
    instantiate(&sample(&spec, 42, 10)).unwrap()
}

/// A seeded triangular zero-kernel operator (the certificate workload).
pub fn fixture_triangular(r: usize, nvars: usize) -> MatrixOperator {
    let q = FieldSpec::Rationals;
    let diagonal: Vec<Poly> = (0..r)
        .map(|i| {
            Poly::one(nvars, q)
                .try_add(&Poly::var(nvars, i % nvars, q).scale(&q.integer(i as i64 + 1)))
                .unwrap()
        })
        .collect();
    let spec = triangular_unit_family(nvars, diagonal, 2, 2).unwrap();
    instantiate(&sample(&spec, 7, 10)).unwrap()
}
