//! Degree-truncated polynomial kernels of matrix operators.
//!
//! For a degree bound `n`, the operator restricted to polynomial vectors of
//! degree `<= n` is a finite exact matrix; its nullspace is the degree-`n`
//! slice of the polynomial kernel. Slices are nested, so a scan over degrees
//! reports a non-decreasing dimension profile. A finite scan can certify a
//! lower bound on the untruncated kernel dimension but never the dimension
//! itself; stabilization flags are bounds, not certificates (the profile of
//! `d^[1]` over `F_3` keeps climbing forever).
//!
//! Rational kernels use a two-lane strategy: a mod-p witness prime can prove
//! full column rank (hence zero kernel slice) from a single machine-word
//! elimination, and everything else falls back to exact elimination. Zero
//! kernel certificates cite an explicit nonvanishing full-size minor, whose
//! value is computed exactly (by CRT for rational operators).

use std::collections::BTreeMap;

use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::matrix::ExactMatrix;
use crate::modular;
use crate::multiindex::{monomials_up_to, simplex_count, MultiIndex};
use crate::operator::MatrixOperator;
use crate::poly::{Poly, PolyVec};
use crate::Result;

/// The exact matrix of `D` restricted to polynomial vectors of degree `<= n`.
///
/// Bases are ordered component-major: all monomials of component 0 in
/// graded-lex order, then component 1, and so on. The codomain degree bound
/// is `n + max(degree_shift(D), 0)`, a uniform bound that may pad the matrix
/// with zero rows but never changes its nullspace.
#[derive(Debug, Clone)]
pub struct TruncationMatrix {
    operator: MatrixOperator,
    n: usize,
    codomain_degree: usize,
    matrix: ExactMatrix,
    domain_basis: Vec<(usize, MultiIndex)>,
    codomain_basis: Vec<(usize, MultiIndex)>,
}

impl TruncationMatrix {
    pub fn operator(&self) -> &MatrixOperator {
        &self.operator
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn codomain_degree(&self) -> usize {
        self.codomain_degree
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn domain_basis(&self) -> &[(usize, MultiIndex)] {
        &self.domain_basis
    }

    pub fn codomain_basis(&self) -> &[(usize, MultiIndex)] {
        &self.codomain_basis
    }

    /// Reassembles a coordinate vector over the domain basis into a
    /// polynomial vector.
    pub fn vector_from_coords(&self, coords: &[Scalar]) -> Result<PolyVec> {
        let r = self.operator.rank();
        let nvars = self.operator.nvars();
        let field = self.operator.field();
        if coords.len() != self.domain_basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "coordinate vector of length {} over a basis of size {}",
                coords.len(),
                self.domain_basis.len()
            )));
        }
        let mut entries = vec![Vec::new(); r];
        for ((component, index), c) in self.domain_basis.iter().zip(coords) {
            if !c.is_zero() {
                entries[*component].push((index.clone(), c.clone()));
            }
        }
        PolyVec::new(
            entries
                .into_iter()
                .map(|terms| Poly::from_terms(nvars, field, terms))
                .collect::<Result<_>>()?,
        )
    }
}

/// Builds the truncation matrix of `D` at degree `n`.
pub fn truncation_matrix(d: &MatrixOperator, n: usize) -> Result<TruncationMatrix> {
    let r = d.rank();
    let nvars = d.nvars();
    let field = d.field();
    let shift = d.degree_shift().map_or(0, |s| s.max(0)) as usize;
    let m = n + shift;

    let domain_monos = monomials_up_to(nvars, n);
    let codomain_monos = monomials_up_to(nvars, m);
    let mono_rank: BTreeMap<MultiIndex, usize> =
        codomain_monos.iter().cloned().enumerate().map(|(k, i)| (i, k)).collect();

    let domain_basis: Vec<(usize, MultiIndex)> = (0..r)
        .flat_map(|j| domain_monos.iter().cloned().map(move |i| (j, i)))
        .collect();
    let codomain_basis: Vec<(usize, MultiIndex)> = (0..r)
        .flat_map(|i| codomain_monos.iter().cloned().map(move |idx| (i, idx)))
        .collect();

    debug_assert_eq!(domain_basis.len(), r * simplex_count(nvars, n));

    let mut matrix = ExactMatrix::zero(codomain_basis.len(), domain_basis.len(), field);
    let codomain_count = codomain_monos.len();
    for (col, (component, index)) in domain_basis.iter().enumerate() {
        let probe = PolyVec::monomial(r, nvars, field, *component, index.clone())?;
        let image = d.apply(&probe)?;
        for (i, entry) in image.entries().iter().enumerate() {
            for (mono, c) in entry.terms() {
                let rank = *mono_rank.get(mono).unwrap_or_else(|| {
                    panic!("image degree {} exceeds the shift bound {}", mono.total_degree(), m)
                });
                matrix.set(i * codomain_count + rank, col, c.clone());
            }
        }
    }
    Ok(TruncationMatrix { operator: d.clone(), n, codomain_degree: m, matrix, domain_basis, codomain_basis })
}

/// A basis of `{v : deg v <= n, D v = 0}`, echelonized deterministically.
pub fn kernel_basis(d: &MatrixOperator, n: usize) -> Result<Vec<PolyVec>> {
    let t = truncation_matrix(d, n)?;
    kernel_basis_of(&t)
}

fn kernel_basis_of(t: &TruncationMatrix) -> Result<Vec<PolyVec>> {
    // Witnessed full column rank settles the common zero-kernel case without
    // big-number elimination.
    if t.matrix.field() == FieldSpec::Rationals
        && modular::full_column_rank_witness(&t.matrix).is_some()
    {
        return Ok(Vec::new());
    }
    let coords = t.matrix.nullspace();
    let mut basis = Vec::with_capacity(coords.len());
    for c in &coords {
        let v = t.vector_from_coords(c)?;
        debug_assert!(t.operator.apply(&v)?.is_zero(), "kernel vector must be exact");
        basis.push(v);
    }
    Ok(basis)
}

/// A per-degree kernel dimension profile with bases and a stabilization flag.
#[derive(Debug, Clone)]
pub struct KernelReport {
    pub field: FieldSpec,
    pub dims: BTreeMap<usize, usize>,
    pub bases: BTreeMap<usize, Vec<PolyVec>>,
    /// First degree of the final plateau, when the plateau is at least
    /// `ScanOptions::plateau` long. A flag, not a certificate: the
    /// untruncated kernel dimension is only known to be `>=` the top dim.
    pub stabilized_at: Option<usize>,
    pub notes: Vec<String>,
}

impl KernelReport {
    pub fn dim_at(&self, n: usize) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn max_dim(&self) -> usize {
        self.dims.values().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// Plateau length required before `stabilized_at` is reported.
    pub plateau: usize,
    /// Retain kernel bases per degree (dimension profiles only, otherwise).
    pub keep_bases: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { plateau: 3, keep_bases: true }
    }
}

/// Scans kernel slices for `n = 0..=n_max` and cross-checks the inclusion of
/// each slice in the next.
pub fn kernel_scan(d: &MatrixOperator, n_max: usize) -> Result<KernelReport> {
    kernel_scan_with(d, n_max, &ScanOptions::default())
}

pub fn kernel_scan_with(
    d: &MatrixOperator,
    n_max: usize,
    options: &ScanOptions,
) -> Result<KernelReport> {
    let mut dims = BTreeMap::new();
    let mut all_bases: Vec<Vec<PolyVec>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let basis = kernel_basis(d, n)?;
        dims.insert(n, basis.len());
        all_bases.push(basis);
    }

    for n in 0..n_max {
        let lower = &all_bases[n];
        let upper = &all_bases[n + 1];
        if lower.len() > upper.len() {
            return Err(Error::InvalidInput(format!(
                "kernel dimension dropped from degree {} to {}: {} > {}",
                n,
                n + 1,
                lower.len(),
                upper.len()
            )));
        }
        if !lower.is_empty() {
            check_span_inclusion(d, lower, upper, n + 1)?;
        }
    }

    let final_dim = dims[&n_max];
    let mut first = n_max;
    while first > 0 && dims[&(first - 1)] == final_dim {
        first -= 1;
    }
    let run = n_max - first + 1;
    let stabilized_at = if run >= options.plateau { Some(first) } else { None };

    let mut bases = BTreeMap::new();
    if options.keep_bases {
        for (n, b) in all_bases.into_iter().enumerate() {
            bases.insert(n, b);
        }
    }
    let notes = vec![
        format!("field: {}", d.field().name()),
        "finite scan: the untruncated kernel dimension is >= the top observed value; \
         stabilization is a heuristic flag, not a certificate"
            .to_string(),
    ];
    Ok(KernelReport { field: d.field(), dims, bases, stabilized_at, notes })
}

/// Verifies that every vector of `lower` lies in the span of `upper`, both
/// read as coordinate vectors at degree `degree`.
fn check_span_inclusion(
    d: &MatrixOperator,
    lower: &[PolyVec],
    upper: &[PolyVec],
    degree: usize,
) -> Result<()> {
    let nvars = d.nvars();
    let field = d.field();
    let monos = monomials_up_to(nvars, degree);
    let rank_of: BTreeMap<MultiIndex, usize> =
        monos.iter().cloned().enumerate().map(|(k, i)| (i, k)).collect();
    let dim = monos.len() * d.rank();
    let coords = |v: &PolyVec| -> Vec<Scalar> {
        let mut c = vec![field.zero(); dim];
        for (component, entry) in v.entries().iter().enumerate() {
            for (mono, s) in entry.terms() {
                c[component * monos.len() + rank_of[mono]] = s.clone();
            }
        }
        c
    };
    let mut rows: Vec<Vec<Scalar>> = upper.iter().map(&coords).collect();
    let base_rank = matrix_from_rows(&rows, dim, field).rank();
    for v in lower {
        rows.push(coords(v));
        let grown = matrix_from_rows(&rows, dim, field).rank();
        rows.pop();
        if grown != base_rank {
            return Err(Error::InvalidInput(format!(
                "kernel vector at degree {} escapes the next slice's span",
                degree - 1
            )));
        }
    }
    Ok(())
}

fn matrix_from_rows(rows: &[Vec<Scalar>], cols: usize, field: FieldSpec) -> ExactMatrix {
    let mut m = ExactMatrix::zero(rows.len(), cols, field);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                m.set(i, j, v.clone());
            }
        }
    }
    m
}

/// A witness that the degree-`n` kernel slice is zero: a full-size square
/// submatrix of the truncation matrix with nonzero determinant. Nearby
/// operators (any whose cited minor stays nonzero) share the property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroKernelCertificate {
    pub n: usize,
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub minor_value: Scalar,
}

/// Searches for a zero-kernel certificate at degree `n`: present exactly when
/// the truncation matrix has full column rank. The cited rows come from the
/// elimination's pivot trail; the minor value is exact.
pub fn zero_kernel_certificate(
    d: &MatrixOperator,
    n: usize,
) -> Result<Option<ZeroKernelCertificate>> {
    let t = truncation_matrix(d, n)?;
    let cols: Vec<usize> = (0..t.matrix.cols()).collect();

    if t.matrix.field() == FieldSpec::Rationals {
        if let Some(rows) = modular::full_column_rank_witness(&t.matrix) {
            let minor_value = modular::exact_minor_over_q(&t.matrix, &rows)
                .expect("rational matrix integerizes");
            debug_assert!(!minor_value.is_zero());
            return Ok(Some(ZeroKernelCertificate {
                n,
                row_indices: rows,
                col_indices: cols,
                minor_value,
            }));
        }
    }

    let reduction = t.matrix.reduction();
    if reduction.rank() != t.matrix.cols() {
        return Ok(None);
    }
    let mut rows: Vec<usize> = reduction.pivots.iter().map(|&(r, _)| r).collect();
    rows.sort_unstable();
    Ok(Some(ZeroKernelCertificate {
        n,
        row_indices: rows,
        col_indices: cols,
        minor_value: reduction.pivot_minor_det,
    }))
}

/// The per-parameter result of a pencil scan `D_0 + t D_1`.
#[derive(Debug, Clone)]
pub struct SemicontinuityTable {
    pub n: usize,
    pub rows: Vec<(Scalar, usize)>,
    /// Minimum dimension over the sample: the generic value on this sample.
    pub generic_dim: usize,
    /// Parameters whose dimension exceeds the sample minimum.
    pub special: Vec<Scalar>,
}

/// Computes `dim ker(D_0 + t D_1)` at degree `n` for each `t` and flags the
/// special locus where the dimension jumps above the sample minimum.
pub fn semicontinuity_scan(
    d0: &MatrixOperator,
    d1: &MatrixOperator,
    t_values: &[Scalar],
    n: usize,
) -> Result<SemicontinuityTable> {
    if t_values.is_empty() {
        return Err(Error::InvalidInput("empty parameter sample".into()));
    }
    let mut rows = Vec::with_capacity(t_values.len());
    for t in t_values {
        if t.field() != d0.field() {
            return Err(Error::FieldMismatch(d0.field().name(), t.field().name()));
        }
        let dt = d0.try_add(&d1.scale(t))?;
        let dim = kernel_basis(&dt, n)?.len();
        rows.push((t.clone(), dim));
    }
    let generic_dim = rows.iter().map(|&(_, d)| d).min().unwrap_or(0);
    let special: Vec<Scalar> =
        rows.iter().filter(|&&(_, d)| d > generic_dim).map(|(t, _)| t.clone()).collect();
    Ok(SemicontinuityTable { n, rows, generic_dim, special })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::operator::ScalarOperator;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn d1(field: FieldSpec) -> ScalarOperator {
        ScalarOperator::hasse(1, field, MultiIndex::new(vec![1])).unwrap()
    }

    #[test]
    fn truncation_of_identity() {
        let id = MatrixOperator::identity(1, 1, q());
        let t = truncation_matrix(&id, 1).unwrap();
        assert_eq!(t.matrix(), &ExactMatrix::identity(2, q()));
        assert_eq!(t.codomain_degree(), 1);
    }

    #[test]
    fn truncation_of_derivative() {
        // d^[1] at n=2: domain {1, x, x^2}, image coefficients 0, 1, 2x. The
        // uniform codomain bound keeps degree-2 rows, which stay zero.
        let d = MatrixOperator::scalar(d1(q()));
        let t = truncation_matrix(&d, 2).unwrap();
        assert_eq!(t.matrix().cols(), 3);
        assert_eq!(t.matrix().rows(), 3);
        assert!(t.matrix().get(0, 0).is_zero());
        assert_eq!(t.matrix().get(0, 1), &q().one());
        assert_eq!(t.matrix().get(1, 2), &q().integer(2));
        for col in 0..3 {
            assert!(t.matrix().get(2, col).is_zero(), "padding row stays zero");
        }
    }

    #[test]
    fn truncation_of_zero_operator() {
        let z = MatrixOperator::zero(2, 1, q());
        let t = truncation_matrix(&z, 1).unwrap();
        assert_eq!(t.matrix(), &ExactMatrix::zero(4, 4, q()));
    }

    #[test]
    fn kernel_of_derivative_is_constants() {
        let d = MatrixOperator::scalar(d1(q()));
        for n in [0usize, 3, 6] {
            let basis = kernel_basis(&d, n).unwrap();
            assert_eq!(basis.len(), 1);
            assert_eq!(basis[0].entry(0), &Poly::one(1, q()));
        }
    }

    #[test]
    fn kernel_of_euler_minus_one() {
        // (x d - 1) x = 0; the kernel at n=3 is spanned by x alone.
        let op = MatrixOperator::scalar(
            ScalarOperator::from_terms(
                1,
                q(),
                vec![
                    (MultiIndex::new(vec![1]), Poly::var(1, 0, q())),
                    (MultiIndex::new(vec![0]), Poly::one(1, q()).neg()),
                ],
            )
            .unwrap(),
        );
        let basis = kernel_basis(&op, 3).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].entry(0), &Poly::var(1, 0, q()));
    }

    #[test]
    fn kernel_of_lower_triangular_witness() {
        // [[d,0],[x d, d]]: kernel is exactly the constant vectors.
        let op = MatrixOperator::new(vec![
            vec![d1(q()), ScalarOperator::zero(1, q())],
            vec![
                ScalarOperator::from_terms(
                    1,
                    q(),
                    vec![(MultiIndex::new(vec![1]), Poly::var(1, 0, q()))],
                )
                .unwrap(),
                d1(q()),
            ],
        ])
        .unwrap();
        let basis = kernel_basis(&op, 5).unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0].entry(0), &Poly::one(1, q()));
        assert!(basis[0].entry(1).is_zero());
        assert!(basis[1].entry(0).is_zero());
        assert_eq!(basis[1].entry(1), &Poly::one(1, q()));
    }

    #[test]
    fn scan_of_identity_stabilizes_at_zero() {
        let id = MatrixOperator::identity(1, 1, q());
        let report = kernel_scan(&id, 5).unwrap();
        assert!(report.dims.values().all(|&d| d == 0));
        assert_eq!(report.stabilized_at, Some(0));
    }

    #[test]
    fn scan_of_derivative_mod_three() {
        // Over F_3 the kernel picks up x^3 and x^6: dims 1,1,1,2,2,2,3,3.
        let f3 = FieldSpec::prime_field(3).unwrap();
        let d = MatrixOperator::scalar(d1(f3));
        let report = kernel_scan(&d, 7).unwrap();
        let dims: Vec<usize> = (0..=7).map(|n| report.dim_at(n)).collect();
        assert_eq!(dims, vec![1, 1, 1, 2, 2, 2, 3, 3]);
        assert_eq!(report.stabilized_at, None, "final plateau is too short to flag");
    }

    #[test]
    fn scan_of_zero_operator_never_stabilizes() {
        let z = MatrixOperator::zero(1, 1, q());
        let report = kernel_scan(&z, 6).unwrap();
        for n in 0..=6 {
            assert_eq!(report.dim_at(n), n + 1);
        }
        assert_eq!(report.stabilized_at, None);
    }

    #[test]
    fn certificate_for_identity() {
        let id = MatrixOperator::identity(1, 1, q());
        let cert = zero_kernel_certificate(&id, 2).unwrap().unwrap();
        assert_eq!(cert.minor_value, q().one());
        assert_eq!(cert.row_indices, vec![0, 1, 2]);
    }

    #[test]
    fn certificate_absent_for_derivative() {
        let d = MatrixOperator::scalar(d1(q()));
        assert!(zero_kernel_certificate(&d, 3).unwrap().is_none());
    }

    #[test]
    fn certificate_for_triangular_shape() {
        // [[1+x, 0],[d, 2]] has zero kernel; a full minor exists at n=4.
        let one_plus_x = Poly::one(1, q()).try_add(&Poly::var(1, 0, q())).unwrap();
        let op = MatrixOperator::new(vec![
            vec![ScalarOperator::multiplication(one_plus_x), ScalarOperator::zero(1, q())],
            vec![d1(q()), ScalarOperator::multiplication(Poly::one(1, q()).scale(&q().integer(2)))],
        ])
        .unwrap();
        let cert = zero_kernel_certificate(&op, 4).unwrap().unwrap();
        assert!(!cert.minor_value.is_zero());
        assert_eq!(cert.col_indices.len(), 10, "2 * C(1+4,1) columns");
        // Independent verification: Bareiss on the cited submatrix.
        let t = truncation_matrix(&op, 4).unwrap();
        let sub = t.matrix().submatrix(&cert.row_indices, &cert.col_indices);
        assert_eq!(sub.determinant_bareiss().unwrap(), cert.minor_value);
        assert!(kernel_basis(&op, 4).unwrap().is_empty());
    }

    #[test]
    fn semicontinuity_of_scaled_identity() {
        // D_t = t * id: dimension 3 at t=0 (degree 2 slice), 0 elsewhere.
        let z = MatrixOperator::zero(1, 1, q());
        let id = MatrixOperator::identity(1, 1, q());
        let ts: Vec<Scalar> = (0..4).map(|t| q().integer(t)).collect();
        let table = semicontinuity_scan(&z, &id, &ts, 2).unwrap();
        assert_eq!(table.rows[0].1, 3);
        assert!(table.rows[1..].iter().all(|&(_, d)| d == 0));
        assert_eq!(table.generic_dim, 0);
        assert_eq!(table.special, vec![q().integer(0)]);
    }

    #[test]
    fn semicontinuity_of_derivative_pencil() {
        // d + t: only t=0 has polynomial solutions (degree comparison kills
        // the rest).
        let d = MatrixOperator::scalar(d1(q()));
        let id = MatrixOperator::identity(1, 1, q());
        let ts: Vec<Scalar> = (0..6).map(|t| q().integer(t)).collect();
        let table = semicontinuity_scan(&d, &id, &ts, 6).unwrap();
        assert_eq!(table.rows[0].1, 1);
        assert!(table.rows[1..].iter().all(|&(_, d)| d == 0));
        assert_eq!(table.special, vec![q().integer(0)]);
    }

    #[test]
    fn semicontinuity_of_constant_pencil() {
        let d = MatrixOperator::scalar(d1(q()));
        let z = MatrixOperator::zero(1, 1, q());
        let ts: Vec<Scalar> = (0..4).map(|t| q().integer(t)).collect();
        let table = semicontinuity_scan(&d, &z, &ts, 4).unwrap();
        assert!(table.rows.iter().all(|&(_, dim)| dim == 1));
        assert!(table.special.is_empty());
    }

    #[test]
    fn rank_nullity_cross_check() {
        let op = MatrixOperator::new(vec![
            vec![d1(q()), ScalarOperator::identity(1, q())],
            vec![ScalarOperator::zero(1, q()), d1(q())],
        ])
        .unwrap();
        for n in 0..=4 {
            let t = truncation_matrix(&op, n).unwrap();
            let basis = kernel_basis(&op, n).unwrap();
            assert_eq!(t.matrix().rank() + basis.len(), t.matrix().cols());
        }
    }
}
