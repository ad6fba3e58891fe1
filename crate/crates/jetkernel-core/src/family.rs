//! Parametrized operator families: the universal family, constant
//! coefficients, triangular witnesses with known kernels, the
//! infinite-kernel subspace, GL translates, and mod-p specialization.
//!
//! "Very general" statements are sampled: coefficients are seeded uniform
//! integers in `[-B, B]` over the rationals, and every report carries the
//! seed and bound. Sampling is deterministic per `(spec, seed, bound)` across
//! runs and platforms, with values drawn in the canonical parameter order.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::field::FieldSpec;
use crate::multiindex::{monomials_up_to, MultiIndex};
use crate::operator::{MatrixOperator, ScalarOperator};
use crate::poly::Poly;
use crate::transform::{conjugate_glr, pullback_automorphism, InvertiblePolyMatrix, PolyAutomorphism};
use crate::Result;

/// Canonical address of one coefficient parameter: the coefficient of `x^J`
/// inside the `d^[I]` term of entry `(row, col)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParamIndex {
    pub row: usize,
    pub col: usize,
    pub deriv: MultiIndex,
    pub coef: MultiIndex,
}

impl std::fmt::Display for ParamIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t[I={},J={},i={},j={}]", self.deriv, self.coef, self.row + 1, self.col + 1)
    }
}

/// Which coefficient pattern a family fixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyMode {
    /// Every coefficient of every entry is a free parameter.
    Universal,
    /// Coefficient polynomials are constants (`J = 0` only).
    ConstantCoefficient,
    /// Lower triangular with fixed nonzero order-0 diagonal polynomials;
    /// parameters fill the strictly lower entries. Every member has zero
    /// kernel, by the triangular zero-divisor argument.
    TriangularUnit { diagonal: Vec<Poly> },
    /// One variable, diagonal fixed to `d^[1]`, parameters on strictly lower
    /// entries restricted to derivative terms (`|I| >= 1`), so every entry
    /// annihilates constants. Every member's kernel is exactly the constant
    /// vectors.
    ZeroConstantTermTriangular,
    /// No order-0 term and no derivatives in `x_1` (`I = 0` or `I_1 != 0`
    /// coefficients vanish): every member kills all of `k[x_1]^r`, so the
    /// kernel is infinite dimensional.
    SubspaceL,
}

/// A finite-dimensional family of operators of order `<= order_bound` with
/// coefficient degree `<= coef_degree_bound` and a mode-specific vanishing
/// pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub r: usize,
    pub nvars: usize,
    pub order_bound: usize,
    pub coef_degree_bound: usize,
    pub mode: FamilyMode,
}

impl FamilySpec {
    /// Whether the vanishing pattern admits a parameter at this address.
    fn admits(&self, row: usize, col: usize, deriv: &MultiIndex, coef: &MultiIndex) -> bool {
        let _ = coef;
        match &self.mode {
            FamilyMode::Universal => true,
            FamilyMode::ConstantCoefficient => coef.is_zero(),
            FamilyMode::TriangularUnit { .. } => row > col,
            FamilyMode::ZeroConstantTermTriangular => row > col && !deriv.is_zero(),
            FamilyMode::SubspaceL => !deriv.is_zero() && deriv.get(0) == 0,
        }
    }

    /// All admitted parameter addresses, in canonical order.
    pub fn parameters(&self) -> Vec<ParamIndex> {
        let derivs = monomials_up_to(self.nvars, self.order_bound);
        let coefs = monomials_up_to(self.nvars, self.coef_degree_bound);
        let mut out = Vec::new();
        for row in 0..self.r {
            for col in 0..self.r {
                for deriv in &derivs {
                    for coef in &coefs {
                        if self.admits(row, col, deriv, coef) {
                            out.push(ParamIndex {
                                row,
                                col,
                                deriv: deriv.clone(),
                                coef: coef.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// The family dimension `K`.
    pub fn parameter_count(&self) -> usize {
        self.parameters().len()
    }
}

/// The universal family: all operators of order `<= n` with coefficient
/// degree `<= m`; `K = r^2 C(nvars+n, nvars) C(nvars+m, nvars)`.
pub fn universal_family(r: usize, nvars: usize, n: usize, m: usize) -> Result<FamilySpec> {
    if r == 0 || nvars == 0 {
        return Err(Error::UnsupportedFamily("positive rank and variable count".into()));
    }
    Ok(FamilySpec { r, nvars, order_bound: n, coef_degree_bound: m, mode: FamilyMode::Universal })
}

/// The constant-coefficient family of order `<= n`.
pub fn constant_coefficient_family(r: usize, nvars: usize, n: usize) -> Result<FamilySpec> {
    if r == 0 || nvars == 0 {
        return Err(Error::UnsupportedFamily("positive rank and variable count".into()));
    }
    Ok(FamilySpec {
        r,
        nvars,
        order_bound: n,
        coef_degree_bound: 0,
        mode: FamilyMode::ConstantCoefficient,
    })
}

/// Lower-triangular family over a fixed nonzero order-0 diagonal.
pub fn triangular_unit_family(
    nvars: usize,
    diagonal: Vec<Poly>,
    n: usize,
    m: usize,
) -> Result<FamilySpec> {
    let r = diagonal.len();
    if r == 0 || nvars == 0 {
        return Err(Error::UnsupportedFamily("positive rank and variable count".into()));
    }
    for (i, p) in diagonal.iter().enumerate() {
        if p.is_zero() {
            return Err(Error::ZeroDiagonal(i));
        }
        if p.nvars() != nvars {
            return Err(Error::NvarsMismatch(p.nvars(), nvars));
        }
        if p.field() != FieldSpec::Rationals {
            return Err(Error::FieldMismatch("rationals".into(), p.field().name()));
        }
    }
    Ok(FamilySpec {
        r,
        nvars,
        order_bound: n,
        coef_degree_bound: m,
        mode: FamilyMode::TriangularUnit { diagonal },
    })
}

/// One-variable family with `d^[1]` diagonal and constant-annihilating
/// strictly lower entries.
pub fn zero_constant_term_triangular_family(r: usize, n: usize, m: usize) -> Result<FamilySpec> {
    if r == 0 {
        return Err(Error::UnsupportedFamily("positive rank".into()));
    }
    if n == 0 {
        return Err(Error::UnsupportedFamily(
            "order bound >= 1 (the diagonal is a first-order derivative)".into(),
        ));
    }
    Ok(FamilySpec {
        r,
        nvars: 1,
        order_bound: n,
        coef_degree_bound: m,
        mode: FamilyMode::ZeroConstantTermTriangular,
    })
}

/// The infinite-kernel subspace: requires at least two variables.
pub fn subspace_l_family(r: usize, nvars: usize, n: usize, m: usize) -> Result<FamilySpec> {
    if nvars < 2 {
        return Err(Error::UnsupportedFamily("at least two variables for the subspace".into()));
    }
    if r == 0 {
        return Err(Error::UnsupportedFamily("positive rank".into()));
    }
    Ok(FamilySpec { r, nvars, order_bound: n, coef_degree_bound: m, mode: FamilyMode::SubspaceL })
}

/// One seeded point of a family: integer coefficients in `[-bound, bound]`
/// drawn in canonical parameter order from a ChaCha stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePoint {
    pub spec: FamilySpec,
    pub seed: u64,
    pub bound: i64,
    pub values: BTreeMap<ParamIndex, i64>,
}

/// Draws the sample point `(spec, seed, bound)`.
pub fn sample(spec: &FamilySpec, seed: u64, bound: i64) -> SamplePoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = BTreeMap::new();
    for p in spec.parameters() {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            values.insert(p, v);
        }
    }
    SamplePoint { spec: spec.clone(), seed, bound, values }
}

/// Perturbs every parameter of a point by a seeded value in `{-1, 0, 1}`
/// (small-step neighborhood experiments). The perturbed point stays inside
/// the family's vanishing pattern and is deterministic per
/// `(point, jitter_seed)`.
pub fn jitter(point: &SamplePoint, jitter_seed: u64) -> SamplePoint {
    let mut rng = ChaCha8Rng::seed_from_u64(jitter_seed);
    let mut values = BTreeMap::new();
    for p in point.spec.parameters() {
        let base = point.values.get(&p).copied().unwrap_or(0);
        let v = base + rng.gen_range(-1i64..=1);
        if v != 0 {
            values.insert(p, v);
        }
    }
    SamplePoint { spec: point.spec.clone(), seed: point.seed, bound: point.bound, values }
}

/// Builds the operator of a sample point over the rationals: parameter values
/// become the `x^J` coefficients of the `d^[I]` terms, plus the mode's fixed
/// part (diagonal polynomials, or the `d^[1]` diagonal).
pub fn instantiate(point: &SamplePoint) -> Result<MatrixOperator> {
    let spec = &point.spec;
    let field = FieldSpec::Rationals;
    let (r, nvars) = (spec.r, spec.nvars);

    for (p, _) in &point.values {
        if p.row >= r
            || p.col >= r
            || p.deriv.len() != nvars
            || p.coef.len() != nvars
            || p.deriv.total_degree() > spec.order_bound
            || p.coef.total_degree() > spec.coef_degree_bound
            || !spec.admits(p.row, p.col, &p.deriv, &p.coef)
        {
            return Err(Error::PatternViolation(p.to_string()));
        }
    }

    // coefficient polynomial per (row, col, deriv)
    let mut coeffs: BTreeMap<(usize, usize, MultiIndex), Vec<(MultiIndex, i64)>> = BTreeMap::new();
    for (p, &v) in &point.values {
        coeffs
            .entry((p.row, p.col, p.deriv.clone()))
            .or_default()
            .push((p.coef.clone(), v));
    }

    let mut op = MatrixOperator::zero(r, nvars, field);
    let mut entry_terms: BTreeMap<(usize, usize), Vec<(MultiIndex, Poly)>> = BTreeMap::new();
    for ((row, col, deriv), monomials) in coeffs {
        let poly = Poly::from_terms(
            nvars,
            field,
            monomials.into_iter().map(|(j, v)| (j, field.integer(v))),
        )?;
        entry_terms.entry((row, col)).or_default().push((deriv, poly));
    }
    for ((row, col), terms) in entry_terms {
        op.set_entry(row, col, ScalarOperator::from_terms(nvars, field, terms)?)?;
    }

    match &spec.mode {
        FamilyMode::TriangularUnit { diagonal } => {
            for (i, p) in diagonal.iter().enumerate() {
                op.set_entry(i, i, ScalarOperator::multiplication(p.clone()))?;
            }
        }
        FamilyMode::ZeroConstantTermTriangular => {
            for i in 0..r {
                op.set_entry(i, i, ScalarOperator::hasse(1, field, MultiIndex::new(vec![1]))?)?;
            }
        }
        _ => {}
    }
    Ok(op)
}

/// Builds a lower-triangular operator with the given nonzero order-0
/// diagonal polynomials and optional strictly lower entries. Such operators
/// have zero kernel: the first nonzero component of a kernel vector would be
/// annihilated by multiplication with a nonzero polynomial over a domain.
pub fn triangular_witness(
    nvars: usize,
    field: FieldSpec,
    diagonal: &[Poly],
    strictly_lower: &[(usize, usize, ScalarOperator)],
) -> Result<MatrixOperator> {
    let r = diagonal.len();
    if r == 0 {
        return Err(Error::UnsupportedFamily("positive rank".into()));
    }
    let mut op = MatrixOperator::zero(r, nvars, field);
    for (i, p) in diagonal.iter().enumerate() {
        if p.is_zero() {
            return Err(Error::ZeroDiagonal(i));
        }
        op.set_entry(i, i, ScalarOperator::multiplication(p.clone()))?;
    }
    for (i, j, entry) in strictly_lower {
        if *i <= *j || *i >= r {
            return Err(Error::InvalidInput(format!(
                "entry ({i},{j}) is not strictly lower triangular"
            )));
        }
        op.set_entry(*i, *j, entry.clone())?;
    }
    Ok(op)
}

/// Builds the one-variable operator with `d^[1]` diagonal and the given
/// strictly lower entries, each required to annihilate constants (no order-0
/// term). The kernel at every degree is exactly the `r` constant unit
/// vectors.
pub fn constant_kernel_witness(
    r: usize,
    field: FieldSpec,
    strictly_lower: &[(usize, usize, ScalarOperator)],
) -> Result<MatrixOperator> {
    if r == 0 {
        return Err(Error::UnsupportedFamily("positive rank".into()));
    }
    let mut op = MatrixOperator::zero(r, 1, field);
    for i in 0..r {
        op.set_entry(i, i, ScalarOperator::hasse(1, field, MultiIndex::new(vec![1]))?)?;
    }
    for (i, j, entry) in strictly_lower {
        if *i <= *j || *i >= r {
            return Err(Error::InvalidInput(format!(
                "entry ({i},{j}) is not strictly lower triangular"
            )));
        }
        if entry.terms().any(|(index, _)| index.is_zero()) {
            return Err(Error::ConstantTermViolation(*i, *j));
        }
        op.set_entry(*i, *j, entry.clone())?;
    }
    Ok(op)
}

/// A seeded member of the constant-kernel neighborhood: a seeded
/// [`zero_constant_term_triangular_family`] base point plus a full-matrix
/// perturbation whose entries all annihilate constants (derivative terms
/// only). Every member's kernel contains the constant vectors, and the
/// generic member's kernel is exactly them.
pub fn constant_annihilating_sample(
    r: usize,
    order_bound: usize,
    coef_degree_bound: usize,
    seed: u64,
    bound: i64,
) -> Result<MatrixOperator> {
    let base_spec = zero_constant_term_triangular_family(r, order_bound, coef_degree_bound)?;
    let base = instantiate(&sample(&base_spec, seed, bound))?;

    // Full-matrix perturbation: parameters at every entry, derivative terms only.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let field = FieldSpec::Rationals;
    let derivs = monomials_up_to(1, order_bound);
    let coefs = monomials_up_to(1, coef_degree_bound);
    let mut perturbation = MatrixOperator::zero(r, 1, field);
    for row in 0..r {
        for col in 0..r {
            let mut terms = Vec::new();
            for deriv in &derivs {
                if deriv.is_zero() {
                    continue;
                }
                let mut monomials = Vec::new();
                for coef in &coefs {
                    let v: i64 = rng.gen_range(-bound..=bound);
                    if v != 0 {
                        monomials.push((coef.clone(), field.integer(v)));
                    }
                }
                terms.push((deriv.clone(), Poly::from_terms(1, field, monomials)?));
            }
            perturbation.set_entry(row, col, ScalarOperator::from_terms(1, field, terms)?)?;
        }
    }
    base.try_add(&perturbation)
}

/// A seeded unitriangular matrix in `GL_r(k[x])`: strictly lower entries are
/// random polynomials of degree `<= degree` with integer coefficients in
/// `[-bound, bound]`.
pub fn sample_unitriangular_matrix(
    r: usize,
    nvars: usize,
    degree: usize,
    seed: u64,
    bound: i64,
) -> Result<InvertiblePolyMatrix> {
    let field = FieldSpec::Rationals;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monos = monomials_up_to(nvars, degree);
    let mut lower = Vec::new();
    for i in 0..r {
        for j in 0..i {
            let mut terms = Vec::new();
            for mono in &monos {
                let v: i64 = rng.gen_range(-bound..=bound);
                if v != 0 {
                    terms.push((mono.clone(), field.integer(v)));
                }
            }
            lower.push((i, j, Poly::from_terms(nvars, field, terms)?));
        }
    }
    InvertiblePolyMatrix::unitriangular(r, nvars, field, &lower)
}

/// One element of either group acting on operators.
#[derive(Debug, Clone)]
pub enum GlWitness {
    Matrix(InvertiblePolyMatrix),
    Automorphism(PolyAutomorphism),
}

/// Translates an operator by a group element: conjugation for matrices,
/// pullback for coordinate automorphisms. Kernels transport through the
/// witness's inverse.
pub fn gl_translate(d: &MatrixOperator, witness: &GlWitness) -> Result<MatrixOperator> {
    match witness {
        GlWitness::Matrix(a) => conjugate_glr(d, a),
        GlWitness::Automorphism(g) => pullback_automorphism(d, g),
    }
}

/// Entrywise reduction of a rational operator's Hasse coefficients mod `p`.
/// Fails, naming the coefficient, when a denominator is divisible by `p`.
pub fn reduce_mod_p(d: &MatrixOperator, p: u64) -> Result<MatrixOperator> {
    let field = FieldSpec::prime_field(p)?;
    if d.field() != FieldSpec::Rationals {
        return Err(Error::FieldMismatch("rationals".into(), d.field().name()));
    }
    let r = d.rank();
    let nvars = d.nvars();
    let mut out = MatrixOperator::zero(r, nvars, field);
    for i in 0..r {
        for j in 0..r {
            let mut terms = Vec::new();
            for (deriv, coeff) in d.entry(i, j).terms() {
                let mut reduced_terms = Vec::new();
                for (mono, c) in coeff.terms() {
                    let reduced = c.reduce_mod_p(p).map_err(|_| Error::BadDenominator {
                        row: i,
                        col: j,
                        deriv: deriv.clone(),
                        denominator: c
                            .as_rational()
                            .map(|q| q.denom().to_string())
                            .unwrap_or_default(),
                        p,
                    })?;
                    reduced_terms.push((mono.clone(), reduced));
                }
                terms.push((deriv.clone(), Poly::from_terms(nvars, field, reduced_terms)?));
            }
            out.set_entry(i, j, ScalarOperator::from_terms(nvars, field, terms)?)?;
        }
    }
    Ok(out)
}

/// The primes dividing denominators anywhere in a rational operator: the
/// a-priori bad set for specialization experiments.
pub fn denominator_primes(d: &MatrixOperator) -> Vec<u64> {
    use num_bigint::BigInt;
    use num_traits::One;
    let mut primes = std::collections::BTreeSet::new();
    for i in 0..d.rank() {
        for j in 0..d.rank() {
            for (_, coeff) in d.entry(i, j).terms() {
                for (_, c) in coeff.terms() {
                    if let Some(q) = c.as_rational() {
                        let mut den = q.denom().clone();
                        let mut f = 2u64;
                        while BigInt::from(f) * BigInt::from(f) <= den {
                            while (&den % BigInt::from(f)) == BigInt::from(0) {
                                primes.insert(f);
                                den /= BigInt::from(f);
                            }
                            f += 1;
                        }
                        if den > BigInt::one() {
                            if let Ok(p) = u64::try_from(&den) {
                                primes.insert(p);
                            }
                        }
                    }
                }
            }
        }
    }
    primes.into_iter().collect()
}


#[cfg(test)]
mod translation_tests {
    use super::*;
    use crate::poly::PolyVec;

    #[test]
    fn translation_automorphism_fixes_first_variable_kernel() {
        // Pulling an L-sample back along x1 -> x1 + 1 keeps every vector
        // polynomial in x1 inside the kernel: the substitution fixes k[x1].
        let q = FieldSpec::Rationals;
        let spec = subspace_l_family(2, 2, 2, 1).unwrap();
        let op = instantiate(&sample(&spec, 17, 8)).unwrap();
        let g = PolyAutomorphism::affine(
            &[q.one(), q.one()],
            &[q.one(), q.zero()],
        )
        .unwrap();
        let moved = gl_translate(&op, &GlWitness::Automorphism(g)).unwrap();
        for e in 0..4u32 {
            for component in 0..2 {
                let v = PolyVec::monomial(2, 2, q, component, MultiIndex::new(vec![e, 0])).unwrap();
                assert!(moved.apply(&v).unwrap().is_zero(), "x1^{e} e_{component} must stay");
            }
        }
    }
}
