//! Scalar and matrix differential operators in the Hasse derivative basis.
//!
//! An operator is stored as a finite sum of terms `a_I * d^[I]` where `d^[I]`
//! is the divided-power (Hasse) derivative: `d^[I] x^J = prod_k C(J_k, I_k) *
//! x^(J-I)`. In characteristic zero `d^[I] = (1/I!) * d^I`, and the classical
//! basis is converted at the boundary; in characteristic p only the Hasse
//! basis is well-defined. The order of the zero operator is the sentinel
//! `None`, distinct from order 0.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::multiindex::{monomials_of_degree, multi_binomial, MultiIndex};
use crate::poly::{Poly, PolyVec};
use crate::Result;

/// A single differential operator `sum_I a_I(x) * d^[I]` acting on one
/// polynomial ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarOperator {
    nvars: usize,
    field: FieldSpec,
    terms: BTreeMap<MultiIndex, Poly>,
}

impl ScalarOperator {
    pub fn zero(nvars: usize, field: FieldSpec) -> Self {
        ScalarOperator { nvars, field, terms: BTreeMap::new() }
    }

    /// The identity operator (multiplication by 1).
    pub fn identity(nvars: usize, field: FieldSpec) -> Self {
        ScalarOperator::multiplication(Poly::one(nvars, field))
    }

    /// Multiplication by a fixed polynomial (an order-0 operator).
    pub fn multiplication(p: Poly) -> Self {
        let mut terms = BTreeMap::new();
        let (nvars, field) = (p.nvars(), p.field());
        if !p.is_zero() {
            terms.insert(MultiIndex::zero(nvars), p);
        }
        ScalarOperator { nvars, field, terms }
    }

    /// The pure Hasse derivative `d^[I]`.
    pub fn hasse(nvars: usize, field: FieldSpec, index: MultiIndex) -> Result<Self> {
        if index.len() != nvars {
            return Err(Error::LengthMismatch(index.len(), nvars));
        }
        let mut terms = BTreeMap::new();
        terms.insert(index, Poly::one(nvars, field));
        Ok(ScalarOperator { nvars, field, terms })
    }

    /// Builds an operator from `(derivative index, coefficient)` pairs,
    /// summing duplicates and dropping zero coefficients.
    pub fn from_terms(
        nvars: usize,
        field: FieldSpec,
        terms: impl IntoIterator<Item = (MultiIndex, Poly)>,
    ) -> Result<Self> {
        let mut op = ScalarOperator::zero(nvars, field);
        for (index, coeff) in terms {
            if index.len() != nvars {
                return Err(Error::LengthMismatch(index.len(), nvars));
            }
            if coeff.nvars() != nvars {
                return Err(Error::NvarsMismatch(coeff.nvars(), nvars));
            }
            if coeff.field() != field {
                return Err(Error::FieldMismatch(field.name(), coeff.field().name()));
            }
            op.add_term(index, coeff);
        }
        Ok(op)
    }

    fn add_term(&mut self, index: MultiIndex, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().try_add(&coeff).expect("validated term");
                if s.is_zero() {
                    e.remove();
                } else {
                    e.insert(s);
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Poly)> {
        self.terms.iter()
    }

    /// The coefficient of `d^[I]` (zero when absent).
    pub fn coefficient(&self, index: &MultiIndex) -> Poly {
        self.terms.get(index).cloned().unwrap_or_else(|| Poly::zero(self.nvars, self.field))
    }

    /// Max `|I|` over stored terms; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|i| i.total_degree()).max()
    }

    /// Max of `deg a_I - |I|`; `None` for the zero operator. Output degrees
    /// satisfy `deg(D f) <= deg f + max(shift, 0)`.
    pub fn degree_shift(&self) -> Option<i64> {
        self.terms
            .iter()
            .map(|(i, a)| {
                a.total_degree().expect("stored coefficients are nonzero") as i64
                    - i.total_degree() as i64
            })
            .max()
    }

    /// Applies the operator: `sum_I a_I * d^[I](p)`.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        if p.nvars() != self.nvars {
            return Err(Error::NvarsMismatch(p.nvars(), self.nvars));
        }
        if p.field() != self.field {
            return Err(Error::FieldMismatch(self.field.name(), p.field().name()));
        }
        let mut out = Poly::zero(self.nvars, self.field);
        for (index, coeff) in &self.terms {
            let d = p.hasse_derivative(index)?;
            if !d.is_zero() {
                out = out.try_add(&coeff.try_mul(&d)?)?;
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &ScalarOperator) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.name(), other.field.name()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &ScalarOperator) -> Result<ScalarOperator> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> ScalarOperator {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn try_sub(&self, other: &ScalarOperator) -> Result<ScalarOperator> {
        self.try_add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> ScalarOperator {
        let mut out = ScalarOperator::zero(self.nvars, self.field);
        if c.is_zero() {
            return out;
        }
        for (i, a) in &self.terms {
            out.add_term(i.clone(), a.scale(c));
        }
        out
    }

    /// Operator composition `self . other` via the Hasse-Leibniz rule
    /// `d^[I] (b * -) = sum_{K <= I} d^[K](b) * d^[I-K]` and the composition
    /// identity `d^[A] . d^[B] = C(A+B, A) * d^[A+B]`.
    pub fn compose(&self, other: &ScalarOperator) -> Result<ScalarOperator> {
        self.check_compatible(other)?;
        let mut out = ScalarOperator::zero(self.nvars, self.field);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                for k in sub_indices(i) {
                    let db = b.hasse_derivative(&k)?;
                    if db.is_zero() {
                        continue;
                    }
                    let rest = i.checked_sub(&k).expect("k <= i by construction");
                    let index = rest.checked_add(j)?;
                    let bin = multi_binomial(&index, j, &self.field)?;
                    if bin.is_zero() {
                        continue;
                    }
                    let coeff = a.try_mul(&db)?.scale(&bin);
                    out.add_term(index, coeff);
                }
            }
        }
        Ok(out)
    }
}

/// All multi-indices `K` with `K <= I` componentwise.
fn sub_indices(i: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![Vec::with_capacity(i.len())];
    for &e in i.exponents() {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for prefix in &out {
            for v in 0..=e {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(MultiIndex::new).collect()
}

/// Converts an operator given in the classical basis `sum a_I d^I` to the
/// Hasse normal form `sum (I! a_I) d^[I]`. Fails when the characteristic
/// divides some required `I!`.
pub fn classical_to_hasse(
    nvars: usize,
    field: FieldSpec,
    terms: &BTreeMap<MultiIndex, Poly>,
) -> Result<ScalarOperator> {
    let mut converted = Vec::new();
    for (index, coeff) in terms {
        let factorial = field.from_bigint(&index.factorial());
        if factorial.is_zero() {
            return Err(Error::FactorialNotInvertible(index.clone(), field.characteristic()));
        }
        converted.push((index.clone(), coeff.scale(&factorial)));
    }
    ScalarOperator::from_terms(nvars, field, converted)
}

/// Inverse of [`classical_to_hasse`]: recovers classical coefficients
/// `a_I = b_I / I!` from Hasse coefficients `b_I`.
pub fn hasse_to_classical(op: &ScalarOperator) -> Result<BTreeMap<MultiIndex, Poly>> {
    let field = op.field();
    let mut out = BTreeMap::new();
    for (index, coeff) in op.terms() {
        let factorial = field.from_bigint(&index.factorial());
        if factorial.is_zero() {
            return Err(Error::FactorialNotInvertible(index.clone(), field.characteristic()));
        }
        out.insert(index.clone(), coeff.scale(&factorial.inverse()?));
    }
    Ok(out)
}

/// An `r x r` matrix of scalar operators acting on `k[x]^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixOperator {
    r: usize,
    nvars: usize,
    field: FieldSpec,
    entries: Vec<ScalarOperator>, // row-major r x r
}

impl MatrixOperator {
    pub fn new(entries: Vec<Vec<ScalarOperator>>) -> Result<Self> {
        let r = entries.len();
        if r == 0 || entries.iter().any(|row| row.len() != r) {
            return Err(Error::DimensionMismatch(
                "operator matrix must be square and nonempty".into(),
            ));
        }
        let nvars = entries[0][0].nvars();
        let field = entries[0][0].field();
        for row in &entries {
            for e in row {
                if e.nvars() != nvars {
                    return Err(Error::NvarsMismatch(e.nvars(), nvars));
                }
                if e.field() != field {
                    return Err(Error::FieldMismatch(field.name(), e.field().name()));
                }
            }
        }
        Ok(MatrixOperator { r, nvars, field, entries: entries.into_iter().flatten().collect() })
    }

    pub fn zero(r: usize, nvars: usize, field: FieldSpec) -> Self {
        MatrixOperator {
            r,
            nvars,
            field,
            entries: vec![ScalarOperator::zero(nvars, field); r * r],
        }
    }

    pub fn identity(r: usize, nvars: usize, field: FieldSpec) -> Self {
        let mut op = MatrixOperator::zero(r, nvars, field);
        for i in 0..r {
            op.entries[i * r + i] = ScalarOperator::identity(nvars, field);
        }
        op
    }

    /// Wraps a single scalar operator as a 1x1 matrix operator.
    pub fn scalar(op: ScalarOperator) -> Self {
        MatrixOperator { r: 1, nvars: op.nvars(), field: op.field(), entries: vec![op] }
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarOperator {
        &self.entries[i * self.r + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, op: ScalarOperator) -> Result<()> {
        if op.nvars() != self.nvars {
            return Err(Error::NvarsMismatch(op.nvars(), self.nvars));
        }
        if op.field() != self.field {
            return Err(Error::FieldMismatch(self.field.name(), op.field().name()));
        }
        self.entries[i * self.r + j] = op;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ScalarOperator::is_zero)
    }

    /// Max entry order; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.entries.iter().filter_map(ScalarOperator::order).max()
    }

    /// Max entry degree shift; `None` for the zero operator.
    pub fn degree_shift(&self) -> Option<i64> {
        self.entries.iter().filter_map(ScalarOperator::degree_shift).max()
    }

    fn check_vec(&self, v: &PolyVec) -> Result<()> {
        if v.rank() != self.r {
            return Err(Error::RankMismatch(v.rank(), self.r));
        }
        if v.nvars() != self.nvars {
            return Err(Error::NvarsMismatch(v.nvars(), self.nvars));
        }
        if v.field() != self.field {
            return Err(Error::FieldMismatch(self.field.name(), v.field().name()));
        }
        Ok(())
    }

    /// Applies the operator entrywise: `(Dv)_i = sum_j D_ij(v_j)`.
    pub fn apply(&self, v: &PolyVec) -> Result<PolyVec> {
        self.check_vec(v)?;
        let mut out = Vec::with_capacity(self.r);
        for i in 0..self.r {
            let mut acc = Poly::zero(self.nvars, self.field);
            for j in 0..self.r {
                let e = self.entry(i, j);
                if !e.is_zero() && !v.entry(j).is_zero() {
                    acc = acc.try_add(&e.apply(v.entry(j))?)?;
                }
            }
            out.push(acc);
        }
        PolyVec::new(out)
    }

    fn check_compatible(&self, other: &MatrixOperator) -> Result<()> {
        if self.r != other.r {
            return Err(Error::RankMismatch(self.r, other.r));
        }
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.name(), other.field.name()));
        }
        Ok(())
    }

    /// Matrix composition: `(self . other)(v) = self(other(v))`.
    pub fn compose(&self, other: &MatrixOperator) -> Result<MatrixOperator> {
        self.check_compatible(other)?;
        let mut out = MatrixOperator::zero(self.r, self.nvars, self.field);
        for i in 0..self.r {
            for j in 0..self.r {
                let mut acc = ScalarOperator::zero(self.nvars, self.field);
                for k in 0..self.r {
                    let a = self.entry(i, k);
                    let b = other.entry(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.try_add(&a.compose(b)?)?;
                    }
                }
                out.entries[i * self.r + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &MatrixOperator) -> Result<MatrixOperator> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.try_add(b)?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MatrixOperator) -> Result<MatrixOperator> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> MatrixOperator {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.neg();
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> MatrixOperator {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scale(c);
        }
        out
    }
}

/// Reconstructs the unique matrix operator of order at most `order_bound`
/// whose action agrees with `oracle`, by probing monomial vectors of degree
/// at most `order_bound` and solving triangularly by increasing degree.
///
/// The reconstruction is then re-checked against the oracle on every monomial
/// vector of degree `order_bound + 1`; disagreement means the oracle is not
/// an operator of order `<= order_bound` and is reported as an error.
pub fn recover_coefficients<F>(
    oracle: F,
    r: usize,
    nvars: usize,
    field: FieldSpec,
    order_bound: usize,
) -> Result<MatrixOperator>
where
    F: Fn(&PolyVec) -> Result<PolyVec>,
{
    let mut grids: BTreeMap<MultiIndex, Vec<Vec<Poly>>> = BTreeMap::new();
    for d in 0..=order_bound {
        for index in monomials_of_degree(nvars, d) {
            for j in 0..r {
                let probe = PolyVec::monomial(r, nvars, field, j, index.clone())?;
                let image = oracle(&probe)?;
                if image.rank() != r {
                    return Err(Error::RankMismatch(image.rank(), r));
                }
                // Subtract the contributions of the already-known lower terms:
                // D(x^J e_j) = sum_{I <= J} C(J, I) A_I[:,j] x^(J-I).
                let mut residual: Vec<Poly> = image.entries().to_vec();
                for (known, grid) in &grids {
                    if *known == index || !known.divides(&index) {
                        continue;
                    }
                    let bin = multi_binomial(&index, known, &field)?;
                    if bin.is_zero() {
                        continue;
                    }
                    let shift = index.checked_sub(known).expect("divides");
                    let monomial = Poly::monomial(nvars, shift, bin)?;
                    for (i, res) in residual.iter_mut().enumerate() {
                        let contribution = grid[i][j].try_mul(&monomial)?;
                        *res = res.try_sub(&contribution)?;
                    }
                }
                let grid = grids
                    .entry(index.clone())
                    .or_insert_with(|| vec![vec![Poly::zero(nvars, field); r]; r]);
                for (i, res) in residual.into_iter().enumerate() {
                    grid[i][j] = res;
                }
            }
        }
    }

    let mut op = MatrixOperator::zero(r, nvars, field);
    for i in 0..r {
        for j in 0..r {
            let terms: Vec<(MultiIndex, Poly)> =
                grids.iter().map(|(index, grid)| (index.clone(), grid[i][j].clone())).collect();
            op.set_entry(i, j, ScalarOperator::from_terms(nvars, field, terms)?)?;
        }
    }

    // Residual check one degree above the bound.
    for index in monomials_of_degree(nvars, order_bound + 1) {
        for j in 0..r {
            let probe = PolyVec::monomial(r, nvars, field, j, index.clone())?;
            if oracle(&probe)? != op.apply(&probe)? {
                return Err(Error::NotOrderBounded(order_bound));
            }
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn d1() -> ScalarOperator {
        ScalarOperator::hasse(1, q(), MultiIndex::new(vec![1])).unwrap()
    }

    fn x_squared() -> Poly {
        Poly::monomial(1, MultiIndex::new(vec![2]), q().one()).unwrap()
    }

    #[test]
    fn hasse_apply_examples() {
        // d^[1] x^2 = 2x, d^[2] x^2 = 1.
        assert_eq!(d1().apply(&x_squared()).unwrap(), Poly::var(1, 0, q()).scale(&q().integer(2)));
        let d2 = ScalarOperator::hasse(1, q(), MultiIndex::new(vec![2])).unwrap();
        assert_eq!(d2.apply(&x_squared()).unwrap(), Poly::one(1, q()));
    }

    #[test]
    fn hasse_apply_in_characteristic_two() {
        let f2 = FieldSpec::prime_field(2).unwrap();
        let x2 = Poly::monomial(1, MultiIndex::new(vec![2]), f2.one()).unwrap();
        let d1 = ScalarOperator::hasse(1, f2, MultiIndex::new(vec![1])).unwrap();
        let d2 = ScalarOperator::hasse(1, f2, MultiIndex::new(vec![2])).unwrap();
        assert_eq!(d2.apply(&x2).unwrap(), Poly::one(1, f2), "divided power survives mod 2");
        let twice = d1.apply(&d1.apply(&x2).unwrap()).unwrap();
        assert!(twice.is_zero(), "d^1 twice kills x^2 mod 2");
    }

    #[test]
    fn matrix_apply_example() {
        // D = [[d,0],[1,d]] applied to (x^2, x) gives (2x, x^2 + 1).
        let d = MatrixOperator::new(vec![
            vec![d1(), ScalarOperator::zero(1, q())],
            vec![ScalarOperator::identity(1, q()), d1()],
        ])
        .unwrap();
        let v = PolyVec::new(vec![x_squared(), Poly::var(1, 0, q())]).unwrap();
        let out = d.apply(&v).unwrap();
        assert_eq!(out.entry(0), &Poly::var(1, 0, q()).scale(&q().integer(2)));
        assert_eq!(out.entry(1), &x_squared().try_add(&Poly::one(1, q())).unwrap());
    }

    #[test]
    fn identity_and_zero_behave() {
        let id = MatrixOperator::identity(2, 1, q());
        let v = PolyVec::new(vec![Poly::var(1, 0, q()), Poly::one(1, q())]).unwrap();
        assert_eq!(id.apply(&v).unwrap(), v);
        let z = MatrixOperator::zero(2, 1, q());
        assert!(z.apply(&v).unwrap().is_zero());
        assert_eq!(z.order(), None, "zero operator order is the sentinel");
        assert_eq!(z.degree_shift(), None);
    }

    #[test]
    fn compose_derivative_with_multiplication() {
        // d . (x *) = x d + 1.
        let mul_x = ScalarOperator::multiplication(Poly::var(1, 0, q()));
        let composed = d1().compose(&mul_x).unwrap();
        let expected = ScalarOperator::from_terms(
            1,
            q(),
            vec![
                (MultiIndex::new(vec![1]), Poly::var(1, 0, q())),
                (MultiIndex::new(vec![0]), Poly::one(1, q())),
            ],
        )
        .unwrap();
        assert_eq!(composed, expected);
    }

    #[test]
    fn compose_two_derivatives() {
        // d . d = 2 d^[2]; cross-checked by double application on x^2, x^3.
        let composed = d1().compose(&d1()).unwrap();
        let expected = ScalarOperator::from_terms(
            1,
            q(),
            vec![(MultiIndex::new(vec![2]), Poly::one(1, q()).scale(&q().integer(2)))],
        )
        .unwrap();
        assert_eq!(composed, expected);
        for e in [2u32, 3] {
            let p = Poly::monomial(1, MultiIndex::new(vec![e]), q().one()).unwrap();
            assert_eq!(
                composed.apply(&p).unwrap(),
                d1().apply(&d1().apply(&p).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn compose_with_identity_is_identity() {
        let d = MatrixOperator::new(vec![
            vec![d1(), ScalarOperator::multiplication(Poly::var(1, 0, q()))],
            vec![ScalarOperator::zero(1, q()), d1()],
        ])
        .unwrap();
        let id = MatrixOperator::identity(2, 1, q());
        assert_eq!(d.compose(&id).unwrap(), d);
        assert_eq!(id.compose(&d).unwrap(), d);
    }

    #[test]
    fn classical_conversion_round_trip() {
        // 1 * d^2 (classical) = 2 * d^[2]; first-order operators are fixed.
        let mut terms = BTreeMap::new();
        terms.insert(MultiIndex::new(vec![2]), Poly::one(1, q()));
        let op = classical_to_hasse(1, q(), &terms).unwrap();
        let expected = ScalarOperator::from_terms(
            1,
            q(),
            vec![(MultiIndex::new(vec![2]), Poly::one(1, q()).scale(&q().integer(2)))],
        )
        .unwrap();
        assert_eq!(op, expected);
        assert_eq!(hasse_to_classical(&op).unwrap(), terms);

        let mut first = BTreeMap::new();
        first.insert(MultiIndex::new(vec![1]), Poly::var(1, 0, q()));
        let op1 = classical_to_hasse(1, q(), &first).unwrap();
        assert_eq!(op1.coefficient(&MultiIndex::new(vec![1])), Poly::var(1, 0, q()));
    }

    #[test]
    fn classical_conversion_fails_mod_three() {
        let f3 = FieldSpec::prime_field(3).unwrap();
        let mut terms = BTreeMap::new();
        terms.insert(MultiIndex::new(vec![3]), Poly::one(1, f3));
        let err = classical_to_hasse(1, f3, &terms).unwrap_err();
        assert_eq!(err, Error::FactorialNotInvertible(MultiIndex::new(vec![3]), 3));
    }

    #[test]
    fn degree_shift_bound_with_equality_witness() {
        // D = x^3 d^[1] has shift 2; equality attained on v = x.
        let op = ScalarOperator::from_terms(
            1,
            q(),
            vec![(
                MultiIndex::new(vec![1]),
                Poly::monomial(1, MultiIndex::new(vec![3]), q().one()).unwrap(),
            )],
        )
        .unwrap();
        assert_eq!(op.degree_shift(), Some(2));
        let v = Poly::var(1, 0, q());
        let out = op.apply(&v).unwrap();
        assert_eq!(out.total_degree(), Some(3));
    }

    #[test]
    fn recover_round_trips_simple_operators() {
        // A derivative, a multiplication, and a 2x2 mixed operator.
        let d = MatrixOperator::scalar(d1());
        let rec = recover_coefficients(|v| d.apply(v), 1, 1, q(), 1).unwrap();
        assert_eq!(rec, d);

        let mul = MatrixOperator::scalar(ScalarOperator::multiplication(Poly::var(1, 0, q())));
        let rec = recover_coefficients(|v| mul.apply(v), 1, 1, q(), 0).unwrap();
        assert_eq!(rec, mul);

        let mixed = MatrixOperator::new(vec![
            vec![d1(), ScalarOperator::zero(1, q())],
            vec![ScalarOperator::identity(1, q()), d1()],
        ])
        .unwrap();
        let rec = recover_coefficients(|v| mixed.apply(v), 2, 1, q(), 2).unwrap();
        assert_eq!(rec, mixed);
    }

    #[test]
    fn recover_rejects_higher_order_oracles() {
        let d2 = MatrixOperator::scalar(
            ScalarOperator::hasse(1, q(), MultiIndex::new(vec![2])).unwrap(),
        );
        let err = recover_coefficients(|v| d2.apply(v), 1, 1, q(), 1).unwrap_err();
        assert_eq!(err, Error::NotOrderBounded(1));
    }
}
