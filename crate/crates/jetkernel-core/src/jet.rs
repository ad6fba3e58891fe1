//! Truncated jet algebras, the universal Taylor map, and the bijection
//! between differential operators and linear maps out of jets.
//!
//! The jet algebra of order `N` is `k[x][dx] / (dx)^(N+1)`. The Taylor map
//! sends `f(x)` to `f(x + dx)` truncated past total dx-degree `N`; with the
//! Hasse convention the coefficient of `dx^I` is exactly the divided-power
//! derivative of `f`, with no factorials, in any characteristic. Operators of
//! order `<= N` correspond to `k[x]`-linear maps on jets by reading off their
//! coefficient grid, and their action factors through the Taylor map.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::field::FieldSpec;
use crate::multiindex::MultiIndex;
use crate::operator::{MatrixOperator, ScalarOperator};
use crate::poly::{Poly, PolyVec};
use crate::Result;

/// An element of `k[x][dx] / (dx)^(N+1)`: a finite sum of `p_I(x) * dx^I`
/// with `|I| <= N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetElement {
    nvars: usize,
    field: FieldSpec,
    truncation: usize,
    terms: BTreeMap<MultiIndex, Poly>,
}

impl JetElement {
    pub fn zero(nvars: usize, field: FieldSpec, truncation: usize) -> Self {
        JetElement { nvars, field, truncation, terms: BTreeMap::new() }
    }

    /// Embeds a polynomial as the dx-degree-0 part.
    pub fn from_poly(p: &Poly, truncation: usize) -> Self {
        let mut jet = JetElement::zero(p.nvars(), p.field(), truncation);
        jet.add_term(MultiIndex::zero(p.nvars()), p.clone());
        jet
    }

    pub fn from_terms(
        nvars: usize,
        field: FieldSpec,
        truncation: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Poly)>,
    ) -> Result<Self> {
        let mut jet = JetElement::zero(nvars, field, truncation);
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
            jet.add_term(index, coeff);
        }
        Ok(jet)
    }

    fn add_term(&mut self, index: MultiIndex, coeff: Poly) {
        if coeff.is_zero() || index.total_degree() > self.truncation {
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

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Poly)> {
        self.terms.iter()
    }

    /// The `x`-part coefficient of `dx^I`.
    pub fn coefficient(&self, index: &MultiIndex) -> Poly {
        self.terms.get(index).cloned().unwrap_or_else(|| Poly::zero(self.nvars, self.field))
    }

    fn check_compatible(&self, other: &JetElement) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.name(), other.field.name()));
        }
        if self.truncation != other.truncation {
            return Err(Error::DimensionMismatch(format!(
                "jet truncations differ: {} vs {}",
                self.truncation, other.truncation
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &JetElement) -> Result<JetElement> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> JetElement {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn try_sub(&self, other: &JetElement) -> Result<JetElement> {
        self.try_add(&other.neg())
    }

    /// Product in the truncated algebra: dx-terms past the truncation die.
    pub fn try_mul(&self, other: &JetElement) -> Result<JetElement> {
        self.check_compatible(other)?;
        let mut out = JetElement::zero(self.nvars, self.field, self.truncation);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                if i.total_degree() + j.total_degree() > self.truncation {
                    continue;
                }
                let index = i.checked_add(j)?;
                out.add_term(index, a.try_mul(b)?);
            }
        }
        Ok(out)
    }

    /// Forgets dx-terms above `truncation` (the inverse-system maps between
    /// jet orders).
    pub fn truncate(&self, truncation: usize) -> JetElement {
        let mut out = JetElement::zero(self.nvars, self.field, truncation);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c.clone());
        }
        out
    }

    /// Coefficientwise reduction into `F_p`.
    pub fn reduce_mod_p(&self, p: u64) -> Result<JetElement> {
        let field = FieldSpec::prime_field(p)?;
        let mut out = JetElement::zero(self.nvars, field, self.truncation);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c.reduce_mod_p(p)?);
        }
        Ok(out)
    }
}

/// The truncated Taylor map: `f(x) -> f(x + dx) mod (dx)^(N+1)`.
///
/// Computed by expanding `(x_k + dx_k)` powers in the jet algebra, not by
/// differentiating; the coefficient law `coeff_I = d^[I] f` is a theorem
/// checked in tests, not an implementation shortcut.
pub fn taylor_jet(f: &Poly, truncation: usize) -> Result<JetElement> {
    let nvars = f.nvars();
    let field = f.field();
    // Cache powers of (x_k + dx_k) up to the largest exponent used.
    let mut max_exp = vec![0u32; nvars];
    for (i, _) in f.terms() {
        for (k, &e) in i.exponents().iter().enumerate() {
            max_exp[k] = max_exp[k].max(e);
        }
    }
    let mut powers: Vec<Vec<JetElement>> = Vec::with_capacity(nvars);
    for k in 0..nvars {
        let base = JetElement::from_terms(
            nvars,
            field,
            truncation,
            vec![
                (MultiIndex::zero(nvars), Poly::var(nvars, k, field)),
                (MultiIndex::unit(nvars, k), Poly::one(nvars, field)),
            ],
        )?;
        let mut row = vec![JetElement::from_poly(&Poly::one(nvars, field), truncation)];
        for e in 1..=max_exp[k] as usize {
            let next = row[e - 1].try_mul(&base)?;
            row.push(next);
        }
        powers.push(row);
    }
    let mut out = JetElement::zero(nvars, field, truncation);
    for (i, c) in f.terms() {
        let mut term = JetElement::from_poly(&Poly::constant(nvars, c.clone()), truncation);
        for (k, &e) in i.exponents().iter().enumerate() {
            if e > 0 {
                term = term.try_mul(&powers[k][e as usize])?;
            }
        }
        out = out.try_add(&term)?;
    }
    Ok(out)
}

/// An `O_X`-linear map `J^N(k[x]^r) -> k[x]^r`, stored as the coefficient
/// grid `(I, i, j) -> a_{I,i,j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetLinearMap {
    r: usize,
    nvars: usize,
    field: FieldSpec,
    order: usize,
    /// `images[I][i * r + j]` is the coefficient polynomial `a_{I,i,j}`.
    images: BTreeMap<MultiIndex, Vec<Poly>>,
}

impl JetLinearMap {
    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The image polynomial `a_{I,i,j}` (row `i`, column `j`).
    pub fn image(&self, index: &MultiIndex, i: usize, j: usize) -> Poly {
        self.images
            .get(index)
            .map(|grid| grid[i * self.r + j].clone())
            .unwrap_or_else(|| Poly::zero(self.nvars, self.field))
    }

    /// Evaluates the map on an `r`-vector of jets:
    /// `out_i = sum_j sum_I a_{I,i,j} * coeff_I(jets_j)`.
    pub fn evaluate(&self, jets: &[JetElement]) -> Result<PolyVec> {
        if jets.len() != self.r {
            return Err(Error::RankMismatch(jets.len(), self.r));
        }
        for jet in jets {
            if jet.nvars() != self.nvars {
                return Err(Error::NvarsMismatch(jet.nvars(), self.nvars));
            }
            if jet.field() != self.field {
                return Err(Error::FieldMismatch(self.field.name(), jet.field().name()));
            }
            if jet.truncation() < self.order {
                return Err(Error::DimensionMismatch(format!(
                    "jet truncated at {} cannot feed an order-{} map",
                    jet.truncation(),
                    self.order
                )));
            }
        }
        let mut out = Vec::with_capacity(self.r);
        for i in 0..self.r {
            let mut acc = Poly::zero(self.nvars, self.field);
            for (j, jet) in jets.iter().enumerate() {
                for (index, grid) in &self.images {
                    let a = &grid[i * self.r + j];
                    if a.is_zero() {
                        continue;
                    }
                    let c = jet.coefficient(index);
                    if !c.is_zero() {
                        acc = acc.try_add(&a.try_mul(&c)?)?;
                    }
                }
            }
            out.push(acc);
        }
        PolyVec::new(out)
    }
}

/// The operator-to-jet-map direction of the correspondence: the map sends
/// `dx^I` in column `j` to the coefficient grid `a_{I,i,j}` of `D`.
pub fn op_to_jet_map(d: &MatrixOperator) -> JetLinearMap {
    let r = d.rank();
    let nvars = d.nvars();
    let field = d.field();
    let order = d.order().unwrap_or(0);
    let mut images: BTreeMap<MultiIndex, Vec<Poly>> = BTreeMap::new();
    for i in 0..r {
        for j in 0..r {
            for (index, coeff) in d.entry(i, j).terms() {
                let grid = images
                    .entry(index.clone())
                    .or_insert_with(|| vec![Poly::zero(nvars, field); r * r]);
                grid[i * r + j] = coeff.clone();
            }
        }
    }
    JetLinearMap { r, nvars, field, order, images }
}

/// The jet-map-to-operator direction: inverse of [`op_to_jet_map`].
pub fn jet_map_to_op(map: &JetLinearMap) -> Result<MatrixOperator> {
    let mut op = MatrixOperator::zero(map.r, map.nvars, map.field);
    for i in 0..map.r {
        for j in 0..map.r {
            let terms: Vec<(MultiIndex, Poly)> = map
                .images
                .iter()
                .map(|(index, grid)| (index.clone(), grid[i * map.r + j].clone()))
                .collect();
            op.set_entry(i, j, ScalarOperator::from_terms(map.nvars, map.field, terms)?)?;
        }
    }
    Ok(op)
}

/// Presentation data for the jet algebra of a quotient `k[x]/(f_j)`: each
/// relator contributes the pair `(f_j, d1 f_j)` with
/// `f_j + d1 f_j = f_j(x + dx)` in the truncated jet algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetPresentation {
    pub nvars: usize,
    pub truncation: usize,
    pub relation_generators: Vec<(Poly, JetElement)>,
}

pub fn jet_presentation(relators: &[Poly], truncation: usize) -> Result<JetPresentation> {
    let mut generators = Vec::with_capacity(relators.len());
    let mut nvars = 0;
    for f in relators {
        nvars = f.nvars();
        let d1 = taylor_jet(f, truncation)?.try_sub(&JetElement::from_poly(f, truncation))?;
        generators.push((f.clone(), d1));
    }
    Ok(JetPresentation { nvars, truncation, relation_generators: generators })
}

/// Per-relator outcome of the base-change comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseChangeReport {
    pub p: u64,
    pub truncation: usize,
    pub per_relator: Vec<bool>,
}

impl BaseChangeReport {
    pub fn all_equal(&self) -> bool {
        self.per_relator.iter().all(|&b| b)
    }
}

/// Compares two routes to the presentation of `F_p[x]/(relators)`' jet
/// algebra: computing over the rationals and reducing mod `p`, versus
/// computing natively over `F_p`. Relators must have integer coefficients.
pub fn base_change_check(relators: &[Poly], truncation: usize, p: u64) -> Result<BaseChangeReport> {
    FieldSpec::prime_field(p)?;
    for f in relators {
        if f.field() != FieldSpec::Rationals {
            return Err(Error::FieldMismatch("rationals".into(), f.field().name()));
        }
        if !f.has_integer_coefficients() {
            return Err(Error::NonIntegerCoefficient(f.to_string()));
        }
    }
    let over_q = jet_presentation(relators, truncation)?;
    let reduced_relators: Vec<Poly> =
        relators.iter().map(|f| f.reduce_mod_p(p)).collect::<Result<_>>()?;
    let native = jet_presentation(&reduced_relators, truncation)?;

    let mut per_relator = Vec::with_capacity(relators.len());
    for ((f_q, d1_q), (f_p, d1_p)) in
        over_q.relation_generators.iter().zip(&native.relation_generators)
    {
        let equal = f_q.reduce_mod_p(p)? == *f_p && d1_q.reduce_mod_p(p)? == *d1_p;
        per_relator.push(equal);
    }
    Ok(BaseChangeReport { p, truncation, per_relator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::ScalarOperator;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn x() -> Poly {
        Poly::var(1, 0, q())
    }

    fn x_pow(e: u32) -> Poly {
        Poly::monomial(1, MultiIndex::new(vec![e]), q().one()).unwrap()
    }

    #[test]
    fn taylor_jet_of_x_squared() {
        // x^2 -> x^2 + 2x dx + dx^2, truncating as N shrinks.
        let full = taylor_jet(&x_pow(2), 2).unwrap();
        assert_eq!(full.coefficient(&MultiIndex::new(vec![0])), x_pow(2));
        assert_eq!(full.coefficient(&MultiIndex::new(vec![1])), x().scale(&q().integer(2)));
        assert_eq!(full.coefficient(&MultiIndex::new(vec![2])), Poly::one(1, q()));

        let first = taylor_jet(&x_pow(2), 1).unwrap();
        assert_eq!(first.coefficient(&MultiIndex::new(vec![1])), x().scale(&q().integer(2)));
        assert!(first.coefficient(&MultiIndex::new(vec![2])).is_zero());

        let zeroth = taylor_jet(&x_pow(2), 0).unwrap();
        assert_eq!(zeroth, JetElement::from_poly(&x_pow(2), 0));
    }

    #[test]
    fn taylor_coefficients_are_hasse_derivatives() {
        // Dual route: the jet side multiplies (x + dx) powers, the operator
        // side differentiates.
        let f = Poly::from_terms(
            2,
            q(),
            vec![
                (MultiIndex::new(vec![2, 1]), q().integer(3)),
                (MultiIndex::new(vec![0, 2]), q().integer(-1)),
                (MultiIndex::new(vec![1, 0]), q().integer(7)),
            ],
        )
        .unwrap();
        let n = 3;
        let jet = taylor_jet(&f, n).unwrap();
        for index in crate::multiindex::monomials_up_to(2, n) {
            assert_eq!(
                jet.coefficient(&index),
                f.hasse_derivative(&index).unwrap(),
                "dx^{index} coefficient"
            );
        }
    }

    #[test]
    fn taylor_jet_is_a_ring_homomorphism() {
        let f = x_pow(2).try_add(&Poly::one(1, q())).unwrap();
        let g = x_pow(3).try_sub(&x()).unwrap();
        let n = 3;
        let lhs = taylor_jet(&f.try_mul(&g).unwrap(), n).unwrap();
        let rhs = taylor_jet(&f, n).unwrap().try_mul(&taylor_jet(&g, n).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn truncation_compatibility() {
        let f = x_pow(4);
        let bigger = taylor_jet(&f, 3).unwrap();
        let smaller = taylor_jet(&f, 2).unwrap();
        assert_eq!(bigger.truncate(2), smaller);
    }

    #[test]
    fn jet_map_of_derivative() {
        // D = d^[1] maps dx -> 1, 1 -> 0.
        let d = MatrixOperator::scalar(
            ScalarOperator::hasse(1, q(), MultiIndex::new(vec![1])).unwrap(),
        );
        let map = op_to_jet_map(&d);
        assert_eq!(map.image(&MultiIndex::new(vec![1]), 0, 0), Poly::one(1, q()));
        assert!(map.image(&MultiIndex::new(vec![0]), 0, 0).is_zero());

        // Multiplication by p maps 1 -> p and all dx^I -> 0.
        let p = x_pow(2).try_add(&Poly::one(1, q())).unwrap();
        let mul = MatrixOperator::scalar(ScalarOperator::multiplication(p.clone()));
        let map = op_to_jet_map(&mul);
        assert_eq!(map.image(&MultiIndex::new(vec![0]), 0, 0), p);
        assert!(map.image(&MultiIndex::new(vec![1]), 0, 0).is_zero());

        // x * d^[2] maps dx^2 -> x and everything else to 0.
        let op = MatrixOperator::scalar(
            ScalarOperator::from_terms(1, q(), vec![(MultiIndex::new(vec![2]), x())]).unwrap(),
        );
        let map = op_to_jet_map(&op);
        assert_eq!(map.image(&MultiIndex::new(vec![2]), 0, 0), x());
        assert!(map.image(&MultiIndex::new(vec![1]), 0, 0).is_zero());
    }

    #[test]
    fn jet_map_round_trip_and_inverse_examples() {
        let d = MatrixOperator::new(vec![
            vec![
                ScalarOperator::hasse(1, q(), MultiIndex::new(vec![1])).unwrap(),
                ScalarOperator::multiplication(x()),
            ],
            vec![
                ScalarOperator::zero(1, q()),
                ScalarOperator::identity(1, q()),
            ],
        ])
        .unwrap();
        assert_eq!(jet_map_to_op(&op_to_jet_map(&d)).unwrap(), d);

        // T = (dx -> x) is x * d^[1].
        let t = op_to_jet_map(&MatrixOperator::scalar(
            ScalarOperator::from_terms(1, q(), vec![(MultiIndex::new(vec![1]), x())]).unwrap(),
        ));
        let op = jet_map_to_op(&t).unwrap();
        for e in 0..4u32 {
            let probe = PolyVec::new(vec![x_pow(e)]).unwrap();
            let via_jet = t.evaluate(&[taylor_jet(&x_pow(e), 1).unwrap()]).unwrap();
            assert_eq!(op.apply(&probe).unwrap(), via_jet);
        }
    }

    #[test]
    fn factorization_identity_on_a_mixed_operator() {
        // D v = (jet map of D)(taylor jets of v), exactly.
        let d = MatrixOperator::new(vec![
            vec![
                ScalarOperator::from_terms(2, q(), vec![(
                    MultiIndex::new(vec![1, 1]),
                    Poly::var(2, 1, q()),
                )])
                .unwrap(),
                ScalarOperator::multiplication(Poly::var(2, 0, q())),
            ],
            vec![
                ScalarOperator::hasse(2, q(), MultiIndex::new(vec![0, 2])).unwrap(),
                ScalarOperator::identity(2, q()),
            ],
        ])
        .unwrap();
        let n = d.order().unwrap();
        let map = op_to_jet_map(&d);
        let v = PolyVec::new(vec![
            Poly::from_terms(
                2,
                q(),
                vec![
                    (MultiIndex::new(vec![3, 1]), q().integer(2)),
                    (MultiIndex::new(vec![0, 2]), q().integer(-5)),
                ],
            )
            .unwrap(),
            Poly::var(2, 1, q()),
        ])
        .unwrap();
        let jets: Vec<JetElement> =
            v.entries().iter().map(|f| taylor_jet(f, n).unwrap()).collect();
        assert_eq!(d.apply(&v).unwrap(), map.evaluate(&jets).unwrap());
    }

    #[test]
    fn presentation_examples() {
        // Relator x^2 at N=2 contributes 2x dx + dx^2.
        let pres = jet_presentation(&[x_pow(2)], 2).unwrap();
        let (_, d1) = &pres.relation_generators[0];
        assert_eq!(d1.coefficient(&MultiIndex::new(vec![1])), x().scale(&q().integer(2)));
        assert_eq!(d1.coefficient(&MultiIndex::new(vec![2])), Poly::one(1, q()));
        assert!(d1.coefficient(&MultiIndex::new(vec![0])).is_zero());

        // Relator x - c has d1 = dx.
        let f = x().try_sub(&Poly::constant(1, q().integer(4))).unwrap();
        let pres = jet_presentation(&[f], 1).unwrap();
        assert_eq!(pres.relation_generators[0].1.coefficient(&MultiIndex::new(vec![1])), Poly::one(1, q()));

        // Relator x^3 - x at N=1 has d1 = (3x^2 - 1) dx.
        let f = x_pow(3).try_sub(&x()).unwrap();
        let pres = jet_presentation(&[f.clone()], 1).unwrap();
        let expected = f.hasse_derivative(&MultiIndex::new(vec![1])).unwrap();
        assert_eq!(pres.relation_generators[0].1.coefficient(&MultiIndex::new(vec![1])), expected);
    }

    #[test]
    fn base_change_examples() {
        // {x^2 - 2} at N=2, p=5.
        let f = x_pow(2).try_sub(&Poly::constant(1, q().integer(2))).unwrap();
        let report = base_change_check(&[f], 2, 5).unwrap();
        assert!(report.all_equal());

        // Free algebra: no relators, trivially equal.
        let report = base_change_check(&[], 3, 2).unwrap();
        assert!(report.all_equal());
        assert!(report.per_relator.is_empty());

        // {x^3 - x} at N=1, p=3: the d1 part reduces to (-1) dx = 2 dx.
        let f = x_pow(3).try_sub(&x()).unwrap();
        let report = base_change_check(&[f.clone()], 1, 3).unwrap();
        assert!(report.all_equal());
        let f3 = FieldSpec::prime_field(3).unwrap();
        let native = jet_presentation(&[f.reduce_mod_p(3).unwrap()], 1).unwrap();
        assert_eq!(
            native.relation_generators[0].1.coefficient(&MultiIndex::new(vec![1])),
            Poly::constant(1, f3.integer(2))
        );
    }

    #[test]
    fn base_change_rejects_bad_inputs() {
        assert!(base_change_check(&[x()], 1, 4).is_err(), "4 is not prime");
        let half = Poly::constant(1, q().fraction(1, 2).unwrap());
        assert!(matches!(
            base_change_check(&[half], 1, 5),
            Err(Error::NonIntegerCoefficient(_))
        ));
    }
}
