//! Sparse multivariate polynomials and polynomial vectors.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::multiindex::{multi_binomial, MultiIndex};
use crate::Result;

/// A sparse multivariate polynomial with exact coefficients.
///
/// Terms are kept in a map ordered graded-lexicographically and never store a
/// zero coefficient, so equality is structural. The zero polynomial has an
/// empty term map and its degree is the distinct sentinel `None`, never `-1`
/// or `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    field: FieldSpec,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize, field: FieldSpec) -> Self {
        Poly { nvars, field, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize, field: FieldSpec) -> Self {
        Poly::constant(nvars, field.one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let field = c_field(&c);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(MultiIndex::zero(nvars), c);
        }
        Poly { nvars, field, terms }
    }

    /// The monomial `c * x^I`.
    pub fn monomial(nvars: usize, index: MultiIndex, c: Scalar) -> Result<Self> {
        if index.len() != nvars {
            return Err(Error::LengthMismatch(index.len(), nvars));
        }
        let field = c_field(&c);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(index, c);
        }
        Ok(Poly { nvars, field, terms })
    }

    /// The variable `x_k` (0-based).
    pub fn var(nvars: usize, k: usize, field: FieldSpec) -> Self {
        Poly::monomial(nvars, MultiIndex::unit(nvars, k), field.one()).expect("unit index fits")
    }

    /// Builds a polynomial from raw terms, dropping zeros and summing
    /// duplicate indices.
    pub fn from_terms(
        nvars: usize,
        field: FieldSpec,
        terms: impl IntoIterator<Item = (MultiIndex, Scalar)>,
    ) -> Result<Self> {
        let mut p = Poly::zero(nvars, field);
        for (index, c) in terms {
            if index.len() != nvars {
                return Err(Error::LengthMismatch(index.len(), nvars));
            }
            if c_field(&c) != field {
                return Err(Error::FieldMismatch(field.name(), c_field(&c).name()));
            }
            p.add_term(index, c);
        }
        Ok(p)
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

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|i| i.total_degree()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient of `x^I` (zero when absent).
    pub fn coeff(&self, index: &MultiIndex) -> Scalar {
        self.terms.get(index).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    fn add_term(&mut self, index: MultiIndex, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    e.insert(s);
                }
            }
        }
    }

    fn check_compatible(&self, other: &Poly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.name(), other.field.name()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        let mut out = Poly::zero(self.nvars, self.field);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let index = i.checked_add(j)?;
                out.add_term(index, a.mul(b));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        assert_eq!(c_field(c), self.field, "scalar from a different field");
        let mut out = Poly::zero(self.nvars, self.field);
        if c.is_zero() {
            return out;
        }
        for (i, a) in &self.terms {
            out.add_term(i.clone(), a.mul(c));
        }
        out
    }

    /// The Hasse (divided-power) derivative `d^[I] self`:
    /// `d^[I] x^J = prod_k C(J_k, I_k) * x^(J-I)`.
    pub fn hasse_derivative(&self, index: &MultiIndex) -> Result<Poly> {
        if index.len() != self.nvars {
            return Err(Error::LengthMismatch(index.len(), self.nvars));
        }
        let mut out = Poly::zero(self.nvars, self.field);
        for (j, c) in &self.terms {
            if let Some(shifted) = j.checked_sub(index) {
                let b = multi_binomial(j, index, &self.field)?;
                out.add_term(shifted, c.mul(&b));
            }
        }
        Ok(out)
    }

    /// Substitutes `images[k]` for variable `x_k`. The images may live in a
    /// different polynomial ring (any variable count, same field).
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.nvars {
            return Err(Error::LengthMismatch(images.len(), self.nvars));
        }
        let (out_nvars, field) = match images.first() {
            Some(p) => (p.nvars(), p.field()),
            None => (0, self.field),
        };
        for im in images {
            if im.nvars() != out_nvars {
                return Err(Error::NvarsMismatch(im.nvars(), out_nvars));
            }
            if im.field() != field {
                return Err(Error::FieldMismatch(im.field().name(), field.name()));
            }
        }
        if field != self.field {
            return Err(Error::FieldMismatch(self.field.name(), field.name()));
        }
        // Cache powers of each image up to the largest exponent that occurs.
        let mut max_exp = vec![0u32; self.nvars];
        for i in self.terms.keys() {
            for (k, &e) in i.exponents().iter().enumerate() {
                max_exp[k] = max_exp[k].max(e);
            }
        }
        let mut powers: Vec<Vec<Poly>> = Vec::with_capacity(self.nvars);
        for (k, im) in images.iter().enumerate() {
            let mut row = vec![Poly::one(out_nvars, field)];
            for e in 1..=max_exp[k] as usize {
                let next = row[e - 1].try_mul(im)?;
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = Poly::zero(out_nvars, field);
        for (i, c) in &self.terms {
            let mut term = Poly::constant(out_nvars, c.clone());
            if term.is_zero() {
                continue;
            }
            for (k, &e) in i.exponents().iter().enumerate() {
                if e > 0 {
                    term = term.try_mul(&powers[k][e as usize])?;
                }
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Coefficientwise reduction into `F_p`. Fails when a denominator is
    /// divisible by `p`, naming the offending term.
    pub fn reduce_mod_p(&self, p: u64) -> Result<Poly> {
        let field = FieldSpec::prime_field(p)?;
        let mut out = Poly::zero(self.nvars, field);
        for (i, c) in &self.terms {
            let r = c.reduce_mod_p(p).map_err(|_| {
                Error::InvalidInput(format!(
                    "coefficient {c} of x^{i} has denominator divisible by {p}"
                ))
            })?;
            out.add_term(i.clone(), r);
        }
        Ok(out)
    }

    /// True when every coefficient is an integer (trivially true over `F_p`).
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| match c {
            Scalar::Rational(q) => q.is_integer(),
            Scalar::ModP { .. } => true,
        })
    }
}

fn c_field(c: &Scalar) -> FieldSpec {
    c.field()
}

impl fmt::Display for Poly {
    /// Prints in descending graded-lex order using the surface syntax of the
    /// operator DSL: `3*x1^2*x2 - 1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (pos, (index, c)) in self.terms.iter().rev().enumerate() {
            let (neg, magnitude) = match c {
                Scalar::Rational(q) if q < &num_rational::BigRational::from_integer(0.into()) => {
                    (true, c.neg())
                }
                _ => (false, c.clone()),
            };
            if pos == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = monomial_string(index);
            if mono.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{magnitude}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn monomial_string(index: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (k, &e) in index.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{}", k + 1)),
            _ => parts.push(format!("x{}^{}", k + 1, e)),
        }
    }
    parts.join("*")
}

/// A length-`r` vector of polynomials sharing one ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVec {
    entries: Vec<Poly>,
}

impl PolyVec {
    pub fn new(entries: Vec<Poly>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("empty polynomial vector".into()));
        }
        let nvars = entries[0].nvars();
        let field = entries[0].field();
        for e in &entries {
            if e.nvars() != nvars {
                return Err(Error::NvarsMismatch(e.nvars(), nvars));
            }
            if e.field() != field {
                return Err(Error::FieldMismatch(e.field().name(), field.name()));
            }
        }
        Ok(PolyVec { entries })
    }

    pub fn zero(r: usize, nvars: usize, field: FieldSpec) -> Self {
        PolyVec { entries: vec![Poly::zero(nvars, field); r] }
    }

    /// The monomial vector `x^I * e_component`.
    pub fn monomial(r: usize, nvars: usize, field: FieldSpec, component: usize, index: MultiIndex) -> Result<Self> {
        let mut v = PolyVec::zero(r, nvars, field);
        v.entries[component] = Poly::monomial(nvars, index, field.one())?;
        Ok(v)
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn nvars(&self) -> usize {
        self.entries[0].nvars()
    }

    pub fn field(&self) -> FieldSpec {
        self.entries[0].field()
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &Poly {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    /// Max entry degree; `None` when the whole vector is zero.
    pub fn total_degree(&self) -> Option<usize> {
        self.entries.iter().filter_map(Poly::total_degree).max()
    }

    pub fn try_add(&self, other: &PolyVec) -> Result<PolyVec> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_>>()?;
        Ok(PolyVec { entries })
    }

    pub fn try_sub(&self, other: &PolyVec) -> Result<PolyVec> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<_>>()?;
        Ok(PolyVec { entries })
    }

    pub fn scale(&self, c: &Scalar) -> PolyVec {
        PolyVec { entries: self.entries.iter().map(|e| e.scale(c)).collect() }
    }
}

impl fmt::Display for PolyVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qvar() -> Poly {
        Poly::var(1, 0, FieldSpec::Rationals)
    }

    #[test]
    fn difference_of_squares() {
        let q = FieldSpec::Rationals;
        let x = qvar();
        let one = Poly::one(1, q);
        let lhs = x.try_add(&one).unwrap().try_mul(&x.try_sub(&one).unwrap()).unwrap();
        let expected = x.try_mul(&x).unwrap().try_sub(&one).unwrap();
        assert_eq!(lhs, expected);
    }

    #[test]
    fn multiplication_by_zero_annihilates() {
        let q = FieldSpec::Rationals;
        let p = qvar().try_add(&Poly::one(1, q)).unwrap();
        let z = p.try_mul(&Poly::zero(1, q)).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
        assert_eq!(z.total_degree(), None, "zero polynomial has the sentinel degree");
    }

    #[test]
    fn freshman_dream_mod_two() {
        let f2 = FieldSpec::prime_field(2).unwrap();
        let x = Poly::var(1, 0, f2);
        let xp1 = x.try_add(&Poly::one(1, f2)).unwrap();
        let square = xp1.try_mul(&xp1).unwrap();
        let expected = x.try_mul(&x).unwrap().try_add(&Poly::one(1, f2)).unwrap();
        assert_eq!(square, expected);
    }

    #[test]
    fn mismatches_are_rejected() {
        let q = FieldSpec::Rationals;
        let f2 = FieldSpec::prime_field(2).unwrap();
        let a = Poly::var(1, 0, q);
        let b = Poly::var(2, 0, q);
        let c = Poly::var(1, 0, f2);
        assert!(matches!(a.try_add(&b), Err(Error::NvarsMismatch(..))));
        assert!(matches!(a.try_mul(&c), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn hasse_derivative_on_monomials() {
        let q = FieldSpec::Rationals;
        let x2 = Poly::monomial(1, MultiIndex::new(vec![2]), q.one()).unwrap();
        let d1 = x2.hasse_derivative(&MultiIndex::new(vec![1])).unwrap();
        assert_eq!(d1, Poly::var(1, 0, q).scale(&q.integer(2)));
        let d2 = x2.hasse_derivative(&MultiIndex::new(vec![2])).unwrap();
        assert_eq!(d2, Poly::one(1, q));
    }

    #[test]
    fn substitution_composes() {
        // f = x^2 + 1, image x -> x + 1 gives x^2 + 2x + 2.
        let q = FieldSpec::Rationals;
        let x = qvar();
        let f = x.try_mul(&x).unwrap().try_add(&Poly::one(1, q)).unwrap();
        let image = x.try_add(&Poly::one(1, q)).unwrap();
        let g = f.substitute(&[image]).unwrap();
        let expected = Poly::from_terms(
            1,
            q,
            vec![
                (MultiIndex::new(vec![2]), q.one()),
                (MultiIndex::new(vec![1]), q.integer(2)),
                (MultiIndex::new(vec![0]), q.integer(2)),
            ],
        )
        .unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn display_round_trips_by_eye() {
        let q = FieldSpec::Rationals;
        let p = Poly::from_terms(
            2,
            q,
            vec![
                (MultiIndex::new(vec![2, 1]), q.integer(3)),
                (MultiIndex::new(vec![0, 0]), q.fraction(-1, 2).unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(p.to_string(), "3*x1^2*x2 - 1/2");
        assert_eq!(Poly::zero(2, q).to_string(), "0");
    }
}
