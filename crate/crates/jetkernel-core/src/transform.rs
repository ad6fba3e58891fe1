//! Group actions on operators: conjugation by invertible polynomial matrices
//! and pullback along polynomial automorphisms of the coordinate ring.
//!
//! Both actions are realized as act-then-reconstruct: the transformed action
//! is evaluated as a black box and re-expressed as an operator through
//! [`recover_coefficients`], so a single correctness path covers both group
//! actions and is testable by round trips.

use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::operator::{recover_coefficients, MatrixOperator};
use crate::poly::{Poly, PolyVec};
use crate::Result;

/// A polynomial automorphism of `k[x_1..x_n]`, stored together with its
/// inverse. Construction validates both composition identities, so a value of
/// this type is always a genuine automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyAutomorphism {
    forward: Vec<Poly>,
    inverse: Vec<Poly>,
}

impl PolyAutomorphism {
    pub fn new(forward: Vec<Poly>, inverse: Vec<Poly>) -> Result<Self> {
        let n = forward.len();
        if n == 0 || inverse.len() != n {
            return Err(Error::DimensionMismatch("automorphism image lists must match".into()));
        }
        let nvars = forward[0].nvars();
        let field = forward[0].field();
        for p in forward.iter().chain(&inverse) {
            if p.nvars() != nvars || nvars != n {
                return Err(Error::NvarsMismatch(p.nvars(), n));
            }
            if p.field() != field {
                return Err(Error::FieldMismatch(field.name(), p.field().name()));
            }
        }
        let g = PolyAutomorphism { forward, inverse };
        for k in 0..n {
            let x = Poly::var(n, k, field);
            if g.forward[k].substitute(&g.inverse)? != x || g.inverse[k].substitute(&g.forward)? != x
            {
                return Err(Error::InverseValidation(format!(
                    "images of x{} do not compose to the identity",
                    k + 1
                )));
            }
        }
        Ok(g)
    }

    /// The identity automorphism.
    pub fn identity(nvars: usize, field: FieldSpec) -> Self {
        let vars: Vec<Poly> = (0..nvars).map(|k| Poly::var(nvars, k, field)).collect();
        PolyAutomorphism { forward: vars.clone(), inverse: vars }
    }

    /// `x_k -> c_k x_k + b_k` with every `c_k` nonzero.
    pub fn affine(scales: &[Scalar], shifts: &[Scalar]) -> Result<Self> {
        if scales.is_empty() || scales.len() != shifts.len() {
            return Err(Error::DimensionMismatch("scales and shifts must match".into()));
        }
        let n = scales.len();
        let field = scales[0].field();
        let mut forward = Vec::with_capacity(n);
        let mut inverse = Vec::with_capacity(n);
        for k in 0..n {
            let c = &scales[k];
            let b = &shifts[k];
            let x = Poly::var(n, k, field);
            forward.push(x.scale(c).try_add(&Poly::constant(n, b.clone()))?);
            let cinv = c.inverse()?;
            inverse.push(
                x.scale(&cinv).try_sub(&Poly::constant(n, b.mul(&cinv)))?,
            );
        }
        PolyAutomorphism::new(forward, inverse)
    }

    /// Triangular (de Jonquieres) automorphism `x_k -> x_k + q_k` where `q_k`
    /// involves only the variables `x_{k+1}..x_n`. The inverse is computed by
    /// back-substitution.
    pub fn triangular(shifts: &[Poly]) -> Result<Self> {
        let n = shifts.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty automorphism".into()));
        }
        let nvars = shifts[0].nvars();
        if nvars != n {
            return Err(Error::NvarsMismatch(nvars, n));
        }
        let field = shifts[0].field();
        for (k, qk) in shifts.iter().enumerate() {
            for (index, _) in qk.terms() {
                if index.exponents()[..=k].iter().any(|&e| e > 0) {
                    return Err(Error::InvalidInput(format!(
                        "shift polynomial {} may only use variables past x{}",
                        k + 1,
                        k + 1
                    )));
                }
            }
        }
        let mut forward = Vec::with_capacity(n);
        for (k, qk) in shifts.iter().enumerate() {
            forward.push(Poly::var(n, k, field).try_add(qk)?);
        }
        // psi_k = x_k - q_k(psi_{k+1}, .., psi_n), solved from the bottom up.
        let mut inverse = vec![Poly::zero(n, field); n];
        for k in (0..n).rev() {
            let mut images: Vec<Poly> = (0..n).map(|t| Poly::var(n, t, field)).collect();
            for t in k + 1..n {
                images[t] = inverse[t].clone();
            }
            inverse[k] = Poly::var(n, k, field).try_sub(&shifts[k].substitute(&images)?)?;
        }
        PolyAutomorphism::new(forward, inverse)
    }

    pub fn nvars(&self) -> usize {
        self.forward.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.forward[0].field()
    }

    pub fn forward_images(&self) -> &[Poly] {
        &self.forward
    }

    pub fn inverse_images(&self) -> &[Poly] {
        &self.inverse
    }

    /// The algebra map `f -> f(phi_1, .., phi_n)`.
    pub fn forward_apply(&self, f: &Poly) -> Result<Poly> {
        f.substitute(&self.forward)
    }

    pub fn inverse_apply(&self, f: &Poly) -> Result<Poly> {
        f.substitute(&self.inverse)
    }

    pub fn forward_apply_vec(&self, v: &PolyVec) -> Result<PolyVec> {
        PolyVec::new(v.entries().iter().map(|f| self.forward_apply(f)).collect::<Result<_>>()?)
    }

    pub fn inverse_apply_vec(&self, v: &PolyVec) -> Result<PolyVec> {
        PolyVec::new(v.entries().iter().map(|f| self.inverse_apply(f)).collect::<Result<_>>()?)
    }

    /// The composite automorphism acting as `self` after `first`:
    /// `compose(first).forward_apply(f) = self.forward_apply(first.forward_apply(f))`.
    pub fn compose(&self, first: &PolyAutomorphism) -> Result<PolyAutomorphism> {
        if self.nvars() != first.nvars() {
            return Err(Error::NvarsMismatch(self.nvars(), first.nvars()));
        }
        let forward = first
            .forward
            .iter()
            .map(|p| p.substitute(&self.forward))
            .collect::<Result<Vec<_>>>()?;
        let inverse = self
            .inverse
            .iter()
            .map(|p| p.substitute(&first.inverse))
            .collect::<Result<Vec<_>>>()?;
        PolyAutomorphism::new(forward, inverse)
    }
}

/// An element of `GL_r(k[x])`: a polynomial matrix stored with its inverse,
/// both validated to multiply to the identity on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvertiblePolyMatrix {
    r: usize,
    nvars: usize,
    field: FieldSpec,
    forward: Vec<Poly>, // row-major r x r
    inverse: Vec<Poly>,
}

impl InvertiblePolyMatrix {
    pub fn new(forward: Vec<Vec<Poly>>, inverse: Vec<Vec<Poly>>) -> Result<Self> {
        let r = forward.len();
        if r == 0
            || forward.iter().any(|row| row.len() != r)
            || inverse.len() != r
            || inverse.iter().any(|row| row.len() != r)
        {
            return Err(Error::DimensionMismatch("matrices must be square of equal size".into()));
        }
        let nvars = forward[0][0].nvars();
        let field = forward[0][0].field();
        for p in forward.iter().chain(&inverse).flatten() {
            if p.nvars() != nvars {
                return Err(Error::NvarsMismatch(p.nvars(), nvars));
            }
            if p.field() != field {
                return Err(Error::FieldMismatch(field.name(), p.field().name()));
            }
        }
        let m = InvertiblePolyMatrix {
            r,
            nvars,
            field,
            forward: forward.into_iter().flatten().collect(),
            inverse: inverse.into_iter().flatten().collect(),
        };
        let ab = poly_mat_mul(&m.forward, &m.inverse, r)?;
        let ba = poly_mat_mul(&m.inverse, &m.forward, r)?;
        if !is_identity(&ab, r, nvars, field) || !is_identity(&ba, r, nvars, field) {
            return Err(Error::InverseValidation("A*B and B*A must both be the identity".into()));
        }
        Ok(m)
    }

    pub fn identity(r: usize, nvars: usize, field: FieldSpec) -> Self {
        let mut forward = vec![Poly::zero(nvars, field); r * r];
        for i in 0..r {
            forward[i * r + i] = Poly::one(nvars, field);
        }
        InvertiblePolyMatrix { r, nvars, field, forward: forward.clone(), inverse: forward }
    }

    /// `I + L` with `L` strictly lower triangular; the inverse is the Neumann
    /// series `sum_k (-L)^k`, finite because `L` is nilpotent.
    pub fn unitriangular(r: usize, nvars: usize, field: FieldSpec, strictly_lower: &[(usize, usize, Poly)]) -> Result<Self> {
        let mut lower = vec![Poly::zero(nvars, field); r * r];
        for (i, j, p) in strictly_lower {
            if *i <= *j || *i >= r {
                return Err(Error::InvalidInput(format!(
                    "entry ({i},{j}) is not strictly lower triangular"
                )));
            }
            if p.nvars() != nvars {
                return Err(Error::NvarsMismatch(p.nvars(), nvars));
            }
            if p.field() != field {
                return Err(Error::FieldMismatch(field.name(), p.field().name()));
            }
            lower[i * r + j] = lower[i * r + j].try_add(p)?;
        }
        let identity = InvertiblePolyMatrix::identity(r, nvars, field).forward;
        let mut forward = identity.clone();
        for (f, l) in forward.iter_mut().zip(&lower) {
            *f = f.try_add(l)?;
        }
        let neg_lower: Vec<Poly> = lower.iter().map(Poly::neg).collect();
        let mut inverse = identity.clone();
        let mut power = identity;
        for _ in 1..r {
            power = poly_mat_mul(&power, &neg_lower, r)?;
            for (inv, p) in inverse.iter_mut().zip(&power) {
                *inv = inv.try_add(p)?;
            }
        }
        let to_rows = |flat: Vec<Poly>| -> Vec<Vec<Poly>> {
            flat.chunks(r).map(|c| c.to_vec()).collect()
        };
        InvertiblePolyMatrix::new(to_rows(forward), to_rows(inverse))
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

    pub fn forward_entry(&self, i: usize, j: usize) -> &Poly {
        &self.forward[i * self.r + j]
    }

    pub fn inverse_entry(&self, i: usize, j: usize) -> &Poly {
        &self.inverse[i * self.r + j]
    }

    /// Max degree over the inverse's entries; bounds the degree growth of
    /// kernel vectors transported through the inverse.
    pub fn inverse_degree(&self) -> usize {
        self.inverse.iter().filter_map(Poly::total_degree).max().unwrap_or(0)
    }

    pub fn apply(&self, v: &PolyVec) -> Result<PolyVec> {
        poly_mat_apply(&self.forward, self.r, v)
    }

    pub fn apply_inverse(&self, v: &PolyVec) -> Result<PolyVec> {
        poly_mat_apply(&self.inverse, self.r, v)
    }

    /// The product `self * other`, with inverse `other^-1 * self^-1`.
    pub fn matrix_product(&self, other: &InvertiblePolyMatrix) -> Result<InvertiblePolyMatrix> {
        if self.r != other.r {
            return Err(Error::RankMismatch(self.r, other.r));
        }
        let forward = poly_mat_mul(&self.forward, &other.forward, self.r)?;
        let inverse = poly_mat_mul(&other.inverse, &self.inverse, self.r)?;
        let to_rows = |flat: Vec<Poly>| -> Vec<Vec<Poly>> {
            flat.chunks(self.r).map(|c| c.to_vec()).collect()
        };
        InvertiblePolyMatrix::new(to_rows(forward), to_rows(inverse))
    }
}

fn poly_mat_mul(a: &[Poly], b: &[Poly], r: usize) -> Result<Vec<Poly>> {
    let nvars = a[0].nvars();
    let field = a[0].field();
    let mut out = vec![Poly::zero(nvars, field); r * r];
    for i in 0..r {
        for j in 0..r {
            let mut acc = Poly::zero(nvars, field);
            for k in 0..r {
                let (x, y) = (&a[i * r + k], &b[k * r + j]);
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.try_add(&x.try_mul(y)?)?;
                }
            }
            out[i * r + j] = acc;
        }
    }
    Ok(out)
}

fn poly_mat_apply(m: &[Poly], r: usize, v: &PolyVec) -> Result<PolyVec> {
    if v.rank() != r {
        return Err(Error::RankMismatch(v.rank(), r));
    }
    let nvars = v.nvars();
    let field = v.field();
    let mut out = Vec::with_capacity(r);
    for i in 0..r {
        let mut acc = Poly::zero(nvars, field);
        for j in 0..r {
            let e = &m[i * r + j];
            if !e.is_zero() && !v.entry(j).is_zero() {
                acc = acc.try_add(&e.try_mul(v.entry(j))?)?;
            }
        }
        out.push(acc);
    }
    PolyVec::new(out)
}

fn is_identity(m: &[Poly], r: usize, nvars: usize, field: FieldSpec) -> bool {
    for i in 0..r {
        for j in 0..r {
            let expected = if i == j { Poly::one(nvars, field) } else { Poly::zero(nvars, field) };
            if m[i * r + j] != expected {
                return false;
            }
        }
    }
    true
}

/// Conjugation by an invertible polynomial matrix: the operator
/// `v -> A^-1 (D (A v))`, re-expressed in normal form. The order of `D` is
/// preserved.
pub fn conjugate_glr(d: &MatrixOperator, a: &InvertiblePolyMatrix) -> Result<MatrixOperator> {
    if d.rank() != a.rank() {
        return Err(Error::RankMismatch(d.rank(), a.rank()));
    }
    if d.nvars() != a.nvars() {
        return Err(Error::NvarsMismatch(d.nvars(), a.nvars()));
    }
    if d.field() != a.field() {
        return Err(Error::FieldMismatch(d.field().name(), a.field().name()));
    }
    let Some(order) = d.order() else {
        return Ok(d.clone());
    };
    recover_coefficients(
        |v| a.apply_inverse(&d.apply(&a.apply(v)?)?),
        d.rank(),
        d.nvars(),
        d.field(),
        order,
    )
}

/// Pullback along a polynomial automorphism: the operator
/// `f -> g^-1(D(g(f)))` where `g(f) = f(phi)`. Requires characteristic zero;
/// the divided-power chain rule in characteristic p is not implemented.
pub fn pullback_automorphism(d: &MatrixOperator, g: &PolyAutomorphism) -> Result<MatrixOperator> {
    if d.nvars() != g.nvars() {
        return Err(Error::NvarsMismatch(d.nvars(), g.nvars()));
    }
    if d.field() != g.field() {
        return Err(Error::FieldMismatch(d.field().name(), g.field().name()));
    }
    let ch = d.field().characteristic();
    if ch != 0 {
        return Err(Error::CharacteristicP(ch));
    }
    let Some(order) = d.order() else {
        return Ok(d.clone());
    };
    recover_coefficients(
        |v| g.inverse_apply_vec(&d.apply(&g.forward_apply_vec(v)?)?),
        d.rank(),
        d.nvars(),
        d.field(),
        order,
    )
}
