//! Multi-indices: exponent vectors for monomials and derivative orders.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::Result;

/// An exponent vector over a fixed number of variables.
///
/// Ordered graded-lexicographically: first by total degree, then
/// lexicographically on the exponents. This is the canonical term order used
/// for iteration, printing, and monomial bases throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    /// The zero index (the constant monomial / no derivative).
    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    /// The standard basis index `e_k` (unit exponent in variable `k`).
    pub fn unit(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    /// Total degree `|I|`.
    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch(self.len(), other.len()))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Componentwise difference; `None` when `other` does not divide `self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.len() != other.len() {
            return None;
        }
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `I!` as a big integer.
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            for k in 2..=e as u64 {
                acc *= k;
            }
        }
        acc
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// `C(n, k)` as a big integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k {
        num *= n - j;
        den *= j + 1;
    }
    num / den
}

/// The product of componentwise binomials `prod_k C(J_k, I_k)` as a big
/// integer; zero when some `I_k > J_k`.
pub fn multi_binomial_int(upper: &MultiIndex, lower: &MultiIndex) -> Result<BigInt> {
    if upper.len() != lower.len() {
        return Err(Error::LengthMismatch(upper.len(), lower.len()));
    }
    let mut acc = BigInt::one();
    for (j, i) in upper.exponents().iter().zip(lower.exponents()) {
        if i > j {
            return Ok(BigInt::from(0));
        }
        acc *= binomial(*j, *i);
    }
    Ok(acc)
}

/// `prod_k C(J_k, I_k)` reduced into the target field.
pub fn multi_binomial(upper: &MultiIndex, lower: &MultiIndex, field: &FieldSpec) -> Result<Scalar> {
    Ok(field.from_bigint(&multi_binomial_int(upper, lower)?))
}

/// All multi-indices of total degree exactly `d`, in graded-lex order.
pub fn monomials_of_degree(nvars: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    fill_degree(&mut out, &mut current, 0, d);
    out
}

fn fill_degree(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u32;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for e in 0..=remaining {
        current[pos] = e as u32;
        fill_degree(out, current, pos + 1, remaining - e);
    }
}

/// All multi-indices of total degree at most `n`, sorted graded-lex ascending.
/// There are `C(nvars + n, nvars)` of them.
pub fn monomials_up_to(nvars: usize, n: usize) -> Vec<MultiIndex> {
    if nvars == 0 {
        return vec![MultiIndex(Vec::new())];
    }
    let mut out = Vec::new();
    for d in 0..=n {
        out.extend(monomials_of_degree(nvars, d));
    }
    out
}

/// `C(nvars + n, nvars)`: the number of monomials of degree at most `n`.
pub fn simplex_count(nvars: usize, n: usize) -> usize {
    let mut acc: u128 = 1;
    for k in 1..=nvars {
        acc = acc * (n + k) as u128 / k as u128;
    }
    acc as usize
}
