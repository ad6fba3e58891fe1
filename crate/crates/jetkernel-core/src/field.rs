//! Exact coefficient fields: arbitrary-precision rationals and prime fields.
//!
//! A [`Scalar`] carries its field with it, so values from different fields
//! can never be combined silently. Arithmetic on mismatched fields is a
//! programming error and panics; modules that accept user input validate
//! fields up front and return [`Error`](crate::Error) instead.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::Result;

/// Which exact field coefficients live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// The rational numbers, arbitrary precision.
    Rationals,
    /// Integers mod `p`, `p` prime.
    PrimeField(u64),
}

impl FieldSpec {
    /// Constructs a prime field, rejecting composite moduli.
    pub fn prime_field(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// 0 for the rationals, `p` for a prime field.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::ModP { value: 0, p: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::one()),
            FieldSpec::PrimeField(p) => Scalar::ModP { value: 1 % *p, p: *p },
        }
    }

    /// Embeds an integer into the field.
    pub fn integer(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    /// Embeds an arbitrary-precision integer into the field.
    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(n.clone())),
            FieldSpec::PrimeField(p) => Scalar::ModP { value: bigint_mod_p(n, *p), p: *p },
        }
    }

    /// Embeds `num/den`; fails on `den = 0` or a denominator divisible by `p`.
    pub fn fraction(&self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.from_bigint(&BigInt::from(num));
        let d = self.from_bigint(&BigInt::from(den));
        n.checked_div(&d)
    }

    /// Canonical short name, e.g. `rationals` or `F5`.
    pub fn name(&self) -> String {
        match self {
            FieldSpec::Rationals => "rationals".to_string(),
            FieldSpec::PrimeField(p) => format!("F{p}"),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// An element of an exact coefficient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    ModP { value: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::ModP { p, .. } => FieldSpec::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::ModP { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::ModP { value, p } => *value == 1 % *p,
        }
    }

    fn expect_same_field(&self, other: &Scalar) {
        assert_eq!(
            self.field(),
            other.field(),
            "scalar arithmetic across fields ({} vs {})",
            self.field(),
            other.field()
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.expect_same_field(other);
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::ModP { value: a, p }, Scalar::ModP { value: b, .. }) => {
                Scalar::ModP { value: add_mod(*a, *b, *p), p: *p }
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::ModP { value, p } => {
                Scalar::ModP { value: if *value == 0 { 0 } else { p - value }, p: *p }
            }
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.expect_same_field(other);
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::ModP { value: a, p }, Scalar::ModP { value: b, .. }) => {
                Scalar::ModP { value: mul_mod(*a, *b, *p), p: *p }
            }
            _ => unreachable!(),
        }
    }

    /// Multiplicative inverse; fails on zero.
    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::ModP { value, p } => Scalar::ModP { value: inv_mod(*value, *p), p: *p },
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inverse()?))
    }

    /// The underlying rational, when the scalar lives over the rationals.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::ModP { .. } => None,
        }
    }

    /// The canonical residue in `0..p`, when the scalar lives over a prime field.
    pub fn as_residue(&self) -> Option<u64> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::ModP { value, .. } => Some(*value),
        }
    }

    /// Reduces a rational scalar into `F_p`; fails when the denominator is
    /// divisible by `p`. Prime-field scalars must already live mod `p`.
    pub fn reduce_mod_p(&self, p: u64) -> Result<Scalar> {
        match self {
            Scalar::Rational(q) => {
                let den = bigint_mod_p(q.denom(), p);
                if den == 0 {
                    return Err(Error::DivisionByZero);
                }
                let num = bigint_mod_p(q.numer(), p);
                Ok(Scalar::ModP { value: mul_mod(num, inv_mod(den, p), p), p })
            }
            Scalar::ModP { p: q, .. } if *q == p => Ok(self.clone()),
            Scalar::ModP { p: q, .. } => {
                Err(Error::FieldMismatch(format!("F{q}"), format!("F{p}")))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::ModP { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Canonical residue of a big integer mod `p`.
pub fn bigint_mod_p(n: &BigInt, p: u64) -> u64 {
    let m = (n % BigInt::from(p)).magnitude().to_u64_digits();
    let r = m.first().copied().unwrap_or(0);
    if n.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = (a as u128 + b as u128) % p as u128;
    s as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse mod a prime, via Fermat.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    // This witness set decides primality for every n < 3.3 * 10^24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
