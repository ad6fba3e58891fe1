//! Machine-word linear algebra mod word-sized primes.
//!
//! Two jobs, both in service of the exact layer:
//!
//! 1. Full-column-rank witnessing. For a matrix with (scaled-to-)integer
//!    entries, full column rank of the mod-p image proves full column rank
//!    over the rationals: a nonzero rational nullvector scales to a primitive
//!    integer nullvector, which survives reduction mod p. Rank deficiency mod
//!    p proves nothing and callers must fall back to exact elimination.
//! 2. Exact determinants of integer matrices by Chinese remaindering below a
//!    Hadamard bound, which is far cheaper than big-integer elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::field::{bigint_mod_p, inv_mod, is_prime_u64, mul_mod, Scalar};
use crate::matrix::ExactMatrix;

/// A dense matrix over `F_p` with `p < 2^62`, row-major `u64` storage.
#[derive(Debug, Clone)]
pub(crate) struct ModMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

pub(crate) struct ModElimination {
    pub rank: usize,
    /// Original row index per pivot, in selection (column) order.
    pub pivot_rows: Vec<usize>,
    /// Product of pivots times swap sign: the determinant of the pivot minor
    /// taken in selection order. Equals the matrix determinant when square
    /// and nonsingular.
    pub pivot_minor_det: u64,
}

impl ModMatrix {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    /// In-place forward elimination with the same first-nonzero pivot rule as
    /// the exact layer.
    pub fn eliminate(mut self) -> ModElimination {
        let p = self.p;
        let mut origin: Vec<usize> = (0..self.rows).collect();
        let mut pivot_rows = Vec::new();
        let mut det: u64 = 1 % p;
        let mut sign_flip = false;
        let mut next_row = 0usize;
        for col in 0..self.cols {
            if next_row == self.rows {
                break;
            }
            let Some(src) = (next_row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if src != next_row {
                for j in 0..self.cols {
                    self.data.swap(src * self.cols + j, next_row * self.cols + j);
                }
                origin.swap(src, next_row);
            }
            let pivot = self.get(next_row, col);
            det = mul_mod(det, pivot, p);
            pivot_rows.push(origin[next_row]);
            let inv = inv_mod(pivot, p);
            for r in next_row + 1..self.rows {
                let lead = self.get(r, col);
                if lead == 0 {
                    continue;
                }
                let factor = mul_mod(lead, inv, p);
                // row_r -= factor * row_pivot
                let (pr, rr) = (next_row * self.cols, r * self.cols);
                for j in col..self.cols {
                    let sub = mul_mod(factor, self.data[pr + j], p);
                    let v = self.data[rr + j];
                    self.data[rr + j] = if v >= sub { v - sub } else { v + p - sub };
                }
            }
            next_row += 1;
        }
        let mut inversions = 0usize;
        for a in 0..pivot_rows.len() {
            for b in a + 1..pivot_rows.len() {
                if pivot_rows[a] > pivot_rows[b] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 1 {
            sign_flip = !sign_flip;
        }
        if sign_flip && det != 0 {
            det = p - det;
        }
        ModElimination { rank: pivot_rows.len(), pivot_rows, pivot_minor_det: det }
    }
}

/// An integer matrix obtained by clearing denominators column by column.
/// Column `j` of the original equals column `j` here divided by `scales[j]`.
pub(crate) struct Integerized {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
    pub scales: Vec<BigInt>,
}

impl Integerized {
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    /// Reduces mod `p`. `None` when some column scale vanishes mod `p`, which
    /// would zero a column artificially; callers pick another prime.
    pub fn reduce(&self, p: u64) -> Option<ModMatrix> {
        if self.scales.iter().any(|s| bigint_mod_p(s, p) == 0) {
            return None;
        }
        let data = self.data.iter().map(|a| bigint_mod_p(a, p)).collect();
        Some(ModMatrix { p, rows: self.rows, cols: self.cols, data })
    }
}

/// Clears denominators of a rational matrix columnwise. `None` when the
/// matrix is not over the rationals.
pub(crate) fn integerize_columns(m: &ExactMatrix) -> Option<Integerized> {
    let mut scales = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut lcm = BigInt::one();
        for i in 0..m.rows() {
            let q: &BigRational = m.get(i, j).as_rational()?;
            lcm = lcm.lcm(q.denom());
        }
        scales.push(lcm);
    }
    let mut data = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let q = m.get(i, j).as_rational()?;
            let scaled = q * BigRational::from_integer(scales[j].clone());
            debug_assert!(scaled.is_integer());
            data.push(scaled.to_integer());
        }
    }
    Some(Integerized { rows: m.rows(), cols: m.cols(), data, scales })
}

/// Word-sized primes descending from just below `2^62`.
pub(crate) fn witness_primes() -> impl Iterator<Item = u64> {
    ((1u64 << 62) - 100_000..(1u64 << 62)).rev().filter(|&n| is_prime_u64(n))
}

/// A Hadamard-style bound on `|det|`: the smaller of the row-norm and
/// column-norm products, computed exactly.
pub(crate) fn hadamard_bound(m: &Integerized, rows: &[usize], cols: &[usize]) -> BigInt {
    let by_rows: BigInt = rows
        .iter()
        .map(|&i| {
            let s: BigInt = cols.iter().map(|&j| m.get(i, j) * m.get(i, j)).sum();
            s.sqrt() + 1
        })
        .product();
    let by_cols: BigInt = cols
        .iter()
        .map(|&j| {
            let s: BigInt = rows.iter().map(|&i| m.get(i, j) * m.get(i, j)).sum();
            s.sqrt() + 1
        })
        .product();
    by_rows.min(by_cols)
}

/// Exact determinant of a square integer submatrix by CRT over word-sized
/// primes, balanced-lifted once the modulus clears `2 * hadamard + 1`.
pub(crate) fn crt_determinant(m: &Integerized, rows: &[usize], cols: &[usize]) -> BigInt {
    assert_eq!(rows.len(), cols.len());
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let bound = hadamard_bound(m, rows, cols);
    let target: BigInt = BigInt::from(2) * &bound + 1;
    let mut modulus = BigInt::one();
    let mut residue = BigInt::zero();
    for p in witness_primes() {
        let Some(reduced) = sub_mod_matrix(m, rows, cols, p) else {
            continue;
        };
        let det_p = reduced.eliminate();
        let det_p = if det_p.rank < n { 0 } else { det_p.pivot_minor_det };
        // Incremental CRT: adjust residue to also match det_p mod p.
        let m_mod_p = bigint_mod_p(&modulus, p);
        if m_mod_p == 0 {
            continue;
        }
        let r_mod_p = bigint_mod_p(&residue, p);
        let delta = if det_p >= r_mod_p { det_p - r_mod_p } else { det_p + p - r_mod_p };
        let t = mul_mod(delta, inv_mod(m_mod_p, p), p);
        residue += &modulus * BigInt::from(t);
        modulus *= BigInt::from(p);
        if modulus > target {
            break;
        }
    }
    if &residue * 2 > modulus {
        residue -= &modulus;
    }
    residue
}

fn sub_mod_matrix(m: &Integerized, rows: &[usize], cols: &[usize], p: u64) -> Option<ModMatrix> {
    let mut data = Vec::with_capacity(rows.len() * cols.len());
    for &i in rows {
        for &j in cols {
            data.push(bigint_mod_p(m.get(i, j), p));
        }
    }
    Some(ModMatrix { p, rows: rows.len(), cols: cols.len(), data })
}

/// Tries to certify that `m` (over the rationals) has full column rank, by
/// reducing mod up to three witness primes. On success returns the pivot row
/// trail of the successful reduction, whose pivot minor is provably
/// nonsingular over the rationals as well.
pub(crate) fn full_column_rank_witness(m: &ExactMatrix) -> Option<Vec<usize>> {
    if m.rows() < m.cols() {
        return None;
    }
    let int = integerize_columns(m)?;
    for p in witness_primes().take(3) {
        let Some(reduced) = int.reduce(p) else { continue };
        let elim = reduced.eliminate();
        if elim.rank == m.cols() {
            let mut rows = elim.pivot_rows;
            rows.sort_unstable();
            return Some(rows);
        }
    }
    None
}

/// Exact rational determinant of the square submatrix of `m` on `rows` and
/// all columns, via integerization and CRT.
pub(crate) fn exact_minor_over_q(m: &ExactMatrix, rows: &[usize]) -> Option<Scalar> {
    let int = integerize_columns(m)?;
    let cols: Vec<usize> = (0..m.cols()).collect();
    let det_int = crt_determinant(&int, rows, &cols);
    // det(original) = det(integerized) / prod(column scales)
    let scale: BigInt = int.scales.iter().product();
    Some(Scalar::Rational(BigRational::new(det_int, scale)))
}
