//! Dense exact matrices with deterministic elimination.
//!
//! All arithmetic is exact field arithmetic, so ranks, nullspaces, and
//! determinants are certain, not numerical. Elimination pivots on the first
//! nonzero entry in column order, which fixes the echelon form, the pivot
//! trail, and every nullspace basis across runs and platforms.

use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<Scalar>, // row-major
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize, field: FieldSpec) -> Self {
        ExactMatrix { rows, cols, field, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = ExactMatrix::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, field: FieldSpec, f: impl Fn(usize, usize) -> Scalar) -> Result<Self> {
        let mut m = ExactMatrix::zero(rows, cols, field);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                if v.field() != field {
                    return Err(Error::FieldMismatch(field.name(), v.field().name()));
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ExactMatrix {
        let mut m = ExactMatrix::zero(rows.len(), cols.len(), self.field);
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c).clone());
            }
        }
        m
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for j in 0..self.cols {
                    let e = self.get(i, j);
                    if !e.is_zero() && !v[j].is_zero() {
                        acc = acc.add(&e.mul(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Gauss-Jordan reduction with a deterministic pivot trail.
    pub fn reduction(&self) -> Reduction {
        let mut m = self.clone();
        let mut origin: Vec<usize> = (0..m.rows).collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut pivot_product = self.field.one();
        let mut next_row = 0usize;

        for col in 0..m.cols {
            // First nonzero entry at or below the current row.
            let Some(src) = (next_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if src != next_row {
                for j in 0..m.cols {
                    m.data.swap(src * m.cols + j, next_row * m.cols + j);
                }
                origin.swap(src, next_row);
            }
            let pivot = m.get(next_row, col).clone();
            pivot_product = pivot_product.mul(&pivot);
            pivots.push((origin[next_row], col));
            let inv = pivot.inverse().expect("pivot is nonzero");
            for j in col..m.cols {
                let v = m.get(next_row, j).mul(&inv);
                m.set(next_row, j, v);
            }
            for r in 0..m.rows {
                if r == next_row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..m.cols {
                    let v = m.get(r, j).sub(&factor.mul(m.get(next_row, j)));
                    m.set(r, j, v);
                }
            }
            next_row += 1;
            if next_row == m.rows {
                break;
            }
        }

        // Determinant of the (pivot rows x pivot cols) minor of the original
        // matrix: the product of pivot values, corrected by the sign of the
        // permutation that sorts the pivot rows ascending.
        let rows_in_selection_order: Vec<usize> = pivots.iter().map(|&(r, _)| r).collect();
        let mut inversions = 0usize;
        for a in 0..rows_in_selection_order.len() {
            for b in a + 1..rows_in_selection_order.len() {
                if rows_in_selection_order[a] > rows_in_selection_order[b] {
                    inversions += 1;
                }
            }
        }
        let pivot_minor_det =
            if inversions % 2 == 1 { pivot_product.neg() } else { pivot_product };

        Reduction { rref: m, pivots, pivot_minor_det }
    }

    pub fn rank(&self) -> usize {
        self.reduction().pivots.len()
    }

    /// A deterministic echelonized basis of the right nullspace
    /// `{v : Mv = 0}`; its size is `cols - rank`.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        self.reduction().nullspace()
    }

    /// Fraction-free Bareiss determinant. Independent of [`Self::reduction`];
    /// used to cross-check pivot-minor values.
    pub fn determinant_bareiss(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.field.one());
        }
        let mut m = self.clone();
        let mut sign_flip = false;
        let mut prev = self.field.one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let Some(src) = (k + 1..n).find(|&r| !m.get(r, k).is_zero()) else {
                    return Ok(self.field.zero());
                };
                for j in 0..n {
                    m.data.swap(src * n + j, k * n + j);
                }
                sign_flip = !sign_flip;
            }
            let pivot = m.get(k, k).clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = m.get(i, j).mul(&pivot).sub(&m.get(i, k).mul(m.get(k, j)));
                    let v = t.checked_div(&prev).expect("Bareiss division is exact");
                    m.set(i, j, v);
                }
                m.set(i, k, self.field.zero());
            }
            prev = pivot;
        }
        let det = m.get(n - 1, n - 1).clone();
        Ok(if sign_flip { det.neg() } else { det })
    }
}

/// The result of Gauss-Jordan elimination.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// The reduced row echelon form (rows permuted by the pivot search).
    pub rref: ExactMatrix,
    /// `(original_row, column)` per pivot, in selection (column) order.
    pub pivots: Vec<(usize, usize)>,
    /// Determinant of the square submatrix of the original matrix on the
    /// pivot rows (sorted ascending) and pivot columns.
    pub pivot_minor_det: Scalar,
}

impl Reduction {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let field = self.rref.field();
        let cols = self.rref.cols();
        let mut is_pivot_col = vec![false; cols];
        for &(_, c) in &self.pivots {
            is_pivot_col[c] = true;
        }
        let mut basis = Vec::new();
        for free in 0..cols {
            if is_pivot_col[free] {
                continue;
            }
            let mut v = vec![field.zero(); cols];
            v[free] = field.one();
            for (row, &(_, c)) in self.pivots.iter().enumerate() {
                v[c] = self.rref.get(row, free).neg();
            }
            basis.push(v);
        }
        basis
    }
}
