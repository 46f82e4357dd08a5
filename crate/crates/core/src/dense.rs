//! Row-major dense matrices and an LU solver.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = Aᵀ x`.
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            axpy(xi, self.row(i), &mut y);
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| xi * dot(self.row(i), x))
            .sum()
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// LU factorisation with partial pivoting; consumes the matrix.
    pub fn into_lu(self) -> Result<LuFactors> {
        LuFactors::factor(self)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4 * 4;
    for k in (0..chunks).step_by(4) {
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in chunks..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`.
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

const PANEL: usize = 64;

/// `PA = LU` with unit-diagonal `L` stored below the diagonal.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Right-looking blocked elimination. Each panel of `PANEL` columns is
    /// factored unblocked, then the trailing block is updated with a
    /// rank-`PANEL` product so every trailing row is streamed once per panel.
    pub fn factor(mut a: DenseMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::DimensionMismatch {
                expected: a.rows,
                actual: a.cols,
            });
        }
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = scale * f64::EPSILON * n as f64;

        for kb in (0..n).step_by(PANEL) {
            let kend = (kb + PANEL).min(n);

            for k in kb..kend {
                let mut p = k;
                let mut best = a.get(k, k).abs();
                for i in k + 1..n {
                    let v = a.get(i, k).abs();
                    if v > best {
                        best = v;
                        p = i;
                    }
                }
                if !(best > tiny) {
                    return Err(Error::Singular(k));
                }
                if p != k {
                    swap_rows(&mut a, p, k);
                    perm.swap(p, k);
                }
                let pivot = a.get(k, k);
                for i in k + 1..n {
                    let (upper, lower) = a.data.split_at_mut(i * n);
                    let row_k = &upper[k * n..k * n + n];
                    let row_i = &mut lower[..n];
                    let l = row_i[k] / pivot;
                    row_i[k] = l;
                    if l != 0.0 {
                        axpy(-l, &row_k[k + 1..kend], &mut row_i[k + 1..kend]);
                    }
                }
            }

            if kend == n {
                break;
            }

            // U12 = L11⁻¹ A12
            for k in kb..kend {
                for i in k + 1..kend {
                    let (upper, lower) = a.data.split_at_mut(i * n);
                    let row_k = &upper[k * n..k * n + n];
                    let row_i = &mut lower[..n];
                    let l = row_i[k];
                    if l != 0.0 {
                        axpy(-l, &row_k[kend..], &mut row_i[kend..]);
                    }
                }
            }

            // A22 -= L21 U12
            let (top, bottom) = a.data.split_at_mut(kend * n);
            let panel_rows = &top[kb * n..];
            for row_i in bottom.chunks_exact_mut(n) {
                let (lpart, rest) = row_i.split_at_mut(kend);
                let l = &lpart[kb..kend];
                let mut k = 0;
                while k + 4 <= l.len() {
                    let u0 = &panel_rows[k * n + kend..(k + 1) * n];
                    let u1 = &panel_rows[(k + 1) * n + kend..(k + 2) * n];
                    let u2 = &panel_rows[(k + 2) * n + kend..(k + 3) * n];
                    let u3 = &panel_rows[(k + 3) * n + kend..(k + 4) * n];
                    let (l0, l1, l2, l3) = (l[k], l[k + 1], l[k + 2], l[k + 3]);
                    for j in 0..rest.len() {
                        rest[j] -= l0 * u0[j] + l1 * u1[j] + l2 * u2[j] + l3 * u3[j];
                    }
                    k += 4;
                }
                while k < l.len() {
                    axpy(-l[k], &panel_rows[k * n + kend..(k + 1) * n], rest);
                    k += 1;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: b.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            x[i] -= dot(&row[..i], &x[..i]);
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = dot(&row[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }
}

fn swap_rows(a: &mut DenseMatrix, p: usize, k: usize) {
    let n = a.cols;
    let (lo, hi) = if p < k { (p, k) } else { (k, p) };
    let (first, second) = a.data.split_at_mut(hi * n);
    first[lo * n..lo * n + n].swap_with_slice(&mut second[..n]);
}
