//! Minimal dense matrix containers for the solver and embeddings.
//!
//! Deliberately tiny: the workloads here are dense symmetric matrices with
//! `n ≤ 64` rows, so a flat `Vec` with row-major indexing beats pulling in a
//! linear-algebra dependency (and keeps everything generic over [`Ring`]).

use crate::scalar::Ring;
use serde::{Deserialize, Serialize};

/// Dense row-major rectangular matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Mat<T> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// Build from a function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    /// Borrow row `i` as a slice.
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Inner product of rows `i` and `j`.
    pub fn row_dot(&self, i: usize, j: usize) -> T {
        let (a, b) = (self.row(i), self.row(j));
        let mut acc = T::zero();
        for k in 0..self.cols {
            acc = acc + a[k].clone() * b[k].clone();
        }
        acc
    }

    /// Squared Euclidean distance between rows `i` and `j`.
    pub fn row_dist_sq(&self, i: usize, j: usize) -> T {
        let (a, b) = (self.row(i), self.row(j));
        let mut acc = T::zero();
        for k in 0..self.cols {
            let d = a[k].clone() - b[k].clone();
            acc = acc + d.clone() * d;
        }
        acc
    }

    /// Flat row-major data.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

/// Dense symmetric matrix; stores the full square for simplicity, with
/// symmetry maintained by [`SymMat::set_sym`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Ring> SymMat<T> {
    pub fn zeros(n: usize) -> Self {
        SymMat { n, data: vec![T::zero(); n * n] }
    }

    /// Build from a function of (i, j); `f` is evaluated once per unordered
    /// pair and mirrored, so the result is symmetric by construction.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = SymMat::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set_sym(i, j, f(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j].clone()
    }

    /// Set entries (i, j) and (j, i).
    pub fn set_sym(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v.clone();
        self.data[j * self.n + i] = v;
    }

    /// Squared distance induced by the Gram matrix:
    /// `d²(i, j) = X_ii + X_jj − 2·X_ij`.
    pub fn gram_dist_sq(&self, i: usize, j: usize) -> T {
        let two = T::one() + T::one();
        self.get(i, i) + self.get(j, j) - two * self.get(i, j)
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            acc = acc + self.get(i, i);
        }
        acc
    }

    /// Flat row-major data.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Mutable flat row-major data (callers must preserve symmetry).
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Map entries into another ring (e.g. `Rational` → `f64`).
    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> SymMat<U> {
        SymMat { n: self.n, data: self.data.iter().map(f).collect() }
    }
}
