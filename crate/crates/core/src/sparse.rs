//! Complex sparse operators in compressed-row form.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Identifies the Hilbert space an operator or state lives on.
///
/// Coupled bases are keyed by twice the three subsystem spins; the
/// two-subsystem (simplified) basis uses `twice_beta = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisId {
    Coupled {
        twice_a: u32,
        twice_b: u32,
        twice_beta: u32,
    },
    /// Computational basis of `n` qubits.
    Qubits(usize),
    /// Anything else, identified only by its dimension.
    Plain(usize),
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisId::Coupled {
                twice_a,
                twice_b,
                twice_beta,
            } => write!(f, "coupled(2jA={twice_a}, 2jB={twice_b}, 2jβ={twice_beta})"),
            BasisId::Qubits(n) => write!(f, "qubits({n})"),
            BasisId::Plain(d) => write!(f, "plain({d})"),
        }
    }
}

/// Square complex sparse matrix stored row-compressed.
///
/// Duplicate `(row, col)` entries given at construction are summed; entries
/// that are exactly zero afterwards are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    basis: BasisId,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseOp {
    pub fn from_triplets(
        basis: BasisId,
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let mut trip: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = trip.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::Input(format!(
                "entry ({r}, {c}) out of range for dimension {dim}"
            )));
        }
        trip.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(trip.len());
        for (r, c, v) in trip {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != C64::new(0.0, 0.0));

        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = merged.iter().map(|t| t.1).collect();
        let vals = merged.iter().map(|t| t.2).collect();
        Ok(Self {
            basis,
            dim,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn identity(basis: BasisId, dim: usize) -> Self {
        Self {
            basis,
            dim,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            vals: vec![C64::new(1.0, 0.0); dim],
        }
    }

    pub fn diagonal(basis: BasisId, diag: &[C64]) -> Self {
        Self::from_triplets(
            basis,
            diag.len(),
            diag.iter().enumerate().map(|(i, &v)| (i, i, v)),
        )
        .expect("diagonal entries are always in range")
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterates over stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.cols[lo..hi].binary_search(&c) {
            Ok(k) => self.vals[lo + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.basis,
            self.dim,
            self.entries().map(|(r, c, v)| (c, r, v.conj())),
        )
        .expect("adjoint preserves ranges")
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out.vals.retain(|v| *v != C64::new(0.0, 0.0));
        if out.vals.len() != self.vals.len() {
            return Self::from_triplets(self.basis, self.dim, self.entries().map(|(r, c, v)| (r, c, v * s)))
                .expect("in range");
        }
        out
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis || self.dim != other.dim {
            return Err(Error::BasisMismatch(format!(
                "{} (dim {}) vs {} (dim {})",
                self.basis, self.dim, other.basis, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Self::from_triplets(self.basis, self.dim, self.entries().chain(other.entries()))
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut trip = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    trip.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.basis, self.dim, trip)
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.add(&ba.scaled(C64::new(-1.0, 0.0)))
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim, "vector length must match operator dimension");
        (0..self.dim)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn apply_vec(&self, x: &DVector<C64>) -> DVector<C64> {
        DVector::from_vec(self.apply(x.as_slice()))
    }

    /// Dense `self · m`.
    pub fn mul_dense(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, m.ncols());
        self.mul_dense_into(m, &mut out, false);
        out
    }

    /// `out (+)= self · m`, column by column so that both operands are read
    /// contiguously.
    pub fn mul_dense_into(&self, m: &DMatrix<C64>, out: &mut DMatrix<C64>, accumulate: bool) {
        assert_eq!(m.nrows(), self.dim);
        if !accumulate {
            out.fill(C64::new(0.0, 0.0));
        }
        let n = self.dim;
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for j in 0..m.ncols() {
            let col = &src[j * n..(j + 1) * n];
            let ocol = &mut dst[j * n..(j + 1) * n];
            for r in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.vals[k] * col[self.cols[k]];
                }
                ocol[r] += acc;
            }
        }
    }

    /// `out += m · self†`.
    pub fn mul_dense_adjoint_into(&self, m: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        assert_eq!(m.ncols(), self.dim);
        let n = m.nrows();
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        // (m A†)[:, r] = Σ_c m[:, c] conj(A[r, c])
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                let w = self.vals[k].conj();
                let (scol, ocol) = (c * n, r * n);
                for i in 0..n {
                    dst[ocol + i] += w * src[scol + i];
                }
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        let diff = self.add(&other.scaled(C64::new(-1.0, 0.0)))?;
        Ok(diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Re-tags the operator with another basis of the same dimension.
    pub fn with_basis(mut self, basis: BasisId) -> Self {
        self.basis = basis;
        self
    }

    /// Plain-text dump, one `row col re im` line per stored entry with 17
    /// significant digits.
    pub fn write_triplets<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for (r, c, v) in self.entries() {
            writeln!(w, "{r} {c} {:.16e} {:.16e}", v.re, v.im)?;
        }
        Ok(())
    }
}
