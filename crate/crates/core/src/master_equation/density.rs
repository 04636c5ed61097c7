use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::sparse::{BasisId, SparseOp};

/// Hermitian, unit-trace state over a declared basis, stored dense.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    basis: BasisId,
    data: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix without normalising it.
    pub fn from_matrix(basis: BasisId, data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::Input(format!(
                "density matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { basis, data })
    }

    /// `|ψ⟩⟨ψ|` with ψ normalised first.
    pub fn from_pure(basis: BasisId, psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Input("zero state vector".into()));
        }
        let v = DVector::from_iterator(psi.len(), psi.iter().map(|a| a / norm));
        Ok(Self {
            basis,
            data: &v * v.adjoint(),
        })
    }

    /// `|i⟩⟨i|`.
    pub fn basis_state(basis: BasisId, dim: usize, i: usize) -> Self {
        let mut data = DMatrix::zeros(dim, dim);
        data[(i, i)] = C64::new(1.0, 0.0);
        Self { basis, data }
    }

    pub fn maximally_mixed(basis: BasisId, dim: usize) -> Self {
        Self {
            basis,
            data: DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        }
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> Vec<f64> {
        self.data.diagonal().iter().map(|v| v.re).collect()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `Tr(ρ O)` for a sparse operator on the same basis.
    pub fn expectation(&self, op: &SparseOp) -> Result<C64> {
        self.check_basis(op.basis(), op.dim())?;
        // Tr(ρ O) = Σ_{r,c} O[r,c] ρ[c,r]
        Ok(op.entries().map(|(r, c, v)| v * self.data[(c, r)]).sum())
    }

    /// `⟨ψ|ρ|ψ⟩` with ψ normalised.
    pub fn fidelity_with_pure(&self, psi: &[C64]) -> Result<f64> {
        if psi.len() != self.dim() {
            return Err(Error::BasisMismatch(format!(
                "state of length {} vs density matrix of dimension {}",
                psi.len(),
                self.dim()
            )));
        }
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let v = DVector::from_column_slice(psi);
        let f = (v.adjoint() * &self.data * &v)[(0, 0)].re / norm2;
        Ok(f.clamp(0.0, 1.0))
    }

    pub(crate) fn check_basis(&self, basis: BasisId, dim: usize) -> Result<()> {
        if basis != self.basis || dim != self.dim() {
            return Err(Error::BasisMismatch(format!(
                "state on {} (dim {}) vs operator on {} (dim {})",
                self.basis,
                self.dim(),
                basis,
                dim
            )));
        }
        Ok(())
    }

    /// Checks that this state lives on `basis`.
    pub fn ensure_basis(&self, basis: &crate::spin_algebra::CoupledBasis) -> Result<()> {
        self.check_basis(basis.id(), basis.dim())
    }

    /// `U ρ U†` for a sparse unitary.
    pub fn conjugate_by(&self, u: &SparseOp) -> Result<Self> {
        self.check_basis(u.basis(), u.dim())?;
        let left = u.mul_dense(&self.data);
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        u.mul_dense_adjoint_into(&left, &mut out);
        Ok(Self {
            basis: self.basis,
            data: out,
        })
    }

    /// Keeps only the rows/columns in `keep`, renormalising the trace. Returns
    /// the Born probability `Σ_{i ∈ keep} ρ_ii` and the conditional state.
    pub fn project_onto(&self, keep: &[usize]) -> Result<(f64, DensityMatrix)> {
        let n = self.dim();
        let mut mask = vec![false; n];
        for &i in keep {
            if i >= n {
                return Err(Error::Input(format!("index {i} outside dimension {n}")));
            }
            mask[i] = true;
        }
        let p: f64 = keep.iter().map(|&i| self.data[(i, i)].re).sum();
        if p <= 1e-300 {
            return Err(Error::ZeroProbability(format!("{} basis states", keep.len())));
        }
        let data = DMatrix::from_fn(n, n, |i, j| {
            if mask[i] && mask[j] {
                self.data[(i, j)] / p
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok((p, DensityMatrix { basis: self.basis, data }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fidelity_limits() {
        let b = BasisId::Qubits(2);
        let mixed = DensityMatrix::maximally_mixed(b, 4);
        let psi = [C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(-0.5, 0.0), C64::new(0.5, 0.0)];
        assert!((mixed.fidelity_with_pure(&psi).unwrap() - 0.25).abs() < 1e-15);
        let pure = DensityMatrix::from_pure(b, &psi).unwrap();
        assert!((pure.fidelity_with_pure(&psi).unwrap() - 1.0).abs() < 1e-14);
        let orth = [C64::new(0.5, 0.0), C64::new(0.0, -0.5), C64::new(0.5, 0.0), C64::new(0.5, 0.0)];
        assert!(pure.fidelity_with_pure(&orth).unwrap() < 1e-14);
        assert!(pure.fidelity_with_pure(&psi[..2]).is_err());
    }

    #[test]
    fn projection_errors_on_empty_branch() {
        let rho = DensityMatrix::basis_state(BasisId::Plain(3), 3, 0);
        assert!(matches!(rho.project_onto(&[1, 2]), Err(Error::ZeroProbability(_))));
        let (p, post) = rho.project_onto(&[0]).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(post, rho);
    }
}
