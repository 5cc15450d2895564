use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::space::CompositeSpace;

/// Dense density matrix on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps `matrix` without normalizing; checks only that it is square.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        Ok(DensityMatrix { matrix })
    }

    /// `|i⟩⟨i|` for basis index `i`.
    pub fn basis_projector(dim: usize, i: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, i)] = C64::new(1.0, 0.0);
        DensityMatrix { matrix: m }
    }

    pub fn vacuum(space: &CompositeSpace) -> Self {
        Self::basis_projector(space.dim(), 0)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(psi: &[C64]) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm_squared();
        DensityMatrix { matrix: &v * v.adjoint() / C64::new(norm, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `(ρ + ρ†)/2`, scaled to unit trace.
    pub fn hermitized_normalized(mut self) -> Result<Self> {
        self.matrix = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let tr = self.matrix.trace().re;
        if !(tr.abs() > f64::MIN_POSITIVE) || !tr.is_finite() {
            return Err(Error::DegenerateSteadyState(format!("trace {tr} cannot be normalized")));
        }
        self.matrix /= C64::new(tr, 0.0);
        Ok(self)
    }

    pub fn hermitian_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
