//! Exact inverse of the no-jump part of the Liouvillian,
//! `S(R) = −i(H_eff R − R H_eff†)`, via a complex Schur form of `H_eff`.
//!
//! With `H_eff = Q T Q†` the equation `S(R) = X` becomes the triangular
//! Sylvester equation `T Y − Y T† = i Q†XQ` for `Y = Q†RQ` (Bartels–Stewart).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::dense::{gemm, schur, triangular_sylvester, Op};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct SylvesterInverse {
    q: DMatrix<C64>,
    t: DMatrix<C64>,
}

impl SylvesterInverse {
    pub fn new(heff: DMatrix<C64>) -> Result<Self> {
        let (q, t) = schur(heff)?;
        Ok(SylvesterInverse { q, t })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Returns `R` with `−i(H_eff R − R H_eff†) = X`. Where `S` is singular
    /// (an undamped eigenvector of `H_eff`) the result is a regularized
    /// solution, which is all a preconditioner needs.
    pub fn apply(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let one = C64::new(1.0, 0.0);
        let qx = gemm(C64::new(0.0, 1.0), &self.q, Op::Adjoint, x, Op::None);
        let mut y = gemm(one, &qx, Op::None, &self.q, Op::None);
        triangular_sylvester(&self.t, &mut y);
        let qy = gemm(one, &self.q, Op::None, &y, Op::None);
        gemm(one, &qy, Op::None, &self.q, Op::Adjoint)
    }
}
