//! Thin safe wrappers over the BLAS/LAPACK routines the solver needs.
//! All matrices are square, column-major `DMatrix<C64>`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    None,
    Adjoint,
}

impl Op {
    fn code(self) -> u8 {
        match self {
            Op::None => b'N',
            Op::Adjoint => b'C',
        }
    }
}

fn order(m: &DMatrix<C64>) -> i32 {
    assert_eq!(m.nrows(), m.ncols(), "square matrix required");
    i32::try_from(m.nrows()).expect("matrix order fits in i32")
}

/// `alpha · op(a) · op(b)`
pub fn gemm(alpha: C64, a: &DMatrix<C64>, op_a: Op, b: &DMatrix<C64>, op_b: Op) -> DMatrix<C64> {
    let n = order(a);
    assert_eq!(n, order(b), "gemm dimension mismatch");
    let mut c = DMatrix::zeros(a.nrows(), a.nrows());
    // SAFETY: all three buffers are n×n column-major with leading dimension n.
    unsafe {
        blas::zgemm(
            op_a.code(),
            op_b.code(),
            n,
            n,
            n,
            alpha,
            a.as_slice(),
            n,
            b.as_slice(),
            n,
            C64::new(0.0, 0.0),
            c.as_mut_slice(),
            n,
        );
    }
    c
}

/// Complex Schur form `a = Q T Q†`; returns `(Q, T)`.
pub fn schur(mut a: DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let n = order(&a);
    let nu = a.nrows();
    let mut q = DMatrix::zeros(nu, nu);
    let mut w = vec![C64::new(0.0, 0.0); nu];
    let mut rwork = vec![0.0; nu];
    let mut bwork = vec![0i32; nu];
    let (mut sdim, mut info) = (0, 0);
    let mut query = [C64::new(0.0, 0.0)];
    // SAFETY: workspace query; buffers sized per the zgees contract.
    unsafe {
        lapack::zgees(
            b'V', b'N', None, n, a.as_mut_slice(), n, &mut sdim, &mut w, q.as_mut_slice(), n, &mut query, -1,
            &mut rwork, &mut bwork, &mut info,
        );
    }
    let lwork = (query[0].re as usize).max(2 * nu).max(1);
    let mut work = vec![C64::new(0.0, 0.0); lwork];
    // SAFETY: as above, with a workspace of the queried size.
    unsafe {
        lapack::zgees(
            b'V', b'N', None, n, a.as_mut_slice(), n, &mut sdim, &mut w, q.as_mut_slice(), n, &mut work,
            lwork as i32, &mut rwork, &mut bwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(format!("zgees returned info = {info}")));
    }
    Ok((q, a))
}

/// Solves `T Y − Y T† = C` for upper-triangular `T`, overwriting `c` with `Y`.
/// Returns `false` when LAPACK had to perturb nearly common eigenvalues.
pub fn triangular_sylvester(t: &DMatrix<C64>, c: &mut DMatrix<C64>) -> bool {
    let n = order(t);
    assert_eq!(n, order(c), "sylvester dimension mismatch");
    let (mut scale, mut info) = ([1.0], 0);
    // SAFETY: n×n column-major buffers with leading dimension n.
    unsafe {
        lapack::ztrsyl(b'N', b'C', &[-1], n, n, t.as_slice(), n, t.as_slice(), n, c.as_mut_slice(), n, &mut scale, &mut info);
    }
    assert!(info >= 0, "ztrsyl argument {} invalid", -info);
    if scale[0] != 1.0 {
        *c /= C64::new(scale[0], 0.0);
    }
    info == 0
}
