//! The Lindblad generator
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_i κ_i(n̄_i + 1) D[L_i]ρ + κ_i n̄_i D[L_i†]ρ
//! D[L]ρ = LρL† − ½(L†Lρ + ρL†L),    L ∈ {a, b, c, σ}
//! ```
//!
//! in two equivalent forms: an assembled sparse superoperator acting on
//! column-stacked density matrices, `vec(ρ)[i + D·j] = ρ[i, j]`, and a direct
//! matrix-form evaluation used by the time integrator.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{check_space, sum_operators, ModelParams};
use crate::sparse::SparseMatrix;
use crate::space::{CompositeSpace, Mode, OperatorMatrix};

/// One dissipation channel `rate · D[operator]`.
#[derive(Debug, Clone)]
pub struct Jump {
    pub label: String,
    pub rate: f64,
    pub operator: OperatorMatrix,
}

/// All non-zero dissipation channels for `params`, cavity modes first.
pub fn jump_operators(space: &CompositeSpace, params: &ModelParams) -> Vec<Jump> {
    let mut out = Vec::new();
    let mut push = |label: String, rate: f64, op: OperatorMatrix| {
        if rate > 0.0 {
            out.push(Jump { label, rate, operator: op });
        }
    };
    for mode in Mode::ALL {
        let a = space.annihilator(mode);
        let (k, n) = (params.kappa(mode), params.nbar(mode));
        push(format!("{mode}"), k * (n + 1.0), a.clone());
        push(format!("{mode}+"), k * n, a.adjoint());
    }
    let s = space.atom_sigma();
    let (g, n) = (params.gamma, params.nbar_sigma);
    push("sigma".into(), g * (n + 1.0), s.clone());
    push("sigma+".into(), g * n, s.adjoint());
    out
}

/// `H − (i/2) Σ rate · L†L`
pub fn effective_hamiltonian(space_dim: usize, h: &OperatorMatrix, jumps: &[Jump]) -> OperatorMatrix {
    let mut terms = vec![h.clone()];
    for j in jumps {
        let ldl = &j.operator.adjoint() * &j.operator;
        terms.push(ldl.scale(C64::new(0.0, -0.5 * j.rate)));
    }
    sum_operators(space_dim, terms)
}

/// Sparse Liouvillian of order `D²` together with the pieces it was built
/// from; the steady-state solver uses the latter to precondition.
#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: SparseMatrix,
    space_dim: usize,
    hamiltonian: OperatorMatrix,
    jumps: Vec<Jump>,
}

impl Superoperator {
    /// Assembles `−i(I⊗H − Hᵀ⊗I) + Σ r (L̄⊗L − ½ I⊗L†L − ½ (L†L)ᵀ⊗I)`.
    pub fn assemble(hamiltonian: OperatorMatrix, jumps: Vec<Jump>) -> Self {
        let d = hamiltonian.dim();
        let id = SparseMatrix::identity(d);
        let heff = effective_hamiltonian(d, &hamiltonian, &jumps);
        let minus_i = C64::new(0.0, -1.0);
        // the anticommutator terms are folded into H_eff: −i(I⊗H_eff) + i(H̄_eff⊗I)
        let left = id.kron(&heff).scale(minus_i);
        let right = heff.adjoint().transpose().kron(&id).scale(-minus_i);
        let mut terms = vec![left, right];
        for j in &jumps {
            terms.push(j.operator.conj().kron(&j.operator).scale_re(j.rate));
        }
        let matrix = sum_operators(d * d, terms);
        Superoperator {
            matrix,
            space_dim: d,
            hamiltonian,
            jumps,
        }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.matvec(v)
    }

    /// `unvec(L · vec(ρ))`
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let v = self.matrix.matvec(rho.as_slice());
        DMatrix::from_vec(self.space_dim, self.space_dim, v)
    }

    /// `⟨⟨I| L`, the row vector whose vanishing expresses trace preservation.
    pub fn trace_row(&self) -> Vec<C64> {
        let d = self.space_dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for (c, v) in self.matrix.row(i + d * i) {
                out[c] += v;
            }
        }
        out
    }
}

/// Column-stacking vectorization.
pub fn vectorize(m: &DMatrix<C64>) -> Vec<C64> {
    m.as_slice().to_vec()
}

pub fn unvectorize(v: &[C64], dim: usize) -> DMatrix<C64> {
    assert_eq!(v.len(), dim * dim);
    DMatrix::from_column_slice(dim, dim, v)
}

pub fn build_liouvillian(
    space: &CompositeSpace,
    h: &OperatorMatrix,
    params: &ModelParams,
) -> Result<Superoperator> {
    check_space(space, params)?;
    if h.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: h.dim() });
    }
    params.validate_baths()?;
    Ok(Superoperator::assemble(h.clone(), jump_operators(space, params)))
}

/// Matrix-form right-hand side of the master equation.
pub fn apply_generator(
    space: &CompositeSpace,
    h: &OperatorMatrix,
    params: &ModelParams,
    rho: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    check_space(space, params)?;
    let d = space.dim();
    if h.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: h.dim() });
    }
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
    }
    params.validate_baths()?;
    let jumps = jump_operators(space, params);
    Ok(Generator::new(h, &jumps).apply(rho))
}

/// Matrix-form generator `ρ ↦ −i(H_eff ρ − ρ H_eff†) + Σ r LρL†` with the
/// sparse pieces precomputed.
#[derive(Debug, Clone)]
pub struct Generator {
    heff: OperatorMatrix,
    heff_adj: OperatorMatrix,
    jumps: Vec<(f64, OperatorMatrix, OperatorMatrix)>,
}

impl Generator {
    pub fn new(h: &OperatorMatrix, jumps: &[Jump]) -> Self {
        let heff = effective_hamiltonian(h.dim(), h, jumps);
        Generator {
            heff_adj: heff.adjoint(),
            heff,
            jumps: jumps
                .iter()
                .map(|j| (j.rate, j.operator.clone(), j.operator.adjoint()))
                .collect(),
        }
    }

    pub fn from_superoperator(l: &Superoperator) -> Self {
        Self::new(l.hamiltonian(), l.jumps())
    }

    pub fn dim(&self) -> usize {
        self.heff.dim()
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let minus_i = C64::new(0.0, -1.0);
        let mut out = self.heff.mul_dense(rho) * minus_i;
        out += self.heff_adj.dense_mul(rho) * C64::new(0.0, 1.0);
        for (rate, l, ldag) in &self.jumps {
            let lr = l.mul_dense(rho);
            out += ldag.dense_mul(&lr) * C64::new(*rate, 0.0);
        }
        out
    }
}
