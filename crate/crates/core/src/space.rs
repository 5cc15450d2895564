//! The composite Hilbert space `atom ⊗ a ⊗ b ⊗ c` and its elementary operators.
//!
//! Basis ordering is fixed: the atom is the slowest index, then the Fock
//! occupations of modes a, b and c, with c fastest:
//!
//! ```text
//! index = ((atom · n_a + m_a) · n_b + m_b) · n_c + m_c,   atom ∈ {g = 0, e = 1}
//! ```

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Sparse operator on a [`CompositeSpace`].
pub type OperatorMatrix = SparseMatrix;

pub const ATOM_LEVELS: usize = 2;

/// One of the three bosonic cavity modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::B, Mode::C];

    pub fn label(self) -> &'static str {
        match self {
            Mode::A => "a",
            Mode::B => "b",
            Mode::C => "c",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Mode::A),
            "b" | "B" => Ok(Mode::B),
            "c" | "C" => Ok(Mode::C),
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    Ground,
    Excited,
}

impl Atom {
    fn index(self) -> usize {
        match self {
            Atom::Ground => 0,
            Atom::Excited => 1,
        }
    }
}

/// A product basis state `|atom, m_a, m_b, m_c⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub atom: Atom,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl BasisState {
    pub fn new(atom: Atom, a: usize, b: usize, c: usize) -> Self {
        BasisState { atom, a, b, c }
    }

    pub fn occupation(&self, mode: Mode) -> usize {
        match mode {
            Mode::A => self.a,
            Mode::B => self.b,
            Mode::C => self.c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompositeSpace {
    n_a: usize,
    n_b: usize,
    n_c: usize,
}

/// Convenience wrapper around [`CompositeSpace::new`].
pub fn build_space(n_a: usize, n_b: usize, n_c: usize) -> Result<CompositeSpace> {
    CompositeSpace::new(n_a, n_b, n_c)
}

impl CompositeSpace {
    pub fn new(n_a: usize, n_b: usize, n_c: usize) -> Result<Self> {
        for (mode, levels) in [("a", n_a), ("b", n_b), ("c", n_c)] {
            if levels < 2 {
                return Err(Error::Truncation { mode, levels });
            }
        }
        Ok(CompositeSpace { n_a, n_b, n_c })
    }

    pub fn levels(&self, mode: Mode) -> usize {
        match mode {
            Mode::A => self.n_a,
            Mode::B => self.n_b,
            Mode::C => self.n_c,
        }
    }

    pub fn truncation(&self) -> (usize, usize, usize) {
        (self.n_a, self.n_b, self.n_c)
    }

    pub fn dim(&self) -> usize {
        ATOM_LEVELS * self.n_a * self.n_b * self.n_c
    }

    /// Returns `None` if any occupation lies outside the truncation.
    pub fn index(&self, s: BasisState) -> Option<usize> {
        if s.a >= self.n_a || s.b >= self.n_b || s.c >= self.n_c {
            return None;
        }
        Some(((s.atom.index() * self.n_a + s.a) * self.n_b + s.b) * self.n_c + s.c)
    }

    pub fn state(&self, index: usize) -> BasisState {
        assert!(index < self.dim(), "basis index {index} out of range");
        let c = index % self.n_c;
        let rest = index / self.n_c;
        let b = rest % self.n_b;
        let rest = rest / self.n_b;
        let a = rest % self.n_a;
        let atom = if rest / self.n_a == 0 { Atom::Ground } else { Atom::Excited };
        BasisState { atom, a, b, c }
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(move |i| self.state(i))
    }

    pub fn identity(&self) -> OperatorMatrix {
        SparseMatrix::identity(self.dim())
    }

    /// Lowering operator of `mode`: `√m |m−1⟩⟨m|` on that factor.
    pub fn annihilator(&self, mode: Mode) -> OperatorMatrix {
        let n = self.levels(mode);
        let lower = SparseMatrix::from_triplets(
            n,
            (1..n).map(|m| (m - 1, m, C64::new((m as f64).sqrt(), 0.0))),
        );
        self.embed_mode(mode, &lower)
    }

    pub fn creator(&self, mode: Mode) -> OperatorMatrix {
        self.annihilator(mode).adjoint()
    }

    /// Diagonal occupation operator of `mode`.
    pub fn number_operator(&self, mode: Mode) -> OperatorMatrix {
        let n = self.levels(mode);
        let diag: Vec<C64> = (0..n).map(|m| C64::new(m as f64, 0.0)).collect();
        self.embed_mode(mode, &SparseMatrix::diagonal(&diag))
    }

    /// Atomic lowering operator `σ = |g⟩⟨e|`.
    pub fn atom_sigma(&self) -> OperatorMatrix {
        let sigma = SparseMatrix::from_triplets(ATOM_LEVELS, [(0, 1, C64::new(1.0, 0.0))]);
        sigma.kron(&SparseMatrix::identity(self.n_a * self.n_b * self.n_c))
    }

    /// Projector onto occupation `m` of `mode`.
    pub fn occupation_projector(&self, mode: Mode, m: usize) -> OperatorMatrix {
        let n = self.levels(mode);
        assert!(m < n, "occupation {m} outside truncation {n}");
        let p = SparseMatrix::from_triplets(n, [(m, m, C64::new(1.0, 0.0))]);
        self.embed_mode(mode, &p)
    }

    fn embed_mode(&self, mode: Mode, local: &SparseMatrix) -> OperatorMatrix {
        let id = |n: usize| SparseMatrix::identity(n);
        let atom = id(ATOM_LEVELS);
        match mode {
            Mode::A => atom.kron(local).kron(&id(self.n_b)).kron(&id(self.n_c)),
            Mode::B => atom.kron(&id(self.n_a)).kron(local).kron(&id(self.n_c)),
            Mode::C => atom.kron(&id(self.n_a)).kron(&id(self.n_b)).kron(local),
        }
    }
}

/// Annihilation operator for `mode` on `space`.
pub fn annihilator(space: &CompositeSpace, mode: Mode) -> OperatorMatrix {
    space.annihilator(mode)
}

pub fn atom_sigma(space: &CompositeSpace) -> OperatorMatrix {
    space.atom_sigma()
}

pub fn number_operator(space: &CompositeSpace, mode: Mode) -> OperatorMatrix {
    space.number_operator(mode)
}
