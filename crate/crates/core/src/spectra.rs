//! One- and two-excitation manifolds of the undriven Hamiltonian and the
//! detunings at which the driven system becomes resonant with them.
//!
//! With the matching conditions `Δ_σ = Δ_a` and `Δ_b + Δ_c = Δ_a`, both
//! manifold matrices are `n·Δ_a·I` plus a detuning-free coupling block, so the
//! eigenfrequencies have closed forms:
//!
//! ```text
//! ω±(1)  = Δ_a ± √(g² + J²),              ω0(1) = Δ_a
//! ω±±(2) = 2Δ_a ± (√2/2)·√(A ± √B),       ω0(2) = 2Δ_a
//! A = 7g² + 3J²,   B = 25g⁴ + 26g²J² + J⁴
//! ```
//!
//! `B` here is the radicand; the square root is taken once.

use nalgebra::{ComplexField, DMatrix, Matrix3, SMatrix};

use crate::error::{Error, Result};
use crate::model::ModelParams;

pub type Matrix5 = SMatrix<f64, 5, 5>;

/// How a set of manifold frequencies was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    ClosedForm,
    /// Parameters violate the matching conditions; values come from
    /// diagonalizing the manifold matrix.
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldFrequencies {
    pub order: u8,
    /// Descending: `[ω+, ω0, ω−]` for order 1,
    /// `[ω++, ω+−, ω0, ω−+, ω−−]` for order 2.
    pub values: Vec<f64>,
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub method: SpectrumMethod,
}

impl ManifoldFrequencies {
    pub fn sorted_ascending(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

pub fn a_coeff(g: f64, j: f64) -> f64 {
    7.0 * g * g + 3.0 * j * j
}

pub fn b_coeff(g: f64, j: f64) -> f64 {
    let (g2, j2) = (g * g, j * j);
    25.0 * g2 * g2 + 26.0 * g2 * j2 + j2 * j2
}

/// `(A + √B, A − √B)`; the second is clamped at zero against rounding.
fn a_pm_sqrt_b(g: f64, j: f64) -> (f64, f64) {
    let a = a_coeff(g, j);
    let sb = b_coeff(g, j).sqrt();
    (a + sb, (a - sb).max(0.0))
}

/// Whether `Δ_σ = Δ_a` and `Δ_b + Δ_c = Δ_a` hold to rounding.
pub fn is_resonant(p: &ModelParams) -> bool {
    let scale = 1.0 + p.delta_a.abs() + p.delta_b.abs() + p.delta_c.abs() + p.delta_sigma.abs();
    let tol = 1e-12 * scale;
    (p.delta_sigma - p.delta_a).abs() <= tol && (p.delta_b + p.delta_c - p.delta_a).abs() <= tol
}

/// One-excitation block in the basis `|g,1,0,0⟩, |e,0,0,0⟩, |g,0,1,1⟩`.
pub fn subspace_h1(p: &ModelParams) -> Matrix3<f64> {
    Matrix3::new(
        p.delta_a, p.j, p.g, //
        p.j, p.delta_sigma, 0.0, //
        p.g, 0.0, p.delta_b + p.delta_c,
    )
}

/// Two-excitation block in the basis
/// `|g,2,0,0⟩, |e,1,0,0⟩, |e,0,1,1⟩, |g,0,2,2⟩, |g,1,1,1⟩`.
pub fn subspace_h2(p: &ModelParams) -> Matrix5 {
    let s2 = std::f64::consts::SQRT_2;
    let (da, ds, dbc) = (p.delta_a, p.delta_sigma, p.delta_b + p.delta_c);
    let (g, j) = (p.g, p.j);
    #[rustfmt::skip]
    let m = Matrix5::from_row_slice(&[
        2.0 * da, s2 * j,  0.0,      0.0,       s2 * g,
        s2 * j,   da + ds, g,        0.0,       0.0,
        0.0,      g,       ds + dbc, 0.0,       j,
        0.0,      0.0,     0.0,      2.0 * dbc, 2.0 * g,
        s2 * g,   0.0,     j,        2.0 * g,   da + dbc,
    ]);
    m
}

/// One-excitation frequencies by diagonalizing the 3×3 block, regardless of resonance.
pub fn first_manifold_numeric(p: &ModelParams) -> ManifoldFrequencies {
    let m = DMatrix::from_iterator(3, 3, subspace_h1(p).iter().copied());
    ManifoldFrequencies {
        order: 1,
        values: descending(symmetric_eigenvalues(m)),
        a_coeff: a_coeff(p.g, p.j),
        b_coeff: b_coeff(p.g, p.j),
        method: SpectrumMethod::Numeric,
    }
}

/// Two-excitation frequencies by diagonalizing the 5×5 block, regardless of resonance.
pub fn second_manifold_numeric(p: &ModelParams) -> ManifoldFrequencies {
    let m = DMatrix::from_iterator(5, 5, subspace_h2(p).iter().copied());
    ManifoldFrequencies {
        order: 2,
        values: descending(symmetric_eigenvalues(m)),
        a_coeff: a_coeff(p.g, p.j),
        b_coeff: b_coeff(p.g, p.j),
        method: SpectrumMethod::Numeric,
    }
}

pub fn first_manifold(p: &ModelParams) -> ManifoldFrequencies {
    let (a_coeff, b_coeff) = (a_coeff(p.g, p.j), b_coeff(p.g, p.j));
    if is_resonant(p) {
        let split = p.g.hypot(p.j);
        ManifoldFrequencies {
            order: 1,
            values: vec![p.delta_a + split, p.delta_a, p.delta_a - split],
            a_coeff,
            b_coeff,
            method: SpectrumMethod::ClosedForm,
        }
    } else {
        first_manifold_numeric(p)
    }
}

pub fn second_manifold(p: &ModelParams) -> ManifoldFrequencies {
    let (a_coeff, b_coeff) = (a_coeff(p.g, p.j), b_coeff(p.g, p.j));
    if is_resonant(p) {
        let (plus, minus) = a_pm_sqrt_b(p.g, p.j);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let (outer, inner) = (half * plus.sqrt(), half * minus.sqrt());
        let c = 2.0 * p.delta_a;
        ManifoldFrequencies {
            order: 2,
            values: vec![c + outer, c + inner, c, c - inner, c - outer],
            a_coeff,
            b_coeff,
            method: SpectrumMethod::ClosedForm,
        }
    } else {
        second_manifold_numeric(p)
    }
}

fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    m.symmetric_eigenvalues().iter().copied().collect()
}

fn descending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Pump detunings `±√(g² + J²)` that put the lower or upper one-excitation
/// level at zero; returned as `(+, −)`.
pub fn cpb_detunings(g: f64, j: f64) -> (f64, f64) {
    let d = g.hypot(j);
    (d, -d)
}

/// The two families of two-photon resonance conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpbBranch {
    /// `(√2/4)·√(A + √B)`
    Outer,
    /// `(√2/4)·√(A − √B)`
    Inner,
}

impl TpbBranch {
    pub fn label(self) -> &'static str {
        match self {
            TpbBranch::Outer => "delta_a1",
            TpbBranch::Inner => "delta_a2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpbDetunings {
    /// `(√2/4)·√(A + √B)`, non-negative
    pub delta_a1: f64,
    /// `(√2/4)·√(A − √B)`, non-negative
    pub delta_a2: f64,
}

impl TpbDetunings {
    /// All four conditions as `(branch, signed detuning)`.
    pub fn all(&self) -> [(TpbBranch, f64); 4] {
        [
            (TpbBranch::Outer, self.delta_a1),
            (TpbBranch::Outer, -self.delta_a1),
            (TpbBranch::Inner, self.delta_a2),
            (TpbBranch::Inner, -self.delta_a2),
        ]
    }

    /// The condition closest to `delta_a`, with its distance.
    pub fn nearest(&self, delta_a: f64) -> (TpbBranch, f64, f64) {
        self.all()
            .into_iter()
            .map(|(b, d)| (b, d, (d - delta_a).abs()))
            .min_by(|x, y| x.2.total_cmp(&y.2))
            .expect("four branches")
    }
}

/// Pump detunings at which a two-excitation level crosses zero, i.e.
/// `2Δ_a = ω` for the coupling part of the two-excitation block.
pub fn tpb_detunings(g: f64, j: f64) -> TpbDetunings {
    let (plus, minus) = a_pm_sqrt_b(g, j);
    let k = std::f64::consts::SQRT_2 / 4.0;
    TpbDetunings {
        delta_a1: k * plus.sqrt(),
        delta_a2: k * minus.sqrt(),
    }
}

/// Non-negative mixing coefficients `g` for which `branch` of the two-photon
/// condition equals `delta_a` at fixed `J`.
///
/// Squaring `A ± √B = 8Δ²` gives a quadratic in `g²`:
/// `24x² − (14K + 26J²)x + K² − J⁴ = 0` with `K = 8Δ² − 3J²`; each root is kept
/// only if it satisfies the unsquared equation on the requested branch.
pub fn tpb_couplings(delta_a: f64, j: f64, branch: TpbBranch) -> Vec<f64> {
    let j2 = j * j;
    let k = 8.0 * delta_a * delta_a - 3.0 * j2;
    let qa = 24.0;
    let qb = -(14.0 * k + 26.0 * j2);
    let qc = k * k - j2 * j2;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    let sd = disc.sqrt();
    let mut out: Vec<f64> = [(-qb - sd) / (2.0 * qa), (-qb + sd) / (2.0 * qa)]
        .into_iter()
        .filter(|&x| x >= 0.0)
        .map(f64::sqrt)
        .filter(|&g| {
            let d = tpb_detunings(g, j);
            let v = match branch {
                TpbBranch::Outer => d.delta_a1,
                TpbBranch::Inner => d.delta_a2,
            };
            (v - delta_a.abs()).abs() <= 1e-8 * (1.0 + delta_a.abs())
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

/// Eigenvalues of a Hermitian matrix (real symmetric or complex), ascending.
///
/// Rejects input whose entries differ from their conjugate-transpose
/// partners by more than `1e-12` (relative to the largest entry, floor 1).
pub fn hermitian_eigenvalues<T>(m: &DMatrix<T>) -> Result<Vec<f64>>
where
    T: ComplexField<RealField = f64>,
{
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, found: c });
    }
    let scale = m.iter().map(|x| x.clone().modulus()).fold(1.0, f64::max);
    let mut asym = 0.0f64;
    for i in 0..r {
        for k in 0..c {
            let d = (m[(i, k)].clone() - m[(k, i)].clone().conjugate()).modulus();
            asym = asym.max(d);
        }
    }
    if asym > 1e-12 * scale {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}
