//! Steady states of the Lindblad generator.
//!
//! [`steady_state_direct`] solves `L vec(ρ) = 0, Tr ρ = 1` as the bordered
//! system `L x + v·Tr(x) = v` (`v` = vacuum projector, which has unit trace and
//! therefore lies outside the range of `L`). The system is solved by GMRES on
//! the assembled sparse superoperator, right-preconditioned with the exact
//! inverse of the no-jump part (see [`super::sylvester`]). Jumps only lower the
//! excitation number, so the preconditioned operator is close to the identity
//! plus a nilpotent part and converges in a handful of iterations.
//!
//! [`steady_state_evolve`] is the independent check: fixed-step RK4 in
//! matrix form from the vacuum until `‖dρ/dt‖_F < tol`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::density::DensityMatrix;
use super::krylov::{gmres, GmresOptions};
use super::liouvillian::{effective_hamiltonian, jump_operators, Generator, Superoperator};
use super::sylvester::SylvesterInverse;
use crate::error::{Error, Result};
use crate::model::{check_space, ModelParams};
use crate::space::{CompositeSpace, OperatorMatrix};

#[derive(Debug, Clone, Copy)]
pub struct DirectOptions {
    /// Contract on `‖L vec(ρ)‖₂ / ‖L‖_F` after normalization.
    pub residual_tolerance: f64,
    pub gmres: GmresOptions,
}

impl Default for DirectOptions {
    fn default() -> Self {
        DirectOptions {
            residual_tolerance: 1e-10,
            gmres: GmresOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `‖L vec(ρ)‖₂ / ‖L‖_F`
    pub residual: f64,
    pub iterations: usize,
}

pub fn steady_state_direct(l: &Superoperator) -> Result<SteadyState> {
    steady_state_direct_with(l, DirectOptions::default())
}

pub fn steady_state_direct_with(l: &Superoperator, opts: DirectOptions) -> Result<SteadyState> {
    let d = l.space_dim();
    if l.jumps().is_empty() {
        return Err(Error::DegenerateSteadyState("no dissipation channels".into()));
    }
    let heff = effective_hamiltonian(d, l.hamiltonian(), l.jumps()).to_dense();
    let pre = SylvesterInverse::new(heff)?;

    let trace = |x: &[C64]| -> C64 { (0..d).map(|i| x[i + d * i]).sum() };
    let apply = |x: &[C64]| -> Vec<C64> {
        let mut y = l.apply_vec(x);
        y[0] += trace(x);
        y
    };
    let precondition = |x: &[C64]| -> Vec<C64> {
        let m = DMatrix::from_column_slice(d, d, x);
        pre.apply(&m).as_slice().to_vec()
    };
    let mut rhs = vec![C64::new(0.0, 0.0); d * d];
    rhs[0] = C64::new(1.0, 0.0);

    let out = gmres(apply, precondition, &rhs, opts.gmres);
    if !out.converged {
        return Err(Error::NoConvergence {
            iterations: out.iterations,
            residual: out.relative_residual,
        });
    }
    let rho = DensityMatrix::from_matrix(DMatrix::from_vec(d, d, out.x))?.hermitized_normalized()?;
    let residual = relative_residual(l, &rho);
    if !(residual < opts.residual_tolerance) {
        return Err(Error::NoConvergence { iterations: out.iterations, residual });
    }
    Ok(SteadyState { rho, residual, iterations: out.iterations })
}

/// `‖L vec(ρ)‖₂ / ‖L‖_F`
pub fn relative_residual(l: &Superoperator, rho: &DensityMatrix) -> f64 {
    let r = l.apply(rho.matrix());
    r.norm() / l.matrix().norm()
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Step size; `None` picks [`default_time_step`].
    pub dt: Option<f64>,
    /// Stop once `‖dρ/dt‖_F` falls below this.
    pub tolerance: f64,
    pub t_max: f64,
    /// Starting state; vacuum when `None`.
    pub initial: Option<DensityMatrix>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            dt: None,
            tolerance: 1e-9,
            t_max: 2000.0,
            initial: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub rho: DensityMatrix,
    pub time: f64,
    pub steps: usize,
    /// `‖dρ/dt‖_F` at the returned state.
    pub rate: f64,
}

/// `0.05 / max(|Δ|, |g|, |J|, |F|, Σ rates)`, further capped so that
/// `dt · ‖L‖ ≤ 1` with `‖L‖` bounded by Gershgorin on the effective
/// Hamiltonian and the jump norms.
pub fn default_time_step(h: &OperatorMatrix, params: &ModelParams, space: &CompositeSpace) -> f64 {
    let jumps = jump_operators(space, params);
    let total_rate: f64 = jumps.iter().map(|j| j.rate).sum();
    let scale = params.frequency_scale().max(total_rate).max(1e-12);
    let heff = effective_hamiltonian(space.dim(), h, &jumps);
    let row_bound = (0..heff.dim())
        .map(|r| heff.row(r).map(|(_, v)| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let jump_bound: f64 = jumps.iter().map(|j| j.rate * j.operator.max_abs().powi(2)).sum();
    let spectral = 2.0 * row_bound + jump_bound;
    (0.05 / scale).min(1.0 / spectral.max(1e-12))
}

/// Classical fourth-order Runge–Kutta stepper for the master equation.
#[derive(Debug, Clone)]
pub struct Rk4 {
    generator: Generator,
    dt: f64,
}

impl Rk4 {
    pub fn new(generator: Generator, dt: f64) -> Self {
        Rk4 { generator, dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn rate(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        self.generator.apply(rho)
    }

    /// One step given `k1 = L(ρ)` already evaluated.
    pub fn step_with(&self, rho: &DMatrix<C64>, k1: &DMatrix<C64>) -> DMatrix<C64> {
        let h = C64::new(self.dt, 0.0);
        let half = C64::new(0.5 * self.dt, 0.0);
        let k2 = self.generator.apply(&(rho + k1 * half));
        let k3 = self.generator.apply(&(rho + &k2 * half));
        let k4 = self.generator.apply(&(rho + &k3 * h));
        rho + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * (h / C64::new(6.0, 0.0))
    }

    pub fn step(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let k1 = self.generator.apply(rho);
        self.step_with(rho, &k1)
    }
}

pub fn steady_state_evolve(
    space: &CompositeSpace,
    h: &OperatorMatrix,
    params: &ModelParams,
    opts: &EvolveOptions,
) -> Result<EvolveOutcome> {
    check_space(space, params)?;
    if h.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: h.dim() });
    }
    params.validate_baths()?;
    let dt = opts.dt.unwrap_or_else(|| default_time_step(h, params, space));
    if !(dt > 0.0) {
        return Err(Error::param("dt", "time step must be > 0"));
    }
    let jumps = jump_operators(space, params);
    let stepper = Rk4::new(Generator::new(h, &jumps), dt);
    let mut rho = match &opts.initial {
        Some(r) if r.dim() == space.dim() => r.matrix().clone(),
        Some(r) => return Err(Error::DimensionMismatch { expected: space.dim(), found: r.dim() }),
        None => DensityMatrix::vacuum(space).into_matrix(),
    };
    let mut steps = 0usize;
    loop {
        let k1 = stepper.rate(&rho);
        let rate = k1.norm();
        let time = steps as f64 * dt;
        if rate < opts.tolerance {
            let rho = DensityMatrix::from_matrix(rho)?.hermitized_normalized()?;
            return Ok(EvolveOutcome { rho, time, steps, rate });
        }
        if time >= opts.t_max {
            return Err(Error::HorizonExceeded { t_max: opts.t_max, tol: opts.tolerance, last: rate });
        }
        rho = stepper.step_with(&rho, &k1);
        let tr = rho.trace();
        rho /= tr;
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::liouvillian::build_liouvillian;
    use crate::model::{build_hamiltonian, Truncation};
    use crate::space::{Atom, BasisState, Mode};

    fn expectation(rho: &DensityMatrix, op: &OperatorMatrix) -> f64 {
        op.mul_dense(rho.matrix()).trace().re
    }

    fn mixed_params() -> ModelParams {
        ModelParams {
            delta_a: 0.9,
            delta_b: 0.4,
            delta_c: 0.2,
            delta_sigma: 1.1,
            j: 0.8,
            g: 1.3,
            f_a: 0.4,
            f_b: 0.2,
            f_c: 0.1,
            gamma: 0.7,
            nbar_b: 0.1,
            truncation: Truncation { a: 3, b: 2, c: 2 },
            ..ModelParams::default()
        }
    }

    /// Dense-LU oracle: replace the first row of L by the trace functional.
    fn dense_oracle(l: &Superoperator) -> DMatrix<C64> {
        let d = l.space_dim();
        let mut m = l.matrix().to_dense();
        for c in 0..d * d {
            m[(0, c)] = C64::new(0.0, 0.0);
        }
        for i in 0..d {
            m[(0, i + d * i)] = C64::new(1.0, 0.0);
        }
        let mut rhs = nalgebra::DVector::zeros(d * d);
        rhs[0] = C64::new(1.0, 0.0);
        let x = m.lu().solve(&rhs).expect("nonsingular");
        DMatrix::from_column_slice(d, d, x.as_slice())
    }

    #[test]
    fn matches_dense_lu_oracle() {
        let p = mixed_params();
        let s = p.truncation.space().unwrap();
        let h = build_hamiltonian(&s, &p).unwrap();
        let l = build_liouvillian(&s, &h, &p).unwrap();
        let ss = steady_state_direct(&l).unwrap();
        let oracle = dense_oracle(&l);
        let diff = (ss.rho.matrix() - oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-11, "diff {diff}");
        assert!(ss.residual < 1e-10);
        assert!(ss.rho.min_eigenvalue() > -1e-8);
        assert!(ss.rho.hermitian_defect() < 1e-10);
    }

    #[test]
    fn undriven_cold_system_relaxes_to_vacuum() {
        let p = ModelParams { g: 1.0, j: 0.5, delta_a: 0.3, truncation: Truncation::uniform(3), ..ModelParams::default() };
        let s = p.truncation.space().unwrap();
        let h = build_hamiltonian(&s, &p).unwrap();
        let l = build_liouvillian(&s, &h, &p).unwrap();
        let ss = steady_state_direct(&l).unwrap();
        assert!(ss.rho.max_abs_diff(&DensityMatrix::vacuum(&s)) < 1e-12);
    }

    #[test]
    fn no_dissipation_is_degenerate() {
        let p = ModelParams { kappa_a: 0.0, kappa_b: 0.0, kappa_c: 0.0, gamma: 0.0, truncation: Truncation::uniform(2), ..ModelParams::default() };
        let s = p.truncation.space().unwrap();
        let h = build_hamiltonian(&s, &p).unwrap();
        let l = build_liouvillian(&s, &h, &p).unwrap();
        assert!(matches!(steady_state_direct(&l), Err(Error::DegenerateSteadyState(_))));
    }

    #[test]
    fn evolution_agrees_with_direct_solve() {
        let p = mixed_params();
        let s = p.truncation.space().unwrap();
        let h = build_hamiltonian(&s, &p).unwrap();
        let l = build_liouvillian(&s, &h, &p).unwrap();
        let direct = steady_state_direct(&l).unwrap();
        let ev = steady_state_evolve(&s, &h, &p, &EvolveOptions { tolerance: 1e-10, ..Default::default() }).unwrap();
        assert!(ev.rho.max_abs_diff(&direct.rho) < 1e-8);
    }

    #[test]
    fn exponential_decay_of_one_photon() {
        let p = ModelParams { truncation: Truncation::uniform(2), ..ModelParams::default() };
        let s = p.truncation.space().unwrap();
        let h = build_hamiltonian(&s, &p).unwrap();
        let one = s.index(BasisState::new(Atom::Ground, 1, 0, 0)).unwrap();
        let jumps = jump_operators(&s, &p);
        let dt = 0.01;
        let stepper = Rk4::new(Generator::new(&h, &jumps), dt);
        let n = s.number_operator(Mode::A);
        let mut rho = DensityMatrix::basis_projector(s.dim(), one).into_matrix();
        for step in 1..=300 {
            rho = stepper.step(&rho);
            if step % 50 == 0 {
                let t = step as f64 * dt;
                let na = n.mul_dense(&rho).trace().re;
                assert!((na - (-p.kappa_a * t).exp()).abs() < 1e-9, "t={t}");
            }
        }
        let out = steady_state_evolve(
            &s,
            &h,
            &p,
            &EvolveOptions { initial: Some(DensityMatrix::basis_projector(s.dim(), one)), ..Default::default() },
        )
        .unwrap();
        assert!(out.rho.max_abs_diff(&DensityMatrix::vacuum(&s)) < 1e-8);
    }

    #[test]
    fn zero_generator_returns_initial_state() {
        let p = ModelParams { kappa_a: 0.0, kappa_b: 0.0, kappa_c: 0.0, gamma: 0.0, truncation: Truncation::uniform(2), ..ModelParams::default() };
        let s = p.truncation.space().unwrap();
        let h = build_hamiltonian(&s, &p).unwrap();
        let init = DensityMatrix::basis_projector(s.dim(), 5);
        let out = steady_state_evolve(&s, &h, &p, &EvolveOptions { initial: Some(init.clone()), dt: Some(0.1), ..Default::default() }).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.rho, init);
    }

    #[test]
    fn horizon_is_reported() {
        let p = mixed_params();
        let s = p.truncation.space().unwrap();
        let h = build_hamiltonian(&s, &p).unwrap();
        let r = steady_state_evolve(&s, &h, &p, &EvolveOptions { t_max: 0.5, ..Default::default() });
        assert!(matches!(r, Err(Error::HorizonExceeded { .. })));
    }

    #[test]
    fn trace_and_hermiticity_are_conserved_by_the_stepper() {
        let p = mixed_params();
        let s = p.truncation.space().unwrap();
        let h = build_hamiltonian(&s, &p).unwrap();
        let dt = default_time_step(&h, &p, &s);
        let stepper = Rk4::new(Generator::new(&h, &jump_operators(&s, &p)), dt);
        let mut rho = DensityMatrix::vacuum(&s).into_matrix();
        for _ in 0..100 {
            rho = stepper.step(&rho);
            assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-8);
            let defect = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(defect < 1e-10);
        }
        let n = s.number_operator(Mode::A);
        assert!(expectation(&DensityMatrix::from_matrix(rho).unwrap(), &n) > 0.0);
    }
}
