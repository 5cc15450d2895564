//! Open-system dynamics: Lindblad generator, steady-state solvers, time evolution.

pub mod density;
pub mod krylov;
pub mod liouvillian;
pub mod steady;
pub mod sylvester;
pub mod thermal;

pub use density::DensityMatrix;
pub use liouvillian::{
    apply_generator, build_liouvillian, effective_hamiltonian, jump_operators, unvectorize, vectorize, Generator, Jump,
    Superoperator,
};
pub use steady::{
    default_time_step, relative_residual, steady_state_direct, steady_state_direct_with, steady_state_evolve,
    DirectOptions, EvolveOptions, EvolveOutcome, Rk4, SteadyState,
};
pub use thermal::{occupation_from_ratio, thermal_occupation};
