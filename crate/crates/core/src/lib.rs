//! Photon blockade in a driven cavity with a two-level atom and a
//! three-wave-mixing pair of auxiliary modes.
//!
//! Pipeline: [`space`] builds the truncated Fock ⊗ atom basis, [`model`] the
//! rotating-frame Hamiltonian, [`dynamics`] the Lindblad generator and its
//! steady state, and [`observables`] the photon statistics. Parameter grids and
//! CSV/SVG output live in the `blockade-sweep` crate. [`spectra`] holds the closed-form
//! dressed-state frequencies and blockade conditions.

extern crate openblas_src;

pub mod dense;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod observables;
pub mod space;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
pub use model::{build_hamiltonian, ModelParams, Param, Truncation};
pub use space::{build_space, CompositeSpace, Mode, OperatorMatrix};
