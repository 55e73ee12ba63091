//! Numerical laboratory for the hydrodynamic limit of free lattice fermions:
//! quantum equation of state, large-deviation rate functions, quasi-free
//! microscopic dynamics, a finite-volume Euler solver, and the harness that
//! compares the two levels of description.

pub mod eos;
pub mod entropy;
pub mod error;
pub mod euler;
pub mod harness;
pub mod ldp;
pub mod linalg;
pub mod micro;
#[cfg(test)]
mod properties;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` instantiations used by the I/O layer and the command line tool.
pub type Eos = eos::EosModel<f64>;
pub type Multipliers = eos::MultiplierVector<f64>;
pub type Conserved = eos::ConservedVector<f64>;
pub type Table = eos::EosTable<f64>;
