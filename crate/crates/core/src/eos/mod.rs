//! Free Fermi gas thermodynamics: pressure functional, dual densities,
//! Legendre inversion and the rest-frame pressure closure.

mod model;
mod table;
mod types;

pub use model::{EosModel, MomentumDomain, RestPressure, Thermo};
pub use table::{EnergyAxis, EosTable};
pub use types::{ConservedField, ConservedVector, MultiplierField, MultiplierVector};
