//! Exact microscopic side: quasi-free fermions on a periodic 1D lattice.

mod checks;
mod cutoff;
mod io;
mod lattice;
mod relent;
mod state;
mod window;

pub use checks::{
    assumption_checks, current_bound_sample, fitted_current_constant, maxwellian_moment, AssumptionReport,
    CurrentBoundSample,
};
pub use cutoff::{cutoff_profile, momentum_cutoff, MomentumCutoff};
pub use io::write_fields_csv;
pub use lattice::Lattice;
pub use relent::{entropy_production, rel_entropy_gaussian, GaussianRelEntropy, LOG_CLAMP};
pub use state::{gibbs_exponent, gibbs_gaussian, sample_field, CurrentTensor, DensityFields, GaussianState};
pub use window::{coarse_grain, smooth_step, Window};
