//! Finite-volume solver for the one-dimensional Euler system closed by the
//! quantum equation of state.

mod closure;
mod interp;
mod profile;
mod solver;

pub use closure::{Closure, DirectClosure, Polytropic};
pub use interp::periodic_interpolate;
pub use profile::Profile;
pub use solver::{
    flux_a, initial_field, lambda_field_of, max_dt, run, sound_speed, step, time_derivative, EulerSolution,
    MacroGrid, RunOptions, Trajectory, DEFAULT_CFL,
};

#[cfg(test)]
mod tests;
