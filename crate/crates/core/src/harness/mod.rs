//! Configuration, experiment orchestration and the property-suite runner.

mod checks;
mod config;
mod coupling;
mod hydro;
mod manifest;
mod tasks;

pub use checks::{run_checks, CheckItem, CheckReport};
pub use config::{
    CutoffConfig, EosSpec, EulerConfig, ExperimentConfig, ExperimentKind, RateConfig, TableConfig,
    DEFAULT_TOLERANCES,
};
pub use coupling::{build_closure, build_table, lambda_to_sites, to_sites, ClosureChoice, Coupling};
pub use hydro::{
    hydro_compare_into, run_entropy_track, run_hydro_compare, ConvergenceReport, EntropyRow, EntropySeries,
    ErrorRow, SlopeRow, TrendRow, COMPONENTS, LONG_TIME_NOTE, TEST_FUNCTIONS,
};
pub use manifest::{sha256_hex, Manifest, OutputEntry, OutputSink};
pub use tasks::{describe, execute, Outcome};
