//! Parameter sweeps over synthetic graphs and checks on hand-built fixtures.

mod config;
mod fixtures;
mod sweep;

pub use config::{
    connectedness_spec, relative_size_spec, Baseline, ExperimentConfig, GraphSource, DEFAULT_ALPHAS,
    DEFAULT_REPLICATIONS,
};
pub use fixtures::{
    verify_fixtures, verify_fixtures_in, Fixture, FixtureCheck, FixtureReport, ALPHA_GRID, BUNDLED_FIXTURES,
    DC_SKETCH_TOL, FIXTURE_NAMES,
};
pub use sweep::{
    relative_connectedness_experiment, relative_size_experiment, run_family, run_sweep, LevelSweep, Method,
    ResultRow, RowKind, SweepMetadata, SweepTable, CONNECTEDNESS_LEVELS, SWEEP_NOTES,
};
