//! Experiment configuration and grid execution.

pub mod config;
pub mod grid;

pub use config::{
    load_config, parse_config, EnsembleChoice, ExperimentConfig, StrategyChoice, StreamSource,
    DEFAULT_ALPHA_THETA, DEFAULT_BUDGETS,
};
pub use grid::{
    build_learner, expand_cells, resolve_output, run_cell, run_grid, write_csv, Cell, CellFailure,
    GridOptions, GridOutcome, ResultRow, CSV_HEADER, OUTPUT_DIR_ENV,
};
