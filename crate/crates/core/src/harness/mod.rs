//! Seeded Monte Carlo orchestration, configuration and CSV output.

pub mod config;
pub mod csv;
pub mod curves;
pub mod experiment;
pub mod rng;

pub use config::{AttackSpec, ExperimentConfig, GammaChoice};
pub use csv::CsvTable;
pub use curves::{curve_table, emit_curves, solve_report, SolveReport};
pub use experiment::{rows_table, run_experiment, run_rows, summarize, RoundRow, RunReport};
pub use rng::{round_rng, verification_rng};
