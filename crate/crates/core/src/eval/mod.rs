//! Metrics, test-then-train evaluation and rank statistics.

pub mod kappa;
pub mod ranks;
pub mod runner;
pub mod segments;

pub use kappa::{kappa, ConfusionMatrix, KappaAccumulator, KappaMode};
pub use ranks::{
    bonferroni_dunn_q, critical_difference, friedman_bonferroni_dunn, RankTable, RankTestResult,
};
pub use runner::{prequential_series, run_test_then_train, EvalOptions, EvalReport, SeriesPoint};
pub use segments::{segment_average, SegmentSchedule, SegmentSummary};
