//! Optimization loop, metrics, studies and result files.

pub mod bench;
pub mod config;
pub mod metrics;
pub mod output;
pub mod run;
pub mod studies;

pub use bench::{run_bench, run_directory, BenchConfig};
pub use config::{NoiseConfig, RunConfig, Strategy};
pub use metrics::{rhv, RhvScale, REFERENCE_POINT_OFFSET};
pub use output::{emit_results, read_results, rhv_series, SeriesRow, SummaryRow};
pub use run::{run_bo, run_bo_partial, IterationRecord, PhaseTimings, RunFailure, RunHistory, RunMeta};
pub use studies::{
    estimator_study, gap_study, simplex_frontier, simplex_volume, summarize_gap,
    EstimatorRow, EstimatorStudyConfig, GapRow, GapSummary, StudyEstimator,
};
