//! Experiment harness: law-of-large-numbers, central-limit and bounded-difference runs over
//! many seeded trials, plus goodness-of-fit utilities.

mod gof;
mod harness;
mod report;

pub use gof::{
    chi_square_gof, chi_square_homogeneity, chi_square_signatures, tv_distance,
    tv_distance_truncated, ChiSquareResult, SignatureHistogram,
};
pub use harness::{
    corner_weight_limit, lln_limit, map_trials, run_bounded_difference_experiment,
    run_clt_experiment, run_lln_experiment, ExperimentConfig, Tolerances, REFERENCE_DRAWS,
};
pub use report::{
    BoundedSummary, CovarianceComparison, CriterionResult, ExperimentKind, ExperimentReport,
    NormalityCheck, RunMetadata, REPORT_SCHEMA,
};
