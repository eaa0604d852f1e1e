//! Seeded simulation designs and the replicated comparison harness.

mod design;
mod experiment;
mod generate;

pub use design::{BlockSpec, BlockStructure, BlockTypes, CoefficientSpec, SimDesign, Term};
pub use experiment::{
    instance_seed, run_experiment, write_records_csv, write_summary_csv, Case, ExperimentConfig,
    ExperimentResult, ReplicateRecord, SummaryRow,
};
pub use generate::{
    binary_probability, draw_predictors, generate, linear_predictor, signal_variance,
    PredictorDraw, RealizedCoefficient, SimInstance, CALIBRATION_ROWS,
};
