//! Two-stage group variable selection.
//!
//! Stage one discovers groups among the predictors: optional marginal
//! screening followed by hierarchical clustering of mixed quantitative and
//! qualitative variables, with the number of clusters chosen by bootstrap
//! stability. Stage two fits a group-penalized linear or logistic model
//! over the discovered groups and picks λ by cross-validation.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the precision.
//!
//! ```no_run
//! use grpsel::data::{read_dataset, Schema};
//! use grpsel::two_stage::{run_two_stage, TwoStageConfig};
//!
//! let schema = Schema::read("schema.json".as_ref())?;
//! let (d, _) = read_dataset::<f64>("data.csv".as_ref(), &schema)?;
//! let report = run_two_stage(&d, &TwoStageConfig::default())?;
//! println!("{:?}", report.selected_names);
//! # Ok::<(), grpsel::Error>(())
//! ```

pub mod cli;
pub mod cluster;
pub mod data;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod penalty;
pub mod scalar;
pub mod screen;
pub mod sim;
pub mod smote;
pub mod solver;
pub mod two_stage;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dataset64 = data::Dataset<f64>;
pub type Dataset32 = data::Dataset<f32>;
pub type StandardizedMatrix64 = data::StandardizedMatrix<f64>;
pub type StandardizedMatrix32 = data::StandardizedMatrix<f32>;
pub type PenaltySpec64 = penalty::PenaltySpec<f64>;
pub type PenaltySpec32 = penalty::PenaltySpec<f32>;
pub type GroupPenaltySpec64 = solver::GroupPenaltySpec<f64>;
pub type GroupPenaltySpec32 = solver::GroupPenaltySpec<f32>;
pub type FitResult64 = solver::FitResult<f64>;
pub type FitResult32 = solver::FitResult<f32>;
pub type CvResult64 = solver::CvResult<f64>;
pub type CvResult32 = solver::CvResult<f32>;
pub type TwoStageReport64 = two_stage::TwoStageReport<f64>;
pub type TwoStageReport32 = two_stage::TwoStageReport<f32>;
pub type SimInstance64 = sim::SimInstance<f64>;
pub type SimInstance32 = sim::SimInstance<f32>;
