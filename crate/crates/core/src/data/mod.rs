//! Mixed-type datasets, standardization and group bookkeeping.

mod dataset;
mod ingest;
mod partition;
mod standardize;

pub use dataset::{Column, Dataset, ResponseKind, VariableKind};
pub use ingest::{
    read_dataset, read_dataset_from, write_dataset, write_dataset_to, ColumnSpec, IngestReport,
    Schema,
};
pub use partition::{expand_groups, group_norms, Coefficients, Partition};
pub use standardize::{standardize, ColumnMap, StandardizedMatrix};
