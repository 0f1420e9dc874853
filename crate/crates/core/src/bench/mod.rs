//! Error metrics, traces, CSV export and the method comparison harness.

mod csv_io;
mod harness;
mod trace;

pub use csv_io::{export_csv, format_g17, read_csv, write_csv, CSV_HEADER};
pub use harness::{compare, run_method, Budget, ComparisonConfig, Method, MethodOutcome};
pub use trace::{error_metric, normalized_iteration, Metric, MetricKind, Sample, Trace};
