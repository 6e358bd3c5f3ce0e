//! Evaluation metrics and the replicated simulation benchmark.

mod harness;
mod metrics;

pub use harness::{
    fit_method, run_benchmark, summarize, write_records_csv, write_summary_csv, BenchConfig, BenchmarkRecord,
    BenchmarkReport, Method, MethodFit, Stat, SummaryRow,
};
pub use metrics::{auc, fp_fn, is_selected};
