//! Benchmark runner, persisted traces, SVG figures and verification suites
//! for `vqnhite-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod plot;
pub mod runner;
pub mod verify;

pub use config::{FieldMode, FieldSpec, MethodChoice, ModeChoice, RunConfig};
pub use error::{BenchError, Result};
pub use plot::{emit_plot, render_svg};
pub use runner::{load, persist, run_benchmark, summarize, FidelityTrace, Record, SummaryRow};
pub use verify::{run_suite, Check, Suite};
