//! Configuration, serialization and the end-to-end pipeline.

pub mod config;
pub mod csv;
pub mod pipeline;
pub mod touchstone;

pub use config::DesignConfig;
pub use csv::{render_csv, write_csv, CSV_HEADER};
pub use pipeline::{compute, run_pipeline, DesignReport, PipelineError, Stage};
pub use touchstone::{
    parse_touchstone, read_touchstone, render_touchstone, write_touchstone, TouchstoneData,
};
