//! Command line, file formats and end-to-end pipelines for learning multiple
//! hyperparameter defaults. The algorithms live in `default-miner-core`.

pub mod atomic;
pub mod cli;
pub mod formats;
pub mod pipeline;
pub mod synthetic;

pub use formats::FormatError;
