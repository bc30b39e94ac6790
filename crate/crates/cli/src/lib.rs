//! Std companion to `dagum-ci-core`: income file ingestion, Monte Carlo
//! coverage studies, output records and the `dagum-ci` command line.

pub mod app;
pub mod data;
pub mod mc;
pub mod output;
