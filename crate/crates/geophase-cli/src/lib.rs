//! Experiment layer over `geophase-core`: configuration, composed-path
//! pipelines, and CSV/JSON emission for the `geophase` binary.

pub mod config;
pub mod experiments;
pub mod output;
