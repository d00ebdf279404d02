//! Command-line front end: config ingestion, analysis commands, reports,
//! and graph exports.

pub mod commands;
pub mod config;
pub mod export;
pub mod report;
