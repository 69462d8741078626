//! Command-line front end: JSON model files, command dispatch and reports.

pub mod app;
pub mod model;
pub mod report;
