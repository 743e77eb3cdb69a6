//! Command-line front end: instance files, experiments, the acceptance
//! suite and report tables.

pub mod acceptance;
pub mod caps;
pub mod commands;
pub mod experiments;
pub mod report;
