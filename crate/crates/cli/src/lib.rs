//! Command-line front end and acceptance suites.

pub mod args;
pub mod commands;
pub mod error;
pub mod marker;
pub mod plot;
pub mod report;
pub mod suites;
