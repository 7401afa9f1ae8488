//! Config-driven command-line front end for the product-formula lab.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod report;
pub mod runner;
