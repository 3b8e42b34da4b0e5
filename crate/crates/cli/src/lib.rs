//! Configuration, sweeps, figure presets and regression checks for the
//! `ehcr` command-line tool.

pub mod alpha_scan;
pub mod app;
pub mod config;
pub mod csv;
pub mod figures;
pub mod run;
pub mod validate;
