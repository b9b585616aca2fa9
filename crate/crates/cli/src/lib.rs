//! Experiment runner for the `holonoise` command-line tool.

pub mod commands;
pub mod config;
pub mod output;
pub mod sweep;
pub mod validate;
