//! Library surface of the `solwarp` CLI: expression language, run
//! configuration, task runner, built-in suites and report emission.

pub mod config;
pub mod expr;
pub mod report;
pub mod runner;
pub mod suites;
