//! File formats, JSON reports, verification suites and the command-line
//! driver on top of `fvkit-core`.

pub mod cli;
pub mod formats;
pub mod report;
pub mod run;
pub mod suites;

pub use fvkit_core as core;
