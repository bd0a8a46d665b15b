//! File formats, run manifests, concurrent drivers and the command line of
//! `rydswap`, on top of the `no_std` core in `rydswap-core`.

pub mod cli;
pub mod error;
pub mod format;
pub mod manifest;
pub mod parallel;

pub use error::CliError;
