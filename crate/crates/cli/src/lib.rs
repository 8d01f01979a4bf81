//! Front end for `symideal-core`: verification suites, sweeps, and the JSON
//! commands behind the `symideal` binary.

pub mod commands;
pub mod output;
pub mod report;
pub mod suites;
pub mod sweep;
