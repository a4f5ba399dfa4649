//! File formats, emitters, the serve-mode protocol and subcommand
//! implementations behind the `vinelock` binary.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod emit;
pub mod error;
pub mod files;
pub mod protocol;
pub mod scenario;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
