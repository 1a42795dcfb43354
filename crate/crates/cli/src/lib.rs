//! Command-line harness around `gvi-core`: configuration, artifact writing,
//! hypothesis checks and figure presets.

// `!(x > 0)` style guards also reject NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod repro;
pub mod run;

use clap::Parser;

pub use error::{CliError, Exit};

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Config.code() } else { Exit::Success.code() };
            let _ = e.print();
            return code;
        }
    };
    match cli::dispatch(parsed) {
        Ok(exit) => exit.code(),
        Err(e) => {
            log::error!("{e}");
            Exit::Config.code()
        }
    }
}
