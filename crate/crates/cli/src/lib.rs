//! `hdc`: FASTA in, hypervectors, models and TSV reports out.
//!
//! Exit codes: 0 success, 2 input error, 3 configuration or version error,
//! 4 internal invariant violation.

pub mod args;
pub mod commands;
pub mod error;
pub mod fasta;
pub mod residues;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;
pub use commands::{encode_records, read_fasta, run, Provenance};
pub use error::{exit, CliError, Result};

/// Parse arguments, run, report errors on stderr and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    exit::OK
                }
                _ => exit::CONFIG,
            };
        }
    };
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => exit::OK,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => exit::INTERNAL,
    }
}
