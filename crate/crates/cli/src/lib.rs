//! Command-line frontend: argument parsing, input resolution and output
//! rendering around `blockwatch-core`.

mod args;
mod commands;

use std::ffi::OsString;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;

/// Process exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Bad or missing arguments, or a parameter outside its valid range.
pub const EXIT_USAGE: i32 = 1;
/// Input that cannot be read or decoded, or an output write failure.
pub const EXIT_IO: i32 = 2;

/// Parses `args` (program name first) and runs the selected subcommand,
/// writing results to standard output.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_cli_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run_cli`] with explicit output streams.
pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render().to_string();
            if informational {
                let _ = out.write_all(rendered.as_bytes());
                return EXIT_OK;
            }
            let _ = err.write_all(rendered.as_bytes());
            return EXIT_USAGE;
        }
    };
    match commands::execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
