//! Command-line front end: configuration, subcommands and the acceptance
//! checks.

pub mod commands;
pub mod config;
pub mod verify;

pub use commands::{
    dispatch, EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_UNCONVERGED, EXIT_VERIFY, OUT_ENV,
};
pub use config::{ConfigError, RunConfig};

/// Runs `argv` (argv[0] is the program name) against stdout and stderr and
/// returns the exit code.
pub fn run_command(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch(argv, &mut stdout.lock(), &mut stderr.lock())
}
