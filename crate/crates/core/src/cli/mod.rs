//! Command-line front end for the `capmimo` binary.

pub mod config;
pub mod run;

use std::io::Write;

use clap::Parser;

pub use config::{parse_config, Cli, Command, Flags, RunConfig, SweepKind};
pub use run::{read_rows, write_rows, CliError, RunOutcome, CSV_COLUMNS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CELLS: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable selecting the worker thread count; 0 means auto.
pub const THREADS_ENV: &str = "CAPMIMO_THREADS";

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got {raw:?}"))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    faer::set_global_parallelism(if n == 1 { faer::Par::Seq } else { faer::Par::rayon(n) });
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_CONFIG;
    }
    let (sweep, flags) = cli.command.split();
    let config = match parse_config(sweep, &flags) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let _ = writeln!(stdout, "# resolved configuration\n{}", config.to_toml());
    match run::run(&config, stdout) {
        Ok(outcome) => {
            if let Some(path) = &outcome.output {
                let _ = writeln!(stdout, "wrote {}", path.display());
            }
            if outcome.failed_cells > 0 {
                let _ = writeln!(stderr, "{} cell(s) failed", outcome.failed_cells);
            }
            outcome.exit_code(config.keep_going)
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                CliError::Io { .. } => EXIT_IO,
                CliError::Csv(ref c) if c.is_io_error() => EXIT_IO,
                _ => EXIT_CONFIG,
            }
        }
    }
}
