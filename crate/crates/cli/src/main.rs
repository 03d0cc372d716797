use std::io::Write;
use std::process::ExitCode;

use avwc_cli::args::Cli;
use avwc_cli::{run, CliError};
use clap::Parser;

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("AVWC_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "AVWC_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn io_error(path: &str) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

fn main_inner() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    configure_threads()?;
    let (config, csv_path) = cli.into_config();
    let out = run(&config)?;
    match csv_path.as_deref() {
        Some("-") => {
            eprint!("{}", out.text);
            std::io::stdout()
                .write_all(out.csv.as_bytes())
                .map_err(io_error("<stdout>"))?;
        }
        Some(path) => {
            print!("{}", out.text);
            std::fs::write(path, &out.csv).map_err(io_error(path))?;
        }
        None => print!("{}", out.text),
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
