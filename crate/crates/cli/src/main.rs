mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, ConfigError, Format};
use commands::Failure;

const EXIT_CONFIG: u8 = 1;
const EXIT_FAILED: u8 = 2;

fn threads(flag: Option<usize>) -> Result<usize, ConfigError> {
    let env = match std::env::var("NICETOP_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| ConfigError(format!("NICETOP_THREADS={v:?} is not a count")))?),
        Err(_) => None,
    };
    let n = env.or(flag).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if n == 0 {
        return Err(ConfigError("thread count must be at least 1".into()));
    }
    Ok(n)
}

fn run(cli: &Cli) -> Result<report::Report, Failure> {
    let n = threads(cli.threads)?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Run(e.to_string()))?;
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::Example(a) => commands::example(a),
        Command::Search { what } => commands::search(what),
        Command::Spectra { what } => commands::spectra(what),
    }?;
    report.timing.total_ms = start.elapsed().as_millis();
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG);
            }
        }
        None => print!("{text}"),
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
