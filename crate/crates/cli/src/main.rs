use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use greedylab_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let (payload, code) = match run(&cli) {
        Ok(out) => (out, 0),
        Err(CliError::VerifyFailed { failed, total, payload }) => {
            eprintln!("error: {failed} of {total} suites failed");
            (payload, 1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (String::new(), e.exit_code())
        }
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(payload.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
