// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use choquet_cli::{run, workers_from_env, Cli, CliError, RunConfig, EXIT_INVALID};
use clap::Parser;

fn fail(e: &CliError) -> ExitCode {
    let _ = std::io::stderr().write_all(e.to_json().as_bytes());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let workers = match workers_from_env() {
        Ok(w) => w,
        Err(e) => return fail(&e),
    };
    if let Some(n) = workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&CliError::Internal(e.to_string()));
        }
    }
    let outcome = catch_unwind(AssertUnwindSafe(|| RunConfig::from_cli(cli).and_then(|cfg| run(&cfg))));
    match outcome {
        Ok(Ok(Some(json))) => {
            let _ = std::io::stdout().write_all(json.as_bytes());
            ExitCode::SUCCESS
        }
        Ok(Ok(None)) => ExitCode::SUCCESS,
        Ok(Err(e)) => fail(&e),
        Err(_) => fail(&CliError::Internal("unexpected panic".into())),
    }
}
