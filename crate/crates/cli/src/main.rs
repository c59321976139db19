use std::process::ExitCode;

use clap::Parser;
use qhlat_cli::args::Cli;
use qhlat_cli::{emit, run, write_record};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        emit(&out.bytes, cli.common.out.as_deref())?;
        if let Some(path) = &cli.common.record {
            write_record(&out.record, path)?;
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
