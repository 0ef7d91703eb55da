mod args;
mod output;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Format};

pub(crate) const VERSION: &str = env!("CARGO_PKG_VERSION");

fn write_output(cfg: &run::RunConfig, table: &output::Table, out: Box<dyn Write>) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    match cfg.format {
        Format::Csv => table.write_csv(&mut out).map_err(io::Error::other)?,
        Format::Json => {
            let config = serde_json::to_value(cfg).map_err(io::Error::other)?;
            serde_json::to_writer_pretty(&mut out, &table.to_json(config))?;
            writeln!(out)?;
        }
    }
    out.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, opts) = cli.command.split();
    let path = opts.out.clone();
    let cfg = match run::resolve(kind, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let table = run::run(&cfg);
    let sink: Box<dyn Write> = match &path {
        Some(p) => match File::create(p) {
            Ok(f) => Box::new(f),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", p.display());
                return ExitCode::FAILURE;
            }
        },
        None => Box::new(io::stdout().lock()),
    };
    if let Err(e) = write_output(&cfg, &table, sink) {
        eprintln!("error: writing output: {e}");
        return ExitCode::FAILURE;
    }
    for f in &table.failures {
        eprintln!("cell failed: {f}");
    }
    if table.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{} of {} cells failed", table.failures.len(), table.rows.len());
        ExitCode::FAILURE
    }
}
