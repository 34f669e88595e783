use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::args::{Cli, Emit};
use crate::CliResult;

/// A flat table for `--emit csv` and for CSV artifacts.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, w: W) -> CliResult<()> {
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
        out.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            out.write_record(r).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &std::path::Path) -> CliResult<()> {
        self.write(std::fs::File::create(path)?)
    }
}

fn csv_err(e: csv::Error) -> crate::CliError {
    crate::CliError::Core(e.into())
}

/// Shortest text that parses back to the same double.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub struct Report {
    pub seed: Option<u64>,
    pub results: Value,
    pub warnings: Vec<String>,
    pub table: Table,
}

#[derive(Serialize)]
struct Envelope<'a> {
    config: &'a Cli,
    seed: Option<u64>,
    results: &'a Value,
    warnings: &'a [String],
    timing_ms: f64,
}

pub fn emit(cli: &Cli, report: &Report, timing_ms: f64) -> CliResult<()> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match cli.emit {
        Emit::Json => {
            let env = Envelope {
                config: cli,
                seed: report.seed,
                results: &report.results,
                warnings: &report.warnings,
                timing_ms,
            };
            serde_json::to_writer_pretty(&mut lock, &env)?;
            writeln!(lock)?;
        }
        Emit::Csv => report.table.write(&mut lock)?,
    }
    Ok(())
}
