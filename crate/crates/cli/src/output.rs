use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Where and how the rows of a command are written.
pub struct Sink {
    path: Option<PathBuf>,
    format: Format,
    header: bool,
}

impl Sink {
    pub fn new(path: Option<PathBuf>, format: Format, header: bool) -> Self {
        Self { path, format, header }
    }

    /// Writes flat records; every row must share the keys of the first.
    pub fn write(&self, rows: &[Value]) -> io::Result<()> {
        let out: Box<dyn Write> = match &self.path {
            Some(path) => Box::new(File::create(path)?),
            None => Box::new(io::stdout().lock()),
        };
        let mut out = BufWriter::new(out);
        match self.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, rows)?;
                writeln!(out)?;
            }
            Format::Csv => {
                if self.header {
                    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
                    writeln!(out, "# generated at unix time {secs}")?;
                }
                write_csv(&mut out, rows)?;
            }
        }
        out.flush()
    }
}

fn write_csv<W: Write>(out: W, rows: &[Value]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let Some(Value::Object(first)) = rows.first() else {
        return Ok(());
    };
    w.write_record(first.keys())?;
    for row in rows {
        let Value::Object(map) = row else {
            continue;
        };
        w.write_record(map.values().map(cell))?;
    }
    w.flush()
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
