//! `strategy,n,seed,coverage,steps,wall_ms` files.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::sweep::{SweepResult, SweepRow};
use crate::error::{Error, Result};

pub const HEADER: [&str; 6] = ["strategy", "n", "seed", "coverage", "steps", "wall_ms"];

/// Writes rows one at a time, flushing after each so a crash leaves every
/// finished row on disk.
pub struct RowWriter<W: Write> {
    inner: csv::Writer<W>,
    path: PathBuf,
}

impl<W: Write> RowWriter<W> {
    pub fn new(sink: W, path: &Path) -> Result<Self> {
        let mut w = RowWriter {
            inner: csv::WriterBuilder::new().has_headers(false).from_writer(sink),
            path: path.to_path_buf(),
        };
        w.record(HEADER.iter().map(|s| s.to_string()).collect())?;
        Ok(w)
    }

    fn csv_err(&self, source: csv::Error) -> Error {
        Error::Csv {
            path: self.path.clone(),
            source,
        }
    }

    fn record(&mut self, fields: Vec<String>) -> Result<()> {
        self.inner.write_record(&fields).map_err(|e| self.csv_err(e))?;
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }

    pub fn write(&mut self, row: &SweepRow) -> Result<()> {
        self.record(vec![
            row.strategy.name().to_string(),
            row.n.to_string(),
            row.seed.to_string(),
            // Shortest representation that parses back to the same f64.
            row.coverage.to_string(),
            row.steps.to_string(),
            row.wall_ms.map(|v| v.to_string()).unwrap_or_default(),
        ])
    }
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = RowWriter::new(file, path)?;
    for row in &result.rows {
        w.write(row)?;
    }
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, path)
}

pub fn parse_csv<R: std::io::Read>(input: R, path: &Path) -> Result<SweepResult> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let bad = |line: u64, msg: String| Error::Config(format!("{}:{line}: {msg}", path.display()));
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(bad(1, format!("expected header {}, found {}", HEADER.join(","), header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| record.get(k).unwrap_or("");
        let num = |k: usize| -> Result<u64> { field(k).parse().map_err(|e| bad(line, format!("{}: {e}", HEADER[k]))) };
        let coverage: f64 = field(3).parse().map_err(|e| bad(line, format!("coverage: {e}")))?;
        if !(0.0..=1.0).contains(&coverage) {
            return Err(bad(line, format!("coverage {coverage} outside [0, 1]")));
        }
        rows.push(SweepRow {
            strategy: field(0).parse()?,
            n: num(1)? as usize,
            seed: num(2)?,
            coverage,
            steps: num(4)? as usize,
            wall_ms: if field(5).is_empty() { None } else { Some(num(5)?) },
        });
    }
    Ok(SweepResult { rows })
}
