//! CSV output: one row per grid point, full-precision decimal floats,
//! undefined correlations as empty fields and failed points tagged `failed`.

use std::io::{Read, Write};
use std::path::Path;

use blockade::{Error, Result};

use crate::run::{Column, SweepResult};

pub const FAILED_TAG: &str = "failed";

/// Writes `result` as CSV to any sink.
pub fn write_csv_to<W: Write>(result: &SweepResult, sink: W) -> Result<()> {
    if result.records.is_empty() {
        return Err(Error::param("records", "nothing to write"));
    }
    let io = |e: csv::Error| Error::Io { path: "<csv>".into(), message: e.to_string() };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let mut header: Vec<String> = result.axes.iter().map(|p| p.name().to_string()).collect();
    header.extend(Column::ALL.iter().map(|c| c.name().to_string()));
    header.push("tag".into());
    header.push("residual".into());
    w.write_record(&header).map_err(io)?;
    for r in &result.records {
        let mut row: Vec<String> = r.coords.iter().map(|x| x.to_string()).collect();
        match &r.outcome {
            Ok(o) => {
                row.extend(Column::ALL.iter().map(|c| c.value(&o.observables).map_or_else(String::new, |v| v.to_string())));
                row.push(o.observables.tag.map_or_else(String::new, |t| t.label().to_string()));
                row.push(o.residual.to_string());
            }
            Err(_) => {
                row.extend(Column::ALL.iter().map(|_| String::new()));
                row.push(FAILED_TAG.into());
                row.push(String::new());
            }
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io { path: "<csv>".into(), message: e.to_string() })
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(result, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { message, .. } => Error::Io { path: path.display().to_string(), message },
        other => other,
    })
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub coords: Vec<f64>,
    /// In [`Column::ALL`] order.
    pub values: Vec<Option<f64>>,
    pub tag: String,
    pub residual: Option<f64>,
}

impl CsvRow {
    pub fn value(&self, c: Column) -> Option<f64> {
        let k = Column::ALL.iter().position(|x| *x == c).expect("column listed");
        self.values[k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub axes: Vec<String>,
    pub rows: Vec<CsvRow>,
}

pub fn read_csv_from<R: Read>(source: R) -> Result<CsvTable> {
    let bad = |m: String| Error::Config { line: None, message: m };
    let mut rdr = csv::Reader::from_reader(source);
    let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    let fixed = Column::ALL.len() + 2;
    if header.len() < fixed + 1 {
        return Err(bad(format!("header has {} columns, expected at least {}", header.len(), fixed + 1)));
    }
    let n_axes = header.len() - fixed;
    let num = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| bad(format!("bad number {s:?}")))
        }
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let fields: Vec<&str> = rec.iter().collect();
        let coords = fields[..n_axes]
            .iter()
            .map(|s| num(s)?.ok_or_else(|| bad("empty axis value".into())))
            .collect::<Result<Vec<_>>>()?;
        let values = fields[n_axes..n_axes + Column::ALL.len()].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
        rows.push(CsvRow {
            coords,
            values,
            tag: fields[fields.len() - 2].to_string(),
            residual: num(fields[fields.len() - 1])?,
        });
    }
    Ok(CsvTable { axes: header[..n_axes].to_vec(), rows })
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file)
}
