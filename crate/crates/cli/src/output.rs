//! Output plumbing: format selection, stdout-or-file sinks, and the flat
//! CSV layout shared by the point-count commands.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::ValueEnum;
use ffquat::classes::Rational;
use ffquat::gross::ScanRow;
use ffquat::parse::format_poly;
use ffquat::Poly;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// How a command actually renders: the selectable formats plus the plain
/// text some commands default to.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Render {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn render(self) -> Render {
        match self {
            Format::Csv => Render::Csv,
            Format::Json => Render::Json,
        }
    }
}

/// Where a command's primary output goes. Everything is buffered into one
/// string first so a failed run never leaves a half-written file.
pub struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Sink {
        Sink { out }
    }

    pub fn write(&self, body: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, body)
                .with_context(|| format!("writing {}", path.display()))?,
            None => print!("{body}"),
        }
        Ok(())
    }
}

pub fn poly_str(p: &Poly) -> String {
    format_poly(p, 't')
}

pub fn mass_str(mass: &Rational) -> String {
    if mass.den() == 1 {
        mass.num().to_string()
    } else {
        format!("{}/{}", mass.num(), mass.den())
    }
}

pub fn json_line<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    Ok(body)
}

/// Header for the scan layout: per-class columns expand with the class count.
pub fn scan_csv_header(n: usize) -> String {
    let mut cols: Vec<String> = vec![
        "q".into(),
        "P_0".into(),
        "D".into(),
        "degD".into(),
        "hD".into(),
        "n".into(),
    ];
    cols.extend((1..=n).map(|i| format!("N_{i}")));
    cols.extend((1..=n).map(|i| format!("m_{i}")));
    cols.extend(["discrepancy".into(), "envelope".into(), "runtime_ms".into()]);
    cols.join(",")
}

pub fn scan_csv_row(q: u64, p0: &Poly, row: &ScanRow) -> String {
    let mut cols: Vec<String> = vec![
        q.to_string(),
        poly_str(p0),
        poly_str(&row.discriminant),
        row.degree.to_string(),
        row.class_number.to_string(),
        row.counts.len().to_string(),
    ];
    cols.extend(row.counts.iter().map(u64::to_string));
    cols.extend(row.multiplicities.iter().map(u64::to_string));
    cols.push(row.discrepancy.to_string());
    cols.push(row.envelope.to_string());
    cols.push(row.runtime_ms.to_string());
    cols.join(",")
}
