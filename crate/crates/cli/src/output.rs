//! CSV tables and gnuplot scripts.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64.
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Csv {
    pub fn new(header: Vec<String>) -> Self {
        Csv {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(csv_err)?;
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Config(format!("csv: {other:?}")),
    }
}

/// Gnuplot script plotting every column except stderr columns against the
/// first, with error bars where a matching stderr column exists.
pub fn gnuplot_script(csv_path: &Path, title: &str, header: &[String]) -> String {
    let file = csv_path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut plots = Vec::new();
    for (i, name) in header.iter().enumerate().skip(1) {
        if name.contains("stderr") {
            continue;
        }
        let err = header.iter().position(|h| {
            h.strip_prefix("mc_stderr_")
                .is_some_and(|rest| name.strip_prefix("mc_") == Some(rest))
        });
        let spec = match err {
            Some(j) => format!(
                "data using 1:{}:{} with yerrorlines title '{name}'",
                i + 1,
                j + 1
            ),
            None => format!("data using 1:{} with linespoints title '{name}'", i + 1),
        };
        plots.push(spec);
    }
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("data = '{file}'\n"));
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str(&format!(
        "set xlabel '{}'\n",
        header.first().map_or("", String::as_str)
    ));
    s.push_str("set termoption noenhanced\nset key outside right\nset grid\n");
    if plots.is_empty() {
        s.push_str("# no data columns\n");
    } else {
        s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_full_precision() {
        let x = 0.1 + 0.2;
        let s = Cell::Num(x).render();
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(Cell::Int(3).render(), "3");
    }

    #[test]
    fn script_pairs_error_columns() {
        let header: Vec<String> = ["N", "exact_a", "mc_a", "mc_stderr_a"]
            .map(String::from)
            .into();
        let s = gnuplot_script(Path::new("/tmp/x.csv"), "t", &header);
        assert!(s.contains("using 1:3:4 with yerrorlines"));
        assert!(s.contains("using 1:2 with linespoints"));
        assert!(!s.contains("using 1:4 "));
    }
}
