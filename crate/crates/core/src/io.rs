//! Plain-text output: CSV tables with units in the header, JSI matrices and
//! TED traces. Floats are written with 17 significant digits so repeated
//! runs produce identical bytes.

use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::UniformGrid;
use crate::temporal::TedTrace;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV cell: a float in fixed format or verbatim text.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::I(x as i64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::I(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

pub fn csv_string(header: &[&str], rows: &[Vec<Cell>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::invalid(format!("row has {} cells for {} columns", r.len(), header.len())));
        }
        w.write_record(r.iter().map(Cell::render)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    std::fs::write(path, csv_string(header, rows)?)?;
    Ok(())
}

/// Two columns over a uniform grid, the grid converted by `scale`.
pub fn write_series(path: &Path, header: [&str; 2], grid: &UniformGrid, scale: f64, values: &[f64]) -> Result<()> {
    let rows: Vec<Vec<Cell>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![Cell::F(grid.at(i) * scale), Cell::F(*v)])
        .collect();
    write_csv(path, &header, &rows)
}

/// Matrix with a corner label, column axis in the first row and row axis in
/// the first column.
pub fn write_matrix(path: &Path, corner: &str, rows: &[f64], cols: &[f64], values: &[f64]) -> Result<()> {
    if values.len() != rows.len() * cols.len() {
        return Err(Error::invalid("matrix size does not match its axes"));
    }
    let mut header: Vec<String> = vec![corner.to_string()];
    header.extend(cols.iter().map(|c| fmt_f64(*c)));
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let body: Vec<Vec<Cell>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            std::iter::once(Cell::F(*r))
                .chain(values[i * cols.len()..(i + 1) * cols.len()].iter().map(|v| Cell::F(*v)))
                .collect()
        })
        .collect();
    write_csv(path, &h, &body)
}

/// Reads a matrix written by [`write_matrix`]: (row axis, column axis, values).
pub fn read_matrix(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let perr = |m: String| Error::parse(path, m);
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| perr(e.to_string()))?;
    let num = |s: &str| s.parse::<f64>().map_err(|e| perr(format!("'{s}': {e}")));
    let cols = rdr
        .headers()
        .map_err(|e| perr(e.to_string()))?
        .iter()
        .skip(1)
        .map(num)
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| perr(e.to_string()))?;
        let mut it = rec.iter();
        rows.push(num(it.next().unwrap_or(""))?);
        for v in it {
            values.push(num(v)?);
        }
    }
    Ok((rows, cols, values))
}

pub const TED_HEADER: [&str; 3] = ["T_us", "value", "sigma"];

pub fn ted_csv_string(ted: &TedTrace) -> Result<String> {
    let rows: Vec<Vec<Cell>> = (0..ted.grid.len)
        .map(|i| {
            let sigma = ted.sigma.as_ref().map_or(Cell::S(String::new()), |s| Cell::F(s[i]));
            vec![Cell::F(ted.grid.at(i) * 1e6), Cell::F(ted.values[i]), sigma]
        })
        .collect();
    csv_string(&TED_HEADER, &rows)
}

pub fn write_ted(path: &Path, ted: &TedTrace) -> Result<()> {
    std::fs::write(path, ted_csv_string(ted)?)?;
    Ok(())
}

/// Reads `T_us,value[,sigma]`; the delay axis must be uniform.
pub fn read_ted(path: &Path) -> Result<TedTrace> {
    let text = std::fs::read_to_string(path)?;
    parse_ted(&text, path)
}

pub fn parse_ted(text: &str, origin: &Path) -> Result<TedTrace> {
    let perr = |m: String| Error::parse(origin, m);
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| perr(e.to_string()))?.clone();
    if header.get(0) != Some("T_us") || header.get(1) != Some("value") {
        return Err(perr("expected header 'T_us,value[,sigma]'".into()));
    }
    let (mut t, mut v, mut s) = (Vec::new(), Vec::new(), Vec::new());
    let mut any_sigma = false;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| perr(e.to_string()))?;
        let num = |k: usize| -> Result<f64> {
            let f = rec.get(k).unwrap_or("");
            f.parse::<f64>().map_err(|e| perr(format!("row {}: '{f}': {e}", i + 1)))
        };
        t.push(num(0)? * 1e-6);
        v.push(num(1)?);
        match rec.get(2) {
            Some(x) if !x.is_empty() => {
                any_sigma = true;
                s.push(num(2)?);
            }
            _ => s.push(f64::NAN),
        }
    }
    let grid = UniformGrid::from_samples(&t, 1e-6).map_err(|e| perr(e.to_string()))?;
    let sigma = if any_sigma {
        if s.iter().any(|x| x.is_nan()) {
            return Err(perr("sigma column is only partly filled".into()));
        }
        Some(s)
    } else {
        None
    };
    TedTrace::new(grid, v, sigma).map_err(|e| perr(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn ted_round_trip() {
        let g = UniformGrid::new(-2e-6, 1e-7, 41).unwrap();
        let v: Vec<f64> = g.values().iter().map(|t| (-t.abs() * 1e6).exp()).collect();
        let ted = TedTrace::new(g, v, Some(vec![0.1; 41])).unwrap();
        let back = parse_ted(&ted_csv_string(&ted).unwrap(), Path::new("mem")).unwrap();
        assert_eq!(back.values, ted.values);
        assert_eq!(back.sigma, ted.sigma);
        assert!((back.grid.step - g.step).abs() < 1e-12 * g.step);
    }

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let v = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        write_matrix(&p, "signal_Hz\\idler_Hz", &[1.0, 2.0], &[10.0, 20.0, 30.0], &v).unwrap();
        let (r, c, back) = read_matrix(&p).unwrap();
        assert_eq!((r, c, back), (vec![1.0, 2.0], vec![10.0, 20.0, 30.0], v));
    }
}
