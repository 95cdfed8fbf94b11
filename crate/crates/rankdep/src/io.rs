//! CSV and JSON file formats.
//!
//! Input CSVs may start with one header row, recognised when none of its
//! fields parses as a number. Numbers are written with Rust's shortest
//! round-trip formatting, so every `f64` reads back bit-exact.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rankdep_core::copula::{AssociationMeasures, EmpiricalCopulaGrid};
use rankdep_core::mc::QuantileTable;
use rankdep_core::survival::{CompetingRisksData, Record, StepSurvivalEstimate};
use rankdep_core::BivariateSample;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount { line: u64, expected: usize, found: usize },
    #[error("line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Data(#[from] rankdep_core::Error),
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| IoError::Io { path: path.to_owned(), source })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| IoError::Io { path: path.to_owned(), source })
}

/// Rows of `width` numeric fields, after dropping an optional header.
/// Each row comes with its 1-based line number.
fn numeric_rows<R: Read>(reader: R, width: usize) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    let mut first = true;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IoError::Csv { line, source: e }
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != width {
            return Err(IoError::ColumnCount { line, expected: width, found: rec.len() });
        }
        let parsed: Vec<Option<f64>> = rec.iter().map(|f| f.parse::<f64>().ok()).collect();
        if std::mem::take(&mut first) && parsed.iter().all(Option::is_none) {
            continue;
        }
        let mut values = Vec::with_capacity(width);
        for (field, v) in rec.iter().zip(parsed) {
            values.push(v.ok_or_else(|| IoError::Parse { line, message: format!("not a number: {field:?}") })?);
        }
        rows.push((line, values));
    }
    Ok(rows)
}

pub fn parse_sample_csv<R: Read>(reader: R) -> Result<BivariateSample> {
    let rows = numeric_rows(reader, 2)?;
    if let Some((line, _)) = rows.iter().find(|(_, v)| !v.iter().all(|x| x.is_finite())) {
        return Err(IoError::Parse { line: *line, message: "non-finite value".into() });
    }
    Ok(BivariateSample::new(rows.into_iter().map(|(_, v)| (v[0], v[1])).collect())?)
}

/// Two numeric columns `x, y`.
pub fn read_sample_csv(path: &Path) -> Result<BivariateSample> {
    parse_sample_csv(open(path)?)
}

pub fn parse_competing_risks_csv<R: Read>(reader: R) -> Result<CompetingRisksData> {
    let mut records = Vec::new();
    for (line, v) in numeric_rows(reader, 2)? {
        let delta = match v[1] {
            1.0 => true,
            0.0 => false,
            d => return Err(IoError::Parse { line, message: format!("delta must be 0 or 1, got {d}") }),
        };
        records.push(Record { time: v[0], delta });
    }
    Ok(CompetingRisksData::new(records)?)
}

/// Columns `time, delta` with `delta` in `{0, 1}`.
pub fn read_competing_risks_csv(path: &Path) -> Result<CompetingRisksData> {
    parse_competing_risks_csv(open(path)?)
}

pub fn table_to_json(table: &QuantileTable) -> Result<String> {
    Ok(serde_json::to_string_pretty(table)?)
}

pub fn table_from_json(text: &str) -> Result<QuantileTable> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_table(path: &Path) -> Result<QuantileTable> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|source| IoError::Io { path: path.to_owned(), source })?;
    table_from_json(&text)
}

pub fn write_table(path: &Path, table: &QuantileTable) -> Result<()> {
    write_text(path, &(table_to_json(table)? + "\n"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|()| w.flush())
        .map_err(|source| IoError::Io { path: path.to_owned(), source })
}

/// A `write` target: a file, or stdout when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub statistic: String,
    pub n: usize,
    pub r: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub seed: u64,
    pub power: f64,
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|source| IoError::Io { path: PathBuf::from("<output>"), source })
}

fn csv_err(source: csv::Error) -> IoError {
    IoError::Csv { line: 0, source }
}

/// Writes power rows sorted by `r`; rows with equal `r` keep their order.
pub fn write_power_csv<W: Write>(w: W, rows: &[PowerRow]) -> Result<()> {
    let mut sorted: Vec<&PowerRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.r.total_cmp(&b.r));
    let mut out = csv_writer(w);
    for row in sorted {
        out.serialize(row).map_err(csv_err)?;
    }
    finish(out)
}

pub fn read_power_csv<R: Read>(r: R) -> Result<Vec<PowerRow>> {
    #[derive(serde::Deserialize)]
    struct Row {
        statistic: String,
        n: usize,
        r: f64,
        alpha: f64,
        iterations: usize,
        seed: u64,
        power: f64,
    }
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize::<Row>()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            Ok(PowerRow {
                statistic: row.statistic,
                n: row.n,
                r: row.r,
                alpha: row.alpha,
                iterations: row.iterations,
                seed: row.seed,
                power: row.power,
            })
        })
        .collect()
}

/// Long format `i, j, u, v, C` over the full `(n + 1)^2` lattice.
pub fn write_copula_grid<W: Write>(w: W, grid: &EmpiricalCopulaGrid) -> Result<()> {
    let n = grid.n();
    let mut out = csv_writer(w);
    out.write_record(["i", "j", "u", "v", "C"]).map_err(csv_err)?;
    for i in 0..=n {
        for j in 0..=n {
            out.write_record([
                i.to_string(),
                j.to_string(),
                (i as f64 / n as f64).to_string(),
                (j as f64 / n as f64).to_string(),
                grid.cdf(i, j).to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    finish(out)
}

pub fn measures_json(m: &AssociationMeasures) -> Result<String> {
    Ok(serde_json::to_string_pretty(m)?)
}

/// Columns `t, F_hat, G_hat`, plus `var_F` when a variance curve is given.
pub fn write_survival_csv<W: Write>(w: W, est: &StepSurvivalEstimate, var_f: Option<&[f64]>) -> Result<()> {
    let mut out = csv_writer(w);
    let mut header = vec!["t", "F_hat", "G_hat"];
    if var_f.is_some() {
        header.push("var_F");
    }
    out.write_record(&header).map_err(csv_err)?;
    for (k, &t) in est.grid.iter().enumerate() {
        let mut row = vec![t.to_string(), est.f_hat[k].to_string(), est.g_hat[k].to_string()];
        if let Some(v) = var_f {
            row.push(v[k].to_string());
        }
        out.write_record(&row).map_err(csv_err)?;
    }
    finish(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rankdep_core::stats::StatisticId;

    #[test]
    fn header_is_optional() {
        let a = parse_sample_csv("x,y\n1,5\n2,3\n".as_bytes()).unwrap();
        let b = parse_sample_csv("1,5\n2,3\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.pairs(), &[(1.0, 5.0), (2.0, 3.0)]);
    }

    #[test]
    fn bad_number_reports_its_line() {
        match parse_sample_csv("1,abc\n".as_bytes()) {
            Err(IoError::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_sample_csv("x,y\n1,2\n3,4\n5,?\n".as_bytes()) {
            Err(IoError::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_width_is_a_column_count_error() {
        match parse_sample_csv("1,2\n3,4,5\n".as_bytes()) {
            Err(IoError::ColumnCount { line: 2, expected: 2, found: 3 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn competing_risks_rows() {
        let d = parse_competing_risks_csv("time,delta\n1.5,1\n2,0\n".as_bytes()).unwrap();
        assert_eq!(d.records()[1], Record { time: 2.0, delta: false });
        assert!(matches!(parse_competing_risks_csv("1,2\n".as_bytes()), Err(IoError::Parse { line: 1, .. })));
    }

    #[test]
    fn table_round_trip_is_exact() {
        let t = QuantileTable {
            statistic: StatisticId::T4,
            n: 30,
            probs: vec![0.025, 0.5, 0.975],
            values: vec![0.1 + 0.2, std::f64::consts::PI * 1e3, 1.0 / 3.0],
            iterations: 10_000,
            seed: u64::MAX,
        };
        let back = table_from_json(&table_to_json(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        for (a, b) in back.values.iter().zip(&t.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn power_rows_are_sorted_by_r() {
        let row = |r: f64| PowerRow { statistic: "T1".into(), n: 30, r, alpha: 0.05, iterations: 10, seed: 1, power: 0.5 };
        let mut buf = Vec::new();
        write_power_csv(&mut buf, &[row(0.5), row(-0.5), row(0.0)]).unwrap();
        let back = read_power_csv(buf.as_slice()).unwrap();
        assert_eq!(back.iter().map(|r| r.r).collect::<Vec<_>>(), vec![-0.5, 0.0, 0.5]);
        assert!(String::from_utf8(buf).unwrap().starts_with("statistic,n,r,alpha,iterations,seed,power\n"));
    }
}
