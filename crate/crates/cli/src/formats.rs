//! On-disk formats.
//!
//! * Coefficient CSV: first line `<id>,<T>,<L>`, then `T` lines of `L` basis
//!   coefficients. Floats use the shortest representation that parses back to
//!   the same value, so load followed by save reproduces the file byte for byte.
//! * Gridded CSV: header `id,t,τ_1,…,τ_G`, one observed curve per line;
//!   `NA`, `NaN` or an empty cell marks a missing grid value.
//! * Matrix CSV: header `id,<id_1>,…,<id_d>`, then one line per row led by its id.
//! * Labels JSON: `{"ids": [...], "labels": [...]}` with optional extra keys.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ftspec::{BasisSpec, FunctionalTimeSeries, Matrix, SimilarityMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, Context};

/// Asymmetry tolerated when loading a similarity matrix.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

fn reader(path: &Path) -> CliResult<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(CliError::io(path))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn records(path: &Path) -> CliResult<Vec<(u64, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in reader(path)?.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn parse_f64(path: &Path, line: u64, cell: &str) -> CliResult<f64> {
    cell.parse::<f64>()
        .map_err(|_| CliError::parse(path, line, format!("'{cell}' is not a number")))
}

fn parse_usize(path: &Path, line: u64, cell: &str, what: &str) -> CliResult<usize> {
    cell.parse::<usize>()
        .map_err(|_| CliError::parse(path, line, format!("{what} '{cell}' is not a nonnegative integer")))
}

fn csv_line<'a>(cells: impl IntoIterator<Item = &'a str>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(cells).expect("in-memory csv write");
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let mut f = fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(text.as_bytes()).map_err(CliError::io(path))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.line() as u64, e.to_string()))
}

pub fn coefficient_csv(series: &FunctionalTimeSeries) -> String {
    let (t, l) = (series.len(), series.dim());
    let mut out = csv_line([series.id(), &t.to_string(), &l.to_string()]);
    for row in series.coeffs().rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_coefficients(path: &Path, series: &FunctionalTimeSeries) -> CliResult<()> {
    write_text(path, &coefficient_csv(series))
}

pub fn read_coefficients(path: &Path) -> CliResult<FunctionalTimeSeries> {
    let recs = records(path)?;
    let Some((line, header)) = recs.first() else {
        return Err(CliError::parse(path, 1, "empty file"));
    };
    if header.len() != 3 {
        return Err(CliError::parse(path, *line, "first line must be '<id>,<T>,<L>'"));
    }
    let id = header[0].to_string();
    let t = parse_usize(path, *line, &header[1], "T")?;
    let l = parse_usize(path, *line, &header[2], "L")?;
    if recs.len() - 1 != t {
        return Err(CliError::parse(
            path,
            *line,
            format!("header declares T={t} but {} coefficient rows follow", recs.len() - 1),
        ));
    }
    let mut values = Vec::with_capacity(t * l);
    for (line, rec) in &recs[1..] {
        if rec.len() != l {
            return Err(CliError::parse(path, *line, format!("expected {l} coefficients, found {}", rec.len())));
        }
        for cell in rec.iter() {
            values.push(parse_f64(path, *line, cell)?);
        }
    }
    let coeffs = Matrix::from_row_major(t, l, values).context(path.display())?;
    let basis = BasisSpec::fourier(l).context(path.display())?;
    FunctionalTimeSeries::new(id, coeffs, basis).context(path.display())
}

/// Expands directories into their `*.csv` files (sorted by name).
pub fn expand_inputs(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .map_err(CliError::io(p))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "csv"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(CliError::input("no coefficient files found"));
    }
    Ok(out)
}

/// Loads coefficient files and checks that they share `T` and `L`.
pub fn read_collection(inputs: &[PathBuf]) -> CliResult<Vec<FunctionalTimeSeries>> {
    let files = expand_inputs(inputs)?;
    let series = files.iter().map(|f| read_coefficients(f)).collect::<CliResult<Vec<_>>>()?;
    let (t, l) = (series[0].len(), series[0].dim());
    for (s, f) in series.iter().zip(&files).skip(1) {
        if s.len() != t || s.dim() != l {
            return Err(CliError::input(format!(
                "{} has shape T={}, L={} but {} has T={t}, L={l}",
                f.display(),
                s.len(),
                s.dim(),
                files[0].display()
            )));
        }
    }
    let mut seen = HashMap::new();
    for (s, f) in series.iter().zip(&files) {
        if let Some(prev) = seen.insert(s.id().to_string(), f) {
            return Err(CliError::input(format!(
                "series id '{}' appears in both {} and {}",
                s.id(),
                prev.display(),
                f.display()
            )));
        }
    }
    Ok(series)
}

/// File name for a series id, with path separators replaced.
pub fn series_file_name(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| if c.is_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect();
    format!("{safe}.csv")
}

pub fn matrix_csv(ids: &[String], values: &Matrix) -> String {
    let mut out = csv_line(std::iter::once("id").chain(ids.iter().map(String::as_str)));
    for (id, row) in ids.iter().zip(values.rows()) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&csv_line(std::iter::once(id.as_str()).chain(cells.iter().map(String::as_str))));
    }
    out
}

/// Similarity matrix with its block plan, as written next to the CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixEnvelope {
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    pub ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

/// Reads a similarity matrix from a matrix CSV or a JSON envelope.
pub fn read_similarity(path: &Path) -> CliResult<SimilarityMatrix> {
    let (ids, values) = if path.extension().is_some_and(|x| x == "json") {
        let env: MatrixEnvelope = read_json(path)?;
        let m = Matrix::from_rows(&env.values).context(path.display())?;
        (env.ids, m)
    } else {
        let recs = records(path)?;
        let Some((hline, header)) = recs.first() else {
            return Err(CliError::parse(path, 1, "empty file"));
        };
        let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let d = ids.len();
        if recs.len() - 1 != d {
            return Err(CliError::parse(path, *hline, format!("{d} column ids but {} rows", recs.len() - 1)));
        }
        let mut values = Vec::with_capacity(d * d);
        for (i, (line, rec)) in recs[1..].iter().enumerate() {
            if rec.len() != d + 1 {
                return Err(CliError::parse(path, *line, format!("expected {} cells, found {}", d + 1, rec.len())));
            }
            if rec[0] != ids[i] {
                return Err(CliError::parse(
                    path,
                    *line,
                    format!("row id '{}' does not match column id '{}'", &rec[0], ids[i]),
                ));
            }
            for cell in rec.iter().skip(1) {
                values.push(parse_f64(path, *line, cell)?);
            }
        }
        (ids, Matrix::from_row_major(d, d, values).context(path.display())?)
    };
    SimilarityMatrix::new(ids, values, SYMMETRY_TOLERANCE).context(path.display())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelFile {
    pub ids: Vec<String>,
    pub labels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<u8>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub models: Vec<String>,
}

impl LabelFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let f: LabelFile = read_json(path)?;
        if f.ids.len() != f.labels.len() {
            return Err(CliError::input(format!(
                "{}: {} ids but {} labels",
                path.display(),
                f.ids.len(),
                f.labels.len()
            )));
        }
        Ok(f)
    }

    /// Labels in the order of `ids`; every id must be present.
    pub fn aligned(&self, ids: &[String]) -> CliResult<Vec<usize>> {
        let map: HashMap<&str, usize> = self.ids.iter().map(String::as_str).zip(self.labels.iter().copied()).collect();
        ids.iter()
            .map(|id| {
                map.get(id.as_str())
                    .copied()
                    .ok_or_else(|| CliError::input(format!("no label for series '{id}'")))
            })
            .collect()
    }
}

/// One observed curve per row, grouped by series id in order of appearance.
#[derive(Debug, Clone)]
pub struct GriddedFile {
    pub grid: Vec<f64>,
    pub series: Vec<GriddedSeries>,
}

#[derive(Debug, Clone)]
pub struct GriddedSeries {
    pub id: String,
    pub times: Vec<String>,
    pub lines: Vec<u64>,
    /// Row-major `times.len() × grid.len()`, NaN where missing.
    pub values: Vec<f64>,
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
}

pub fn read_gridded(path: &Path) -> CliResult<GriddedFile> {
    let recs = records(path)?;
    let Some((hline, header)) = recs.first() else {
        return Err(CliError::parse(path, 1, "empty file"));
    };
    if header.len() < 3 {
        return Err(CliError::parse(path, *hline, "header must be 'id,t,<grid points>...'"));
    }
    let grid = header
        .iter()
        .skip(2)
        .map(|c| parse_f64(path, *hline, c))
        .collect::<CliResult<Vec<_>>>()?;
    let width = grid.len() + 2;
    let mut series: Vec<GriddedSeries> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (line, rec) in &recs[1..] {
        if rec.len() != width {
            return Err(CliError::parse(path, *line, format!("expected {width} cells, found {}", rec.len())));
        }
        let id = rec[0].to_string();
        let slot = *index.entry(id.clone()).or_insert_with(|| {
            series.push(GriddedSeries {
                id,
                times: Vec::new(),
                lines: Vec::new(),
                values: Vec::new(),
            });
            series.len() - 1
        });
        let s = &mut series[slot];
        s.times.push(rec[1].to_string());
        s.lines.push(*line);
        for cell in rec.iter().skip(2) {
            s.values.push(if is_missing(cell) { f64::NAN } else { parse_f64(path, *line, cell)? });
        }
    }
    if series.is_empty() {
        return Err(CliError::parse(path, *hline, "no data rows"));
    }
    Ok(GriddedFile { grid, series })
}
