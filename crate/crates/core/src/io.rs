//! Matrix ingestion, preprocessing and CSV output.
//!
//! Two on-disk formats are understood:
//!
//! * CSV: comma separated, `.` decimal point, an optional single header row
//!   and an optional leading label column. Both are detected from content
//!   unless forced through [`CsvOptions`].
//! * Matrix Market: `coordinate` and `array` layouts, `real` field, with
//!   `general`, `symmetric` or `skew-symmetric` symmetry. Coordinate input is
//!   expanded to a dense matrix.
//!
//! Missing cells (empty or `NA` by default) are rejected unless
//! [`CsvOptions::allow_missing`] is set, in which case they are carried as NaN
//! until [`fill_missing_by_class_mean`] replaces them.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CurError, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixFormat {
    Csv,
    MatrixMarket,
}

impl FromStr for MatrixFormat {
    type Err = CurError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(MatrixFormat::Csv),
            "mtx" | "mm" | "matrix-market" => Ok(MatrixFormat::MatrixMarket),
            other => Err(CurError::Config(format!("unknown matrix format {other:?}"))),
        }
    }
}

/// Whether the first CSV row / column carries labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// Labels are present iff the cells do not parse as numbers.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvOptions {
    pub header: LabelMode,
    pub row_labels: LabelMode,
    /// Cell contents treated as missing, besides the empty cell.
    pub missing_markers: Vec<String>,
    pub allow_missing: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            header: LabelMode::Auto,
            row_labels: LabelMode::Auto,
            missing_markers: vec!["NA".to_string()],
            allow_missing: false,
        }
    }
}

/// A matrix together with optional row/column names and row classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub matrix: DenseMatrix,
    pub row_labels: Option<Vec<String>>,
    pub col_labels: Option<Vec<String>>,
    /// Class id per row, indexing into `class_names`.
    pub class_of_row: Option<Vec<usize>>,
    pub class_names: Vec<String>,
}

impl LabeledMatrix {
    pub fn unlabeled(matrix: DenseMatrix) -> Self {
        Self {
            matrix,
            row_labels: None,
            col_labels: None,
            class_of_row: None,
            class_names: Vec::new(),
        }
    }

    /// Attaches one class label per row. Class ids follow sorted label order.
    pub fn with_classes<S: AsRef<str>>(mut self, labels: &[S]) -> Result<Self> {
        if labels.len() != self.matrix.rows() {
            return Err(CurError::ShapeMismatch(format!(
                "{} class labels for {} rows",
                labels.len(),
                self.matrix.rows()
            )));
        }
        let mut names: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        names.sort();
        names.dedup();
        let ids = labels
            .iter()
            .map(|l| names.binary_search_by(|n| n.as_str().cmp(l.as_ref())).unwrap())
            .collect();
        self.class_of_row = Some(ids);
        self.class_names = names;
        Ok(self)
    }

    pub fn check_labels(&self) -> Result<()> {
        let (rows, cols) = self.matrix.shape();
        if let Some(l) = &self.row_labels {
            if l.len() != rows {
                return Err(CurError::ShapeMismatch(format!(
                    "{} row labels for {rows} rows",
                    l.len()
                )));
            }
        }
        if let Some(l) = &self.col_labels {
            if l.len() != cols {
                return Err(CurError::ShapeMismatch(format!(
                    "{} column labels for {cols} columns",
                    l.len()
                )));
            }
        }
        if let Some(c) = &self.class_of_row {
            if c.len() != rows {
                return Err(CurError::ShapeMismatch(format!(
                    "{} class ids for {rows} rows",
                    c.len()
                )));
            }
            if c.iter().any(|&id| id >= self.class_names.len()) {
                return Err(CurError::InvalidInput("class id without a class name".into()));
            }
        }
        Ok(())
    }

    /// Swaps rows and columns, carrying the labels along. Row classes do not
    /// survive a transpose.
    pub fn transposed(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            class_of_row: None,
            class_names: Vec::new(),
        }
    }
}

pub fn load_matrix(path: impl AsRef<Path>, format: MatrixFormat, opts: &CsvOptions) -> Result<LabeledMatrix> {
    let file = File::open(path.as_ref())?;
    match format {
        MatrixFormat::Csv => read_csv(file, opts),
        MatrixFormat::MatrixMarket => read_matrix_market(BufReader::new(file)).map(LabeledMatrix::unlabeled),
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok()
}

pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<LabeledMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CurError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        // Skip blank lines entirely.
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(CurError::InvalidInput("CSV input holds no rows".into()));
    }

    let is_missing = |cell: &str| {
        let t = cell.trim();
        t.is_empty() || opts.missing_markers.iter().any(|m| m == t)
    };
    let numeric_or_missing = |cell: &str| is_missing(cell) || parse_number(cell).is_some();

    let has_header = match opts.header {
        LabelMode::Present => true,
        LabelMode::Absent => false,
        LabelMode::Auto => {
            // A header row contains at least one cell that is neither numeric nor missing,
            // not counting a possible corner cell above the label column.
            let first = &records[0].1;
            first.iter().skip(1).any(|c| !numeric_or_missing(c)) || (first.len() == 1 && !numeric_or_missing(&first[0]))
        }
    };
    let body = if has_header { &records[1..] } else { &records[..] };
    let has_row_labels = match opts.row_labels {
        LabelMode::Present => true,
        LabelMode::Absent => false,
        LabelMode::Auto => body
            .iter()
            .any(|(_, r)| r.get(0).is_some_and(|c| !numeric_or_missing(c))),
    };

    let width = body.first().map(|(_, r)| r.len()).unwrap_or_else(|| records[0].1.len());
    let value_cols = width.saturating_sub(usize::from(has_row_labels));
    let mut data = Vec::with_capacity(body.len() * value_cols);
    let mut row_labels = Vec::new();
    for (line, rec) in body {
        if rec.len() != width {
            return Err(CurError::Parse {
                line: *line,
                message: format!("row has {} cells, expected {width}", rec.len()),
            });
        }
        let mut cells = rec.iter();
        if has_row_labels {
            row_labels.push(cells.next().unwrap_or_default().trim().to_string());
        }
        for (j, cell) in cells.enumerate() {
            if is_missing(cell) {
                if !opts.allow_missing {
                    return Err(CurError::Parse {
                        line: *line,
                        message: format!("missing value in column {}", j + 1),
                    });
                }
                data.push(f64::NAN);
                continue;
            }
            match parse_number(cell) {
                Some(v) if v.is_finite() => data.push(v),
                Some(_) => {
                    return Err(CurError::Parse {
                        line: *line,
                        message: format!("non-finite value {:?}", cell.trim()),
                    })
                }
                None => {
                    return Err(CurError::Parse {
                        line: *line,
                        message: format!("non-numeric cell {:?}", cell.trim()),
                    })
                }
            }
        }
    }

    let col_labels = if has_header {
        let header = &records[0].1;
        let skip = usize::from(has_row_labels && header.len() == width);
        let labels: Vec<String> = header.iter().skip(skip).map(|s| s.trim().to_string()).collect();
        if labels.len() != value_cols {
            return Err(CurError::Parse {
                line: records[0].0,
                message: format!("header has {} labels for {value_cols} columns", labels.len()),
            });
        }
        Some(labels)
    } else {
        None
    };

    let matrix = DenseMatrix::new(body.len(), value_cols, data)?;
    let out = LabeledMatrix {
        matrix,
        row_labels: has_row_labels.then_some(row_labels),
        col_labels,
        class_of_row: None,
        class_names: Vec::new(),
    };
    out.check_labels()?;
    Ok(out)
}

pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<DenseMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(CurError::InvalidInput("empty Matrix Market input".into())),
    };
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(CurError::Parse {
            line: hline,
            message: "missing %%MatrixMarket matrix banner".into(),
        });
    }
    let coordinate = match tokens[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => {
            return Err(CurError::Parse {
                line: hline,
                message: format!("unsupported layout {other:?}"),
            })
        }
    };
    if tokens[3] != "real" {
        return Err(CurError::Parse {
            line: hline,
            message: format!("unsupported field {:?}", tokens[3]),
        });
    }
    let symmetry = tokens[4].as_str();
    let mirror = match symmetry {
        "general" => 0.0,
        "symmetric" => 1.0,
        "skew-symmetric" => -1.0,
        other => {
            return Err(CurError::Parse {
                line: hline,
                message: format!("unsupported symmetry {other:?}"),
            })
        }
    };

    let mut content = lines.filter_map(|(n, l)| match l {
        Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('%') => None,
        other => Some((n, other)),
    });

    let (sline, size) = content.next().ok_or_else(|| CurError::Parse {
        line: hline,
        message: "missing size line".into(),
    })?;
    let size = size?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CurError::Parse {
            line: sline,
            message: format!("bad size line: {e}"),
        })?;
    let expect = if coordinate { 3 } else { 2 };
    if dims.len() != expect {
        return Err(CurError::Parse {
            line: sline,
            message: format!("size line needs {expect} integers"),
        });
    }
    let (rows, cols) = (dims[0], dims[1]);
    if mirror != 0.0 && rows != cols {
        return Err(CurError::Parse {
            line: sline,
            message: "symmetric storage requires a square matrix".into(),
        });
    }
    let mut m = DenseMatrix::zeros(rows, cols);

    let parse_val = |line: usize, t: &str| -> Result<f64> {
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(CurError::Parse {
                line,
                message: format!("non-numeric value {t:?}"),
            }),
        }
    };

    if coordinate {
        let nnz = dims[2];
        let mut seen = 0;
        for (n, l) in content {
            let l = l?;
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(CurError::Parse {
                    line: n,
                    message: "coordinate entry needs row, column, value".into(),
                });
            }
            let idx = |s: &str, bound: usize| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(v) if v >= 1 && v <= bound => Ok(v - 1),
                    _ => Err(CurError::Parse {
                        line: n,
                        message: format!("index {s:?} out of range 1..={bound}"),
                    }),
                }
            };
            let (i, j) = (idx(t[0], rows)?, idx(t[1], cols)?);
            let v = parse_val(n, t[2])?;
            m[(i, j)] += v;
            if mirror != 0.0 && i != j {
                m[(j, i)] += mirror * v;
            }
            seen += 1;
        }
        if seen != nnz {
            return Err(CurError::InvalidInput(format!("expected {nnz} entries, found {seen}")));
        }
    } else {
        // Column-major listing; symmetric variants store the lower triangle only.
        let mut values = Vec::new();
        for (n, l) in content {
            let l = l?;
            for t in l.split_whitespace() {
                values.push(parse_val(n, t)?);
            }
        }
        let mut it = values.into_iter();
        for j in 0..cols {
            let start = match symmetry {
                "general" => 0,
                "symmetric" => j,
                _ => j + 1,
            };
            for i in start..rows {
                let v = it
                    .next()
                    .ok_or_else(|| CurError::InvalidInput("array data ends early".into()))?;
                m[(i, j)] = v;
                if mirror != 0.0 && i != j {
                    m[(j, i)] = mirror * v;
                }
            }
        }
        if it.next().is_some() {
            return Err(CurError::InvalidInput("array data has trailing values".into()));
        }
    }
    Ok(m)
}

/// Reads one class label per non-empty line.
pub fn load_class_labels(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() {
            out.push(t.to_string());
        }
    }
    Ok(out)
}

/// Writes a matrix as CSV with 17 significant digits, so that reading it
/// back reproduces every value bit for bit.
pub fn write_csv<W: Write>(out: W, m: &LabeledMatrix) -> Result<()> {
    let mut w = BufWriter::new(out);
    let cols = m.matrix.cols();
    if let Some(labels) = &m.col_labels {
        let mut cells: Vec<&str> = Vec::with_capacity(cols + 1);
        if m.row_labels.is_some() {
            cells.push("");
        }
        cells.extend(labels.iter().map(String::as_str));
        writeln!(w, "{}", cells.join(","))?;
    }
    for i in 0..m.matrix.rows() {
        let mut line = String::new();
        if let Some(labels) = &m.row_labels {
            line.push_str(&labels[i]);
            line.push(',');
        }
        for (j, v) in m.matrix.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:.16e}"));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(path: impl AsRef<Path>, m: &LabeledMatrix) -> Result<()> {
    write_csv(File::create(path.as_ref())?, m)
}

/// Subtracts each row's mean from that row.
pub fn mean_center_rows(m: &DenseMatrix) -> DenseMatrix {
    let mut out = m.clone();
    let cols = m.cols();
    if cols == 0 {
        return out;
    }
    for i in 0..m.rows() {
        let row = out.row_mut(i);
        let mean = row.iter().sum::<f64>() / cols as f64;
        row.iter_mut().for_each(|v| *v -= mean);
    }
    out
}

/// Maps each column affinely onto `[0, 1]`; constant columns become zero.
pub fn min_max_normalize_cols(m: &DenseMatrix) -> DenseMatrix {
    let (rows, cols) = m.shape();
    let mut out = m.clone();
    for j in 0..cols {
        let (lo, hi) = (0..rows).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            (lo.min(m[(i, j)]), hi.max(m[(i, j)]))
        });
        let span = hi - lo;
        for i in 0..rows {
            out[(i, j)] = if span > 0.0 {
                ((m[(i, j)] - lo) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
    }
    out
}

/// Replaces every missing (NaN) cell by the mean of the observed cells in
/// the same column among rows of the same class.
pub fn fill_missing_by_class_mean(m: &LabeledMatrix) -> Result<LabeledMatrix> {
    let classes = m
        .class_of_row
        .as_ref()
        .ok_or_else(|| CurError::Config("class labels are required to fill missing values".into()))?;
    let (rows, cols) = m.matrix.shape();
    let mut out = m.clone();
    for j in 0..cols {
        // class id -> (sum, count) over observed entries
        let mut stats: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
        let mut needs_fill = false;
        for (i, &class) in classes.iter().enumerate().take(rows) {
            let v = m.matrix[(i, j)];
            if v.is_nan() {
                needs_fill = true;
            } else {
                let e = stats.entry(class).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
        if !needs_fill {
            continue;
        }
        for (i, &class) in classes.iter().enumerate().take(rows) {
            if m.matrix[(i, j)].is_nan() {
                match stats.get(&class) {
                    Some(&(sum, n)) if n > 0 => out.matrix[(i, j)] = sum / n as f64,
                    _ => {
                        return Err(CurError::UnrecoverableGap {
                            class: m.class_names.get(class).cloned().unwrap_or_default(),
                            column: j,
                        })
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(s: &str) -> Result<LabeledMatrix> {
        read_csv(s.as_bytes(), &CsvOptions::default())
    }

    #[test]
    fn plain_csv() {
        let m = csv("1,2\n3,4").unwrap();
        assert_eq!(m.matrix, DenseMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        assert!(m.col_labels.is_none() && m.row_labels.is_none());
    }

    #[test]
    fn header_becomes_column_labels() {
        let m = csv("a,b\n1,2\n3,4").unwrap();
        assert_eq!(m.col_labels.unwrap(), vec!["a", "b"]);
        assert_eq!(m.matrix.shape(), (2, 2));
    }

    #[test]
    fn header_and_label_column() {
        let m = csv(",x,y\np1,1,2\np2,3,4\n").unwrap();
        assert_eq!(m.col_labels.unwrap(), vec!["x", "y"]);
        assert_eq!(m.row_labels.unwrap(), vec!["p1", "p2"]);
        assert_eq!(m.matrix.data(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn ragged_rows_report_line() {
        match csv("1,2\n3\n") {
            Err(CurError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_line() {
        let opts = CsvOptions {
            header: LabelMode::Absent,
            row_labels: LabelMode::Absent,
            ..Default::default()
        };
        match read_csv("1,2\n3,x\n".as_bytes(), &opts) {
            Err(CurError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("non-numeric"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_cells_need_opt_in() {
        assert!(matches!(csv("1,NA\n3,4"), Err(CurError::Parse { line: 1, .. })));
        let opts = CsvOptions {
            allow_missing: true,
            ..Default::default()
        };
        let m = read_csv("1,NA\n,4".as_bytes(), &opts).unwrap();
        assert!(m.matrix[(0, 1)].is_nan() && m.matrix[(1, 0)].is_nan());
    }

    #[test]
    fn matrix_market_coordinate() {
        let src = "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 1\n1 1 5.0\n";
        let m = read_matrix_market(src.as_bytes()).unwrap();
        assert_eq!(m.data(), &[5.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn matrix_market_symmetric_and_array() {
        let src = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 7\n";
        let m = read_matrix_market(src.as_bytes()).unwrap();
        assert_eq!(m.data(), &[1.0, 7.0, 7.0, 0.0]);
        let src = "%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n";
        let m = read_matrix_market(src.as_bytes()).unwrap();
        assert_eq!(m.data(), &[1.0, 3.0, 5.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn matrix_market_rejects_complex_and_bad_index() {
        let src = "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n";
        assert!(read_matrix_market(src.as_bytes()).is_err());
        let src = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n";
        assert!(matches!(
            read_matrix_market(src.as_bytes()),
            Err(CurError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn centering_examples() {
        let m = DenseMatrix::from_rows(&[[1.0, 3.0]]).unwrap();
        assert_eq!(mean_center_rows(&m).data(), &[-1.0, 1.0]);
        let z = DenseMatrix::zeros(2, 3);
        assert_eq!(mean_center_rows(&z), z);
        let m = DenseMatrix::from_rows(&[[2.0, 2.0], [0.0, 4.0]]).unwrap();
        assert_eq!(mean_center_rows(&m).data(), &[0.0, 0.0, -2.0, 2.0]);
    }

    #[test]
    fn min_max_examples() {
        let m = DenseMatrix::from_rows(&[[2.0, 5.0, -1.0], [4.0, 5.0, 1.0], [6.0, 5.0, 1.0]]).unwrap();
        let n = min_max_normalize_cols(&m);
        assert_eq!(n.col(0), vec![0.0, 0.5, 1.0]);
        assert_eq!(n.col(1), vec![0.0, 0.0, 0.0]);
        assert_eq!(n.col(2), vec![0.0, 1.0, 1.0]);
    }

    fn with_missing(rows: &[[f64; 1]], classes: &[&str]) -> LabeledMatrix {
        LabeledMatrix::unlabeled(DenseMatrix::from_rows(rows).unwrap())
            .with_classes(classes)
            .unwrap()
    }

    #[test]
    fn fill_by_class_mean() {
        let m = with_missing(&[[1.0], [f64::NAN], [3.0]], &["A", "A", "A"]);
        assert_eq!(fill_missing_by_class_mean(&m).unwrap().matrix.data(), &[1.0, 2.0, 3.0]);

        let m = with_missing(&[[2.0], [f64::NAN], [10.0], [10.0]], &["A", "A", "B", "B"]);
        assert_eq!(
            fill_missing_by_class_mean(&m).unwrap().matrix.data(),
            &[2.0, 2.0, 10.0, 10.0]
        );

        let m = with_missing(&[[2.0], [5.0]], &["A", "B"]);
        assert_eq!(fill_missing_by_class_mean(&m).unwrap(), m);
    }

    #[test]
    fn fill_reports_unrecoverable_gap() {
        let m = with_missing(&[[f64::NAN], [1.0]], &["A", "B"]);
        match fill_missing_by_class_mean(&m) {
            Err(CurError::UnrecoverableGap { class, column }) => {
                assert_eq!(class, "A");
                assert_eq!(column, 0);
            }
            other => panic!("expected gap error, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let m = DenseMatrix::from_fn(3, 4, |i, j| ((i * 7 + j) as f64).sin() / 3.0 + 1e-300 * j as f64);
        let lm = LabeledMatrix {
            col_labels: Some(vec!["a".into(), "b".into(), "c".into(), "d".into()]),
            row_labels: Some(vec!["r0".into(), "r1".into(), "r2".into()]),
            ..LabeledMatrix::unlabeled(m)
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &lm).unwrap();
        let back = read_csv(buf.as_slice(), &CsvOptions::default()).unwrap();
        assert_eq!(back, lm);
    }
}
