//! Process measurement windows and engineering specification limits.
//!
//! Both types validate on construction and are immutable afterwards.
//! CSV layouts:
//!
//! * window: a header row of column names followed by decimal rows,
//!   comma-delimited, no missing values;
//! * specification limits: one `name,lsl,usl` record per variable. A leading
//!   `name,lsl,usl` header line is tolerated.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Result, SvddError};

/// An n×q matrix of in-control process measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessWindow {
    observations: Array2<f64>,
    column_names: Vec<String>,
}

impl ProcessWindow {
    pub fn new(observations: Array2<f64>, column_names: Vec<String>) -> Result<Self> {
        let (n, q) = observations.dim();
        if n == 0 {
            return Err(SvddError::Empty(
                "process window has no observations".into(),
            ));
        }
        if q == 0 {
            return Err(SvddError::Empty("process window has no columns".into()));
        }
        if column_names.len() != q {
            return Err(SvddError::DimensionMismatch {
                expected: q,
                found: column_names.len(),
            });
        }
        if let Some(((i, j), _)) = observations.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(SvddError::NonFinite(format!(
                "process window at row {i}, column {j}"
            )));
        }
        Ok(Self {
            observations,
            column_names,
        })
    }

    /// Builds a window with default column names (`x`, `y` for two columns,
    /// `x1..xq` otherwise).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let q = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * q);
        for row in rows {
            if row.len() != q {
                return Err(SvddError::DimensionMismatch {
                    expected: q,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        let observations = Array2::from_shape_vec((rows.len(), q), data)
            .map_err(|e| SvddError::InvalidParameter(e.to_string()))?;
        Self::new(observations, default_column_names(q))
    }

    pub fn observations(&self) -> ArrayView2<'_, f64> {
        self.observations.view()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn n(&self) -> usize {
        self.observations.nrows()
    }

    pub fn q(&self) -> usize {
        self.observations.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.observations.row(i)
    }

    /// Returns a copy with `shift` added to every row.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        check_dim(self.q(), shift.len())?;
        let mut obs = self.observations.clone();
        for mut row in obs.rows_mut() {
            for (v, t) in row.iter_mut().zip(shift) {
                *v += t;
            }
        }
        Self::new(obs, self.column_names.clone())
    }

    /// Reads a headed, comma-delimited CSV.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| csv_error(1, e))?
            .iter()
            .map(str::to_owned)
            .collect();
        if header.is_empty() || header.iter().all(String::is_empty) {
            return Err(SvddError::Parse {
                line: 1,
                message: "missing header row".into(),
            });
        }
        let q = header.len();
        let mut data = Vec::new();
        let mut n = 0;
        for (idx, record) in rdr.records().enumerate() {
            let line = idx + 2;
            let record = record.map_err(|e| csv_error(line, e))?;
            if record.len() != q {
                return Err(SvddError::Parse {
                    line,
                    message: format!("expected {q} fields, found {}", record.len()),
                });
            }
            for (field, name) in record.iter().zip(&header) {
                data.push(parse_number(field, line, name)?);
            }
            n += 1;
        }
        let observations = Array2::from_shape_vec((n, q), data)
            .map_err(|e| SvddError::InvalidParameter(e.to_string()))?;
        Self::new(observations, header)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.column_names)
            .map_err(|e| csv_error(1, e))?;
        for row in self.observations.rows() {
            wtr.write_record(row.iter().map(|v| v.to_string()))
                .map_err(|e| csv_error(0, e))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn default_column_names(q: usize) -> Vec<String> {
    match q {
        2 => vec!["x".into(), "y".into()],
        _ => (1..=q).map(|j| format!("x{j}")).collect(),
    }
}

fn parse_number(field: &str, line: usize, column: &str) -> Result<f64> {
    let value: f64 = field.parse().map_err(|_| SvddError::Parse {
        line,
        message: format!("column '{column}': '{field}' is not a decimal number"),
    })?;
    if !value.is_finite() {
        return Err(SvddError::Parse {
            line,
            message: format!("column '{column}': non-finite value '{field}'"),
        });
    }
    Ok(value)
}

fn csv_error(line: usize, e: csv::Error) -> SvddError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(line);
    SvddError::Parse {
        line,
        message: e.to_string(),
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(SvddError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Per-variable lower/upper engineering specification limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecLimits {
    names: Vec<String>,
    lsl: Vec<f64>,
    usl: Vec<f64>,
}

impl SpecLimits {
    pub fn new(names: Vec<String>, lsl: Vec<f64>, usl: Vec<f64>) -> Result<Self> {
        let q = names.len();
        if q == 0 {
            return Err(SvddError::Empty("specification limits".into()));
        }
        check_dim(q, lsl.len())?;
        check_dim(q, usl.len())?;
        for j in 0..q {
            if !lsl[j].is_finite() || !usl[j].is_finite() {
                return Err(SvddError::NonFinite(format!(
                    "specification limits for '{}'",
                    names[j]
                )));
            }
            if lsl[j] >= usl[j] {
                return Err(SvddError::InvalidParameter(format!(
                    "specification limits for '{}' require lsl < usl (got lsl = {}, usl = {})",
                    names[j], lsl[j], usl[j]
                )));
            }
        }
        Ok(Self { names, lsl, usl })
    }

    /// Limits given as `(lsl, usl)` pairs with default variable names.
    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            default_column_names(bounds.len()),
            bounds.iter().map(|b| b.0).collect(),
            bounds.iter().map(|b| b.1).collect(),
        )
    }

    pub fn q(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lsl(&self) -> &[f64] {
        &self.lsl
    }

    pub fn usl(&self) -> &[f64] {
        &self.usl
    }

    /// Midpoint of every `[lsl, usl]` interval.
    pub fn center(&self) -> Array1<f64> {
        self.lsl
            .iter()
            .zip(&self.usl)
            .map(|(l, u)| (l + u) / 2.0)
            .collect()
    }

    /// Product of the interval widths.
    pub fn volume(&self) -> f64 {
        self.lsl.iter().zip(&self.usl).map(|(l, u)| u - l).product()
    }

    /// True when every coordinate lies within its closed interval.
    pub fn contains(&self, x: ArrayView1<'_, f64>) -> bool {
        x.iter()
            .zip(self.lsl.iter().zip(&self.usl))
            .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    /// Reorders the limits to follow `columns`, matching variables by name.
    pub fn aligned_to(&self, columns: &[String]) -> Result<Self> {
        check_dim(self.q(), columns.len())?;
        if self.names == columns {
            return Ok(self.clone());
        }
        let mut lsl = Vec::with_capacity(columns.len());
        let mut usl = Vec::with_capacity(columns.len());
        for col in columns {
            let j = self.names.iter().position(|n| n == col).ok_or_else(|| {
                SvddError::InvalidParameter(format!("column '{col}' has no specification limits"))
            })?;
            lsl.push(self.lsl[j]);
            usl.push(self.usl[j]);
        }
        Self::new(columns.to_vec(), lsl, usl)
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let (mut names, mut lsl, mut usl) = (Vec::new(), Vec::new(), Vec::new());
        for (idx, record) in rdr.records().enumerate() {
            let line = idx + 1;
            let record = record.map_err(|e| csv_error(line, e))?;
            if record.len() != 3 {
                return Err(SvddError::Parse {
                    line,
                    message: format!("expected 3 fields name,lsl,usl, found {}", record.len()),
                });
            }
            if idx == 0 && &record[1] == "lsl" && &record[2] == "usl" {
                continue;
            }
            names.push(record[0].to_owned());
            lsl.push(parse_number(&record[1], line, "lsl")?);
            usl.push(parse_number(&record[2], line, "usl")?);
        }
        Self::new(names, lsl, usl)
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(file))
    }

    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        for j in 0..self.q() {
            writeln!(writer, "{},{},{}", self.names[j], self.lsl[j], self.usl[j])?;
        }
        Ok(())
    }
}

/// Per-column z-score transform fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    /// Fits column means and sample standard deviations. Constant columns
    /// get unit scale.
    pub fn fit(window: &ProcessWindow) -> Self {
        let obs = window.observations();
        let n = obs.nrows() as f64;
        let means: Vec<f64> = obs.mean_axis(Axis(0)).expect("non-empty window").to_vec();
        let scales = obs
            .columns()
            .into_iter()
            .zip(&means)
            .map(|(col, m)| {
                let ss: f64 = col.iter().map(|v| (v - m) * (v - m)).sum();
                let sd = if n > 1.0 {
                    (ss / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                if sd > 0.0 && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { means, scales }
    }

    pub fn q(&self) -> usize {
        self.means.len()
    }

    pub fn apply_point(&self, x: ArrayView1<'_, f64>) -> Array1<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn apply_matrix(&self, data: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        check_dim(self.q(), data.ncols())?;
        let mut out = data.to_owned();
        for mut row in out.rows_mut() {
            for ((v, m), s) in row.iter_mut().zip(&self.means).zip(&self.scales) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }

    pub fn apply_window(&self, window: &ProcessWindow) -> Result<ProcessWindow> {
        ProcessWindow::new(
            self.apply_matrix(window.observations())?,
            window.column_names().to_vec(),
        )
    }

    pub fn apply_spec(&self, spec: &SpecLimits) -> Result<SpecLimits> {
        check_dim(self.q(), spec.q())?;
        let lsl = (0..spec.q())
            .map(|j| (spec.lsl()[j] - self.means[j]) / self.scales[j])
            .collect();
        let usl = (0..spec.q())
            .map(|j| (spec.usl()[j] - self.means[j]) / self.scales[j])
            .collect();
        SpecLimits::new(spec.names().to_vec(), lsl, usl)
    }
}
