//! CSV ingestion and report-file emission.
//!
//! Input files are comma-separated with a header row, "." decimal and UTF-8;
//! output files use the same dialect so repeated runs are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::report::ReportTable;

/// How the response column is rescaled into (0,1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResponseScale {
    None,
    /// Divide by 100 (for responses recorded as percentages).
    Percent,
}

impl ResponseScale {
    pub fn label(&self) -> &'static str {
        match self {
            ResponseScale::None => "none",
            ResponseScale::Percent => "percent",
        }
    }
}

/// Row count and column summary returned alongside a loaded dataset.
#[derive(Clone, Debug)]
pub struct LoadSummary {
    pub rows: usize,
    pub predictors: Vec<String>,
    pub response: String,
    pub scale: ResponseScale,
}

/// Loads a dataset from a headed CSV file: the named response (rescaled per
/// `scale`) plus the named predictors, with an intercept column prepended.
pub fn load_csv(
    path: &Path,
    response: &str,
    predictors: &[String],
    scale: ResponseScale,
) -> Result<(Dataset, LoadSummary)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn { name: name.into() })
    };
    let y_idx = find(response)?;
    let mut x_idx = Vec::with_capacity(predictors.len());
    for p in predictors {
        x_idx.push(find(p)?);
    }

    let mut raw_y = Vec::new();
    let mut rows = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |idx: usize, col: &str| -> Result<f64> {
            let cell = record.get(idx).unwrap_or("");
            cell.trim().parse::<f64>().map_err(|_| Error::NonNumericCell {
                row: row_no + 1,
                column: col.into(),
                contents: cell.to_string(),
            })
        };
        raw_y.push(parse(y_idx, response)?);
        let mut row = Vec::with_capacity(predictors.len());
        for (idx, name) in x_idx.iter().zip(predictors) {
            row.push(parse(*idx, name)?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no data rows in {}",
            path.display()
        )));
    }

    let y: Vec<f64> = match scale {
        ResponseScale::None => raw_y,
        ResponseScale::Percent => raw_y.iter().map(|v| v / 100.0).collect(),
    };
    let bad: Vec<usize> = y
        .iter()
        .enumerate()
        .filter(|(_, v)| !(v.is_finite() && **v > 0.0 && **v < 1.0))
        .map(|(t, _)| t + 1)
        .collect();
    if !bad.is_empty() {
        return Err(Error::ResponseOutOfRange { rows: bad });
    }

    let predictors_mat = Mat::from_rows(&rows)?;
    let ds = Dataset::with_intercept(&predictors_mat, y, predictors)?;
    let summary = LoadSummary {
        rows: ds.n(),
        predictors: predictors.to_vec(),
        response: response.into(),
        scale,
    };
    Ok((ds, summary))
}

/// Writes each table as `<slug>.csv` and `<slug>.txt` under `dir`, returning
/// the paths written. An empty table list writes nothing and succeeds.
pub fn emit_report(tables: &[ReportTable], dir: &Path) -> Result<Vec<PathBuf>> {
    if tables.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for table in tables {
        let csv_path = dir.join(format!("{}.csv", table.slug()));
        fs::write(&csv_path, table.to_csv())?;
        written.push(csv_path);
        let txt_path = dir.join(format!("{}.txt", table.slug()));
        fs::write(&txt_path, table.to_text())?;
        written.push(txt_path);
    }
    Ok(written)
}

/// Writes the simulation plot data (tmse against correlation, one row per
/// estimator per grid point) as `plot_data.csv`.
pub fn write_plot_data(dir: &Path, rows: &[(f64, String, f64)]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut out = String::from("rho,estimator,tmse\n");
    for (rho, estimator, tmse) in rows {
        out.push_str(&format!("{rho},{estimator},{tmse}\n"));
    }
    let path = dir.join("plot_data.csv");
    fs::write(&path, out)?;
    Ok(path)
}
