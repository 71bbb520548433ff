//! Matrix Market, JSON and CSV artifacts with atomic writes.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use nalgebra_sparse::io::{load_coo_from_matrix_market_str, save_to_matrix_market_str};
use nalgebra_sparse::CooMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::CliError;

/// Write `bytes` next to `path` under a temporary name, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Dense matrix as Matrix Market coordinate data. Every entry other than
/// `+0.0` is stored, so reading it back is bit-exact.
pub fn mtx_string(m: &DMatrix<f64>) -> String {
    let mut coo = CooMatrix::new(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != 0.0 || v.is_sign_negative() {
                coo.push(i, j, v);
            }
        }
    }
    save_to_matrix_market_str(&coo)
}

pub fn parse_mtx(text: &str, origin: &Path) -> Result<DMatrix<f64>, CliError> {
    let coo = load_coo_from_matrix_market_str::<f64>(text).map_err(|e| CliError::Format {
        path: origin.to_path_buf(),
        message: e.message().to_string(),
    })?;
    let mut m = DMatrix::zeros(coo.nrows(), coo.ncols());
    let mut seen = DMatrix::from_element(coo.nrows(), coo.ncols(), false);
    for (i, j, v) in coo.triplet_iter() {
        // duplicates add up; a lone entry is copied so that -0.0 survives
        m[(i, j)] = if seen[(i, j)] { m[(i, j)] + *v } else { *v };
        seen[(i, j)] = true;
    }
    Ok(m)
}

pub fn write_mtx(path: &Path, m: &DMatrix<f64>) -> Result<(), CliError> {
    write_atomic(path, mtx_string(m).as_bytes())
}

pub fn read_mtx(path: &Path) -> Result<DMatrix<f64>, CliError> {
    parse_mtx(&read_text(path)?, path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Rows of string fields as CSV with a header line.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    write_atomic(path, &bytes)
}

/// `A.mtx`, `B.mtx`, `C.mtx` in `dir` (or with a prefix such as `rom_`).
pub fn model_paths(dir: &Path, prefix: &str) -> [PathBuf; 3] {
    ["A", "B", "C"].map(|n| dir.join(format!("{prefix}{n}.mtx")))
}
