//! Matrix and label file formats.
//!
//! Two matrix formats are supported:
//! - text CSV, one line per matrix row, comma-separated; values are written
//!   with Rust's shortest round-trip float formatting, so save/load
//!   reproduces every value exactly;
//! - a tagged little-endian binary format: 8-byte magic `S3CMAT01`, `u64`
//!   row and column counts, then the `f64` payload in column-major order.
//!
//! Labels are one integer per line, 1-based. Files with gaps in the cluster
//! indices are accepted and remapped to dense `1..=n`; the remap table is
//! returned so callers can surface a warning.

use super::{DatasetError, GroundTruthLabels};
use ndarray::Array2;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"S3CMAT01";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Binary,
}

impl MatrixFormat {
    /// Pick a format from the file extension: `.csv` is text, everything
    /// else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Binary,
        }
    }
}

pub fn save_matrix(m: &Array2<f64>, path: &Path, format: MatrixFormat) -> Result<(), DatasetError> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        MatrixFormat::Csv => {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    if j > 0 {
                        write!(w, ",")?;
                    }
                    write!(w, "{}", m[(i, j)])?;
                }
                writeln!(w)?;
            }
        }
        MatrixFormat::Binary => {
            w.write_all(MAGIC)?;
            w.write_all(&(m.nrows() as u64).to_le_bytes())?;
            w.write_all(&(m.ncols() as u64).to_le_bytes())?;
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    w.write_all(&m[(i, j)].to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<Array2<f64>, DatasetError> {
    match format {
        MatrixFormat::Csv => load_csv(path),
        MatrixFormat::Binary => load_binary(path),
    }
}

fn load_csv(path: &Path) -> Result<Array2<f64>, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col_idx, token) in line.split(',').enumerate() {
            let v: f64 = token.trim().parse().map_err(|_| DatasetError::Parse {
                line: line_idx + 1,
                column: col_idx + 1,
                message: format!("not a number: {:?}", token.trim()),
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(DatasetError::ShapeMismatch(format!(
                    "line {} has {} fields, expected {}",
                    line_idx + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DatasetError::ShapeMismatch("empty matrix file".into()));
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(Array2::from_shape_fn((nr, nc), |(i, j)| rows[i][j]))
}

fn load_binary(path: &Path) -> Result<Array2<f64>, DatasetError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(DatasetError::Parse {
            line: 0,
            column: 0,
            message: "bad magic; not a matrix file".into(),
        });
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)?;
    let nr = u64::from_le_bytes(buf8) as usize;
    r.read_exact(&mut buf8)?;
    let nc = u64::from_le_bytes(buf8) as usize;
    let mut m = Array2::zeros((nr, nc));
    for j in 0..nc {
        for i in 0..nr {
            r.read_exact(&mut buf8)?;
            m[(i, j)] = f64::from_le_bytes(buf8);
        }
    }
    Ok(m)
}

/// Labels plus the remap table applied when the file had gaps.
#[derive(Debug, Clone)]
pub struct LabelLoad {
    pub labels: GroundTruthLabels,
    /// `(original, remapped)` pairs, present only if a remap was needed.
    pub remap: Option<Vec<(usize, usize)>>,
}

pub fn save_labels(labels: &GroundTruthLabels, path: &Path) -> Result<(), DatasetError> {
    let mut w = BufWriter::new(File::create(path)?);
    for &l in labels.as_slice() {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_labels(path: &Path) -> Result<LabelLoad, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut raw: Vec<usize> = Vec::new();
    for (line_idx, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: usize = t.parse().map_err(|_| DatasetError::Parse {
            line: line_idx + 1,
            column: 1,
            message: format!("not a cluster index: {t:?}"),
        })?;
        if v == 0 {
            return Err(DatasetError::Parse {
                line: line_idx + 1,
                column: 1,
                message: "cluster indices are 1-based".into(),
            });
        }
        raw.push(v);
    }
    if raw.is_empty() {
        return Err(DatasetError::ShapeMismatch("empty labels file".into()));
    }

    // Dense remap: distinct values in ascending order become 1..=n.
    let mut distinct: Vec<usize> = raw.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let dense_already = distinct.iter().enumerate().all(|(i, &v)| v == i + 1);
    let remap = if dense_already {
        None
    } else {
        Some(distinct.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect())
    };
    let labels: Vec<usize> = raw
        .iter()
        .map(|v| distinct.binary_search(v).expect("value came from this list") + 1)
        .collect();
    Ok(LabelLoad { labels: GroundTruthLabels::new(labels)?, remap })
}
