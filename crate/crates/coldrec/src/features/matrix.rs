use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::{Error, Result};

const FMAT_MAGIC: &[u8; 4] = b"FMAT";
const FMAT_VERSION: u32 = 1;

/// Dense item-level feature matrix: one row per catalogue item, aligned with
/// the dataset id map.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    item_ids: Vec<String>,
    values: DMatrix<f64>,
}

impl FeatureMatrix {
    pub fn new(item_ids: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if item_ids.len() != values.nrows() {
            return Err(Error::DimensionMismatch {
                expected: values.nrows(),
                got: item_ids.len(),
                context: "feature matrix id count vs row count",
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature matrix contains non-finite values"));
        }
        Ok(Self { item_ids, values })
    }

    /// Builds a matrix from per-item rows of equal length.
    pub fn from_rows(item_ids: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
                context: "feature row length",
            });
        }
        let values = DMatrix::from_row_iterator(
            rows.len(),
            dim,
            rows.iter().flat_map(|r| r.iter().copied()),
        );
        Self::new(item_ids, values)
    }

    pub fn n_items(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn row(&self, item: usize) -> Vec<f64> {
        self.values.row(item).iter().copied().collect()
    }

    /// New matrix keeping only the columns in `range`. Used to carve
    /// per-modality slices out of a wider descriptor.
    pub fn select_columns(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.dim() || range.start >= range.end {
            return Err(Error::invalid(format!(
                "column range {range:?} invalid for dim {}",
                self.dim()
            )));
        }
        let sub = self.values.columns(range.start, range.end - range.start).into_owned();
        Self::new(self.item_ids.clone(), sub)
    }

    /// True when both matrices cover the same items in the same order.
    pub fn aligned_with(&self, other: &Self) -> bool {
        self.item_ids == other.item_ids
    }

    /// Writes the binary `FMAT` format: magic `FMAT`, version u32 = 1,
    /// rows u64, cols u64, a length-prefixed UTF-8 row-id table (u32 byte
    /// length then bytes, one entry per row), then row-major little-endian
    /// f64 payload.
    pub fn write_fmat(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        w.write_all(FMAT_MAGIC).map_err(io)?;
        w.write_all(&FMAT_VERSION.to_le_bytes()).map_err(io)?;
        w.write_all(&(self.n_items() as u64).to_le_bytes()).map_err(io)?;
        w.write_all(&(self.dim() as u64).to_le_bytes()).map_err(io)?;
        for id in &self.item_ids {
            w.write_all(&(id.len() as u32).to_le_bytes()).map_err(io)?;
            w.write_all(id.as_bytes()).map_err(io)?;
        }
        for r in 0..self.n_items() {
            for c in 0..self.dim() {
                w.write_all(&self.values[(r, c)].to_le_bytes()).map_err(io)?;
            }
        }
        w.flush().map_err(io)
    }

    pub fn read_fmat(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let malformed = |reason: String| Error::MalformedFile {
            what: "FMAT file",
            path: path.to_path_buf(),
            line: 0,
            reason,
        };
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic, path)?;
        if &magic != FMAT_MAGIC {
            return Err(malformed(format!("bad magic {magic:?}")));
        }
        let version = read_u32(&mut r, path)?;
        if version != FMAT_VERSION {
            return Err(malformed(format!("unsupported version {version}")));
        }
        let rows = read_u64(&mut r, path)? as usize;
        let cols = read_u64(&mut r, path)? as usize;
        let mut item_ids = Vec::with_capacity(rows);
        for _ in 0..rows {
            let len = read_u32(&mut r, path)? as usize;
            let mut buf = vec![0u8; len];
            read_exact(&mut r, &mut buf, path)?;
            let id = String::from_utf8(buf)
                .map_err(|e| malformed(format!("row id is not UTF-8: {e}")))?;
            item_ids.push(id);
        }
        let mut data = Vec::with_capacity(rows * cols);
        let mut buf = [0u8; 8];
        for _ in 0..rows * cols {
            read_exact(&mut r, &mut buf, path)?;
            data.push(f64::from_le_bytes(buf));
        }
        Self::new(item_ids, DMatrix::from_row_iterator(rows, cols, data))
    }

    /// Writes the CSV form with header `item_id,f0..f{D-1}`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["item_id".to_owned()];
        header.extend((0..self.dim()).map(|c| format!("f{c}")));
        w.write_record(&header)?;
        for (r, id) in self.item_ids.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend((0..self.dim()).map(|c| format_float(self.values[(r, c)])));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let dim = reader.headers()?.len().saturating_sub(1);
        let mut item_ids = Vec::new();
        let mut rows = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec?;
            if rec.len() != dim + 1 {
                return Err(Error::MalformedFile {
                    what: "feature CSV",
                    path: path.to_path_buf(),
                    line: line as u64 + 2,
                    reason: format!("expected {} fields, got {}", dim + 1, rec.len()),
                });
            }
            item_ids.push(rec[0].to_owned());
            let row: std::result::Result<Vec<f64>, _> =
                (1..=dim).map(|c| rec[c].parse::<f64>()).collect();
            rows.push(row.map_err(|e| Error::MalformedFile {
                what: "feature CSV",
                path: path.to_path_buf(),
                line: line as u64 + 2,
                reason: e.to_string(),
            })?);
        }
        Self::from_rows(item_ids, &rows)
    }
}

/// Round-trippable float formatting for CSV output.
fn format_float(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], path: &Path) -> Result<()> {
    r.read_exact(buf).map_err(|e| Error::io(path, e))
}

fn read_u32(r: &mut impl Read, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, path)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read, path: &Path) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, path)?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn sample() -> FeatureMatrix {
        FeatureMatrix::from_rows(
            vec!["a".into(), "b".into(), "c".into()],
            &[
                vec![1.0, -2.5, 0.0],
                vec![0.125, 3.0, 1e-12],
                vec![-7.0, 0.5, 2.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn fmat_round_trip_is_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.fmat");
        let m = sample();
        m.write_fmat(&path).unwrap();
        let back = FeatureMatrix::read_fmat(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = sample();
        m.write_csv(&path).unwrap();
        let back = FeatureMatrix::read_csv(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn select_columns_slices() {
        let m = sample();
        let s = m.select_columns(1..3).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.row(0), vec![-2.5, 0.0]);
        assert!(m.select_columns(2..2).is_err());
        assert!(m.select_columns(1..4).is_err());
    }

    #[test]
    fn rejects_ragged_rows_and_nonfinite() {
        assert!(FeatureMatrix::from_rows(
            vec!["a".into(), "b".into()],
            &[vec![1.0], vec![1.0, 2.0]],
        )
        .is_err());
        assert!(FeatureMatrix::from_rows(vec!["a".into()], &[vec![f64::NAN]]).is_err());
    }
}
