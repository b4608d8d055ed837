use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Frame-level descriptor sequence for one video: `T` frames (or segments)
/// by `D` descriptor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatureMatrix {
    item_id: String,
    values: DMatrix<f64>,
}

impl FrameFeatureMatrix {
    pub fn new(item_id: impl Into<String>, values: DMatrix<f64>) -> Result<Self> {
        let item_id = item_id.into();
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::EmptyFrameMatrix(item_id));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "frame matrix for item `{item_id}` contains non-finite values"
            )));
        }
        Ok(Self { item_id, values })
    }

    pub fn from_rows(item_id: impl Into<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let item_id = item_id.into();
        let dim = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || dim == 0 {
            return Err(Error::EmptyFrameMatrix(item_id));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
                context: "frame row length",
            });
        }
        let values = DMatrix::from_row_iterator(
            rows.len(),
            dim,
            rows.iter().flat_map(|r| r.iter().copied()),
        );
        Self::new(item_id, values)
    }

    pub fn item_id(&self) -> &str {
        &self.item_id
    }

    /// Reads the per-item frame file `<item_id>.csv`: `T` rows by `D`
    /// columns of floats, no header.
    pub fn read_csv(path: &std::path::Path, item_id: impl Into<String>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(path)?;
        let mut rows = Vec::new();
        for (idx, rec) in reader.records().enumerate() {
            let rec = rec?;
            let row: std::result::Result<Vec<f64>, _> =
                rec.iter().map(str::parse::<f64>).collect();
            rows.push(row.map_err(|e| Error::MalformedFile {
                what: "frame feature CSV",
                path: path.to_path_buf(),
                line: idx as u64 + 1,
                reason: e.to_string(),
            })?);
        }
        Self::from_rows(item_id, &rows)
    }

    /// Number of frames `T`.
    pub fn n_frames(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}

/// Statistical aggregator collapsing a `T x D` frame sequence into one
/// `D`-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    Max,
    Mean,
    Median,
    Variance,
    /// Median absolute deviation: `median(|x - median(x)|)`.
    Mad,
    /// Interquartile range with linear-interpolation quantiles.
    Iqr,
}

impl Aggregator {
    pub const ALL: [Aggregator; 6] = [
        Aggregator::Max,
        Aggregator::Mean,
        Aggregator::Median,
        Aggregator::Variance,
        Aggregator::Mad,
        Aggregator::Iqr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Max => "max",
            Aggregator::Mean => "mean",
            Aggregator::Median => "median",
            Aggregator::Variance => "variance",
            Aggregator::Mad => "mad",
            Aggregator::Iqr => "iqr",
        }
    }
}

impl std::str::FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Aggregator::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown aggregator `{s}`")))
    }
}

/// Collapses the frame sequence column-wise using one statistic.
///
/// Variance is the population form (divide by `T`), so a single frame gives
/// zeros for variance, MAD and IQR, and the frame itself for the rest.
pub fn aggregate_frames(frames: &FrameFeatureMatrix, method: Aggregator) -> Vec<f64> {
    let t = frames.n_frames();
    (0..frames.dim())
        .map(|c| {
            let col: Vec<f64> = frames.values().column(c).iter().copied().collect();
            match method {
                Aggregator::Max => col.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                Aggregator::Mean => col.iter().sum::<f64>() / t as f64,
                Aggregator::Median => quantile_sorted(&sorted(&col), 0.5),
                Aggregator::Variance => {
                    let mean = col.iter().sum::<f64>() / t as f64;
                    col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / t as f64
                }
                Aggregator::Mad => {
                    let med = quantile_sorted(&sorted(&col), 0.5);
                    let devs: Vec<f64> = col.iter().map(|x| (x - med).abs()).collect();
                    quantile_sorted(&sorted(&devs), 0.5)
                }
                Aggregator::Iqr => {
                    let s = sorted(&col);
                    quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25)
                }
            }
        })
        .collect()
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    v
}

/// Linear-interpolation quantile of pre-sorted data: rank `h = (n-1)q`,
/// interpolated between the two closest order statistics.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn frames(rows: &[Vec<f64>]) -> FrameFeatureMatrix {
        FrameFeatureMatrix::from_rows("t", rows).unwrap()
    }

    #[test]
    fn mean_and_max() {
        let f = frames(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        assert_eq!(aggregate_frames(&f, Aggregator::Mean), vec![3.0, 4.0]);
        assert_eq!(aggregate_frames(&f, Aggregator::Max), vec![5.0, 6.0]);
    }

    #[test]
    fn mad_hand_value() {
        // median 3; deviations [2,1,0,1,97]; median deviation 1
        let f = frames(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0], vec![100.0]]);
        assert_abs_diff_eq!(aggregate_frames(&f, Aggregator::Mad)[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn iqr_hand_value() {
        // Q25 = 1.75, Q75 = 3.25 with linear interpolation
        let f = frames(&[vec![1.0], vec![2.0], vec![3.0], vec![4.0]]);
        assert_abs_diff_eq!(aggregate_frames(&f, Aggregator::Iqr)[0], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn single_frame_dispersion_is_zero() {
        let f = frames(&[vec![4.0, -1.0]]);
        assert_eq!(aggregate_frames(&f, Aggregator::Max), vec![4.0, -1.0]);
        assert_eq!(aggregate_frames(&f, Aggregator::Mean), vec![4.0, -1.0]);
        assert_eq!(aggregate_frames(&f, Aggregator::Median), vec![4.0, -1.0]);
        assert_eq!(aggregate_frames(&f, Aggregator::Variance), vec![0.0, 0.0]);
        assert_eq!(aggregate_frames(&f, Aggregator::Mad), vec![0.0, 0.0]);
        assert_eq!(aggregate_frames(&f, Aggregator::Iqr), vec![0.0, 0.0]);
    }

    #[test]
    fn population_variance() {
        let f = frames(&[vec![1.0], vec![3.0]]);
        // mean 2, squared deviations [1, 1], population variance 1
        assert_abs_diff_eq!(
            aggregate_frames(&f, Aggregator::Variance)[0],
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(FrameFeatureMatrix::from_rows("x", &[]).is_err());
        let ragged: &[Vec<f64>] = &[vec![1.0], vec![1.0, 2.0]];
        assert!(FrameFeatureMatrix::from_rows("x", ragged).is_err());
    }
}
