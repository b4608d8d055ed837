use serde::{Deserialize, Serialize};

use crate::features::{
    aggregate_frames, apply_pca, fit_pca, l2_normalize_rows, ssr_rows, Aggregator, FeatureMatrix,
    FrameFeatureMatrix,
};
use crate::{Error, Result};

/// Which statistic(s) collapse the frame axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationSpec {
    Max,
    Mean,
    Median,
    Variance,
    Mad,
    Iqr,
    /// Concatenate all six statistics into a `6 * D` descriptor.
    All,
}

impl AggregationSpec {
    fn aggregators(self) -> Vec<Aggregator> {
        match self {
            AggregationSpec::Max => vec![Aggregator::Max],
            AggregationSpec::Mean => vec![Aggregator::Mean],
            AggregationSpec::Median => vec![Aggregator::Median],
            AggregationSpec::Variance => vec![Aggregator::Variance],
            AggregationSpec::Mad => vec![Aggregator::Mad],
            AggregationSpec::Iqr => vec![Aggregator::Iqr],
            AggregationSpec::All => Aggregator::ALL.to_vec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AggregationSpec::Max => "max",
            AggregationSpec::Mean => "mean",
            AggregationSpec::Median => "median",
            AggregationSpec::Variance => "variance",
            AggregationSpec::Mad => "mad",
            AggregationSpec::Iqr => "iqr",
            AggregationSpec::All => "all",
        }
    }
}

impl std::str::FromStr for AggregationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            AggregationSpec::Max,
            AggregationSpec::Mean,
            AggregationSpec::Median,
            AggregationSpec::Variance,
            AggregationSpec::Mad,
            AggregationSpec::Iqr,
            AggregationSpec::All,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::invalid(format!("unknown aggregation method `{s}`")))
    }
}

/// Post-processing switches applied after aggregation, in pipeline order:
/// SSR, then full-rank PCA fitted over all items, then per-row L2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineFlags {
    pub ssr: bool,
    pub pca: bool,
    pub l2: bool,
}

impl Default for PipelineFlags {
    fn default() -> Self {
        Self {
            ssr: true,
            pca: true,
            l2: true,
        }
    }
}

impl PipelineFlags {
    pub fn none() -> Self {
        Self {
            ssr: false,
            pca: false,
            l2: false,
        }
    }
}

/// Turns per-item frame sequences into a fixed-length item descriptor matrix.
///
/// Applies the aggregator per item, then optionally SSR per row, PCA with
/// `k = dim` fitted on the whole item set (content for every catalogue item,
/// cold ones included, is assumed available), and L2 normalization per row.
pub fn build_descriptors(
    per_item_frames: &[FrameFeatureMatrix],
    method: AggregationSpec,
    flags: PipelineFlags,
) -> Result<FeatureMatrix> {
    if per_item_frames.is_empty() {
        return Err(Error::invalid("no frame matrices supplied"));
    }
    let d = per_item_frames[0].dim();
    if let Some(bad) = per_item_frames.iter().find(|f| f.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.dim(),
            context: "frame descriptor dim across items",
        });
    }

    let aggregators = method.aggregators();
    let mut item_ids = Vec::with_capacity(per_item_frames.len());
    let mut rows = Vec::with_capacity(per_item_frames.len());
    for frames in per_item_frames {
        item_ids.push(frames.item_id().to_owned());
        let mut row = Vec::with_capacity(aggregators.len() * d);
        for &agg in &aggregators {
            row.extend(aggregate_frames(frames, agg));
        }
        rows.push(row);
    }
    let mut matrix = FeatureMatrix::from_rows(item_ids, &rows)?;

    if flags.ssr {
        let mut values = matrix.values().clone();
        ssr_rows(&mut values);
        matrix = FeatureMatrix::new(matrix.item_ids().to_vec(), values)?;
    }
    if flags.pca {
        let model = fit_pca(&matrix, matrix.dim())?;
        matrix = apply_pca(&model, &matrix)?;
    }
    if flags.l2 {
        let mut values = matrix.values().clone();
        l2_normalize_rows(&mut values);
        matrix = FeatureMatrix::new(matrix.item_ids().to_vec(), values)?;
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn toy_frames() -> Vec<FrameFeatureMatrix> {
        (0..5)
            .map(|i| {
                let base = i as f64;
                FrameFeatureMatrix::from_rows(
                    format!("i{i}"),
                    &[
                        vec![base, 1.0 - base, 2.0],
                        vec![base + 1.0, base, -1.0],
                        vec![base - 0.5, 2.0 * base, 0.5],
                    ],
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn identity_pipeline_is_plain_aggregation() {
        let frames = toy_frames();
        let m = build_descriptors(&frames, AggregationSpec::Mean, PipelineFlags::none()).unwrap();
        for (r, f) in frames.iter().enumerate() {
            assert_eq!(m.row(r), aggregate_frames(f, Aggregator::Mean));
        }
    }

    #[test]
    fn l2_flag_forces_unit_rows() {
        let flags = PipelineFlags {
            ssr: true,
            pca: true,
            l2: true,
        };
        let m = build_descriptors(&toy_frames(), AggregationSpec::Mean, flags).unwrap();
        for r in 0..m.n_items() {
            let norm: f64 = m.row(r).iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn full_rank_pca_preserves_dim() {
        let flags = PipelineFlags {
            ssr: false,
            pca: true,
            l2: false,
        };
        let m = build_descriptors(&toy_frames(), AggregationSpec::Mean, flags).unwrap();
        assert_eq!(m.dim(), 3);
    }

    #[test]
    fn all_mode_concatenates_six_statistics() {
        let m = build_descriptors(&toy_frames(), AggregationSpec::All, PipelineFlags::none())
            .unwrap();
        assert_eq!(m.dim(), 18);
        let f = &toy_frames()[0];
        let expected: Vec<f64> = Aggregator::ALL
            .iter()
            .flat_map(|&a| aggregate_frames(f, a))
            .collect();
        assert_eq!(m.row(0), expected);
    }

    #[test]
    fn inconsistent_dims_rejected() {
        let frames = vec![
            FrameFeatureMatrix::from_rows("a", &[vec![1.0, 2.0]]).unwrap(),
            FrameFeatureMatrix::from_rows("b", &[vec![1.0]]).unwrap(),
        ];
        assert!(build_descriptors(&frames, AggregationSpec::Mean, PipelineFlags::none()).is_err());
    }
}
