//! Early fusion of per-modality feature matrices.
//!
//! Three operators combine `L >= 2` aligned matrices: `concat` joins rows
//! into one wide vector, `sum` and `max` first reduce every wider input to a
//! common dimension with per-modality PCA and then combine element-wise.

use serde::{Deserialize, Serialize};

use crate::features::{apply_pca, fit_pca, l2_normalize_rows, FeatureMatrix};
use crate::{Error, Result};

/// Fusion operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMethod {
    Concat,
    Sum,
    Max,
}

impl FusionMethod {
    pub fn name(self) -> &'static str {
        match self {
            FusionMethod::Concat => "concat",
            FusionMethod::Sum => "sum",
            FusionMethod::Max => "max",
        }
    }
}

impl std::str::FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concat" => Ok(FusionMethod::Concat),
            "sum" => Ok(FusionMethod::Sum),
            "max" => Ok(FusionMethod::Max),
            other => Err(Error::invalid(format!("unknown fusion method `{other}`"))),
        }
    }
}

/// Declarative fusion recipe as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionSpec {
    pub method: FusionMethod,
    /// Ordered modality names; resolved to matrices by the caller.
    pub inputs: Vec<String>,
    /// Target dimension for sum/max; defaults to the smallest input dim.
    #[serde(default)]
    pub reduce_dim: Option<usize>,
    /// L2-normalize fused rows (default on, so each modality keeps the
    /// equal-contribution property of unit input vectors).
    #[serde(default = "default_true")]
    pub renormalize: bool,
}

fn default_true() -> bool {
    true
}

impl FusionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.len() < 2 {
            return Err(Error::TooFewFusionInputs(self.inputs.len()));
        }
        Ok(())
    }

    /// Runs the configured fusion over matrices ordered as `self.inputs`.
    pub fn fuse(&self, inputs: &[&FeatureMatrix]) -> Result<FeatureMatrix> {
        self.validate()?;
        if inputs.len() != self.inputs.len() {
            return Err(Error::invalid(format!(
                "fusion spec names {} inputs but {} matrices were supplied",
                self.inputs.len(),
                inputs.len()
            )));
        }
        let mut fused = match self.method {
            FusionMethod::Concat => fuse_concat(inputs)?,
            FusionMethod::Sum => fuse_sum(inputs, self.reduce_dim)?,
            FusionMethod::Max => fuse_max(inputs, self.reduce_dim)?,
        };
        if self.renormalize {
            let mut values = fused.values().clone();
            l2_normalize_rows(&mut values);
            fused = FeatureMatrix::new(fused.item_ids().to_vec(), values)?;
        }
        Ok(fused)
    }
}

fn check_alignment(inputs: &[&FeatureMatrix]) -> Result<()> {
    if inputs.len() < 2 {
        return Err(Error::TooFewFusionInputs(inputs.len()));
    }
    let first = inputs[0];
    for (pos, m) in inputs.iter().enumerate().skip(1) {
        if m.n_items() != first.n_items() {
            return Err(Error::ItemMisalignment(format!(
                "input 0 has {} items but input {pos} has {}",
                first.n_items(),
                m.n_items()
            )));
        }
        if !m.aligned_with(first) {
            return Err(Error::ItemMisalignment(format!(
                "input {pos} lists items in a different order than input 0"
            )));
        }
    }
    Ok(())
}

/// Concatenates rows in input order; output dim is the sum of input dims.
/// No renormalization is applied here.
pub fn fuse_concat(inputs: &[&FeatureMatrix]) -> Result<FeatureMatrix> {
    check_alignment(inputs)?;
    let n = inputs[0].n_items();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|r| inputs.iter().flat_map(|m| m.row(r)).collect())
        .collect();
    FeatureMatrix::from_rows(inputs[0].item_ids().to_vec(), &rows)
}

/// Reduces every input wider than the target dimension with a per-modality
/// PCA fit on that input alone. Inputs already at the target pass through
/// bitwise unchanged.
fn reduce_to_common_dim(
    inputs: &[&FeatureMatrix],
    reduce_dim: Option<usize>,
) -> Result<Vec<FeatureMatrix>> {
    let min_dim = inputs.iter().map(|m| m.dim()).min().expect("non-empty");
    let target = reduce_dim.unwrap_or(min_dim);
    if target == 0 || target > min_dim {
        return Err(Error::invalid(format!(
            "reduce_dim {target} must be in 1..={min_dim} (smallest input dim)"
        )));
    }
    inputs
        .iter()
        .map(|&m| {
            if m.dim() == target {
                Ok(m.clone())
            } else {
                let model = fit_pca(m, target)?;
                apply_pca(&model, m)
            }
        })
        .collect()
}

fn fuse_elementwise(
    inputs: &[&FeatureMatrix],
    reduce_dim: Option<usize>,
    combine: impl Fn(f64, f64) -> f64,
) -> Result<FeatureMatrix> {
    check_alignment(inputs)?;
    let reduced = reduce_to_common_dim(inputs, reduce_dim)?;
    let mut acc = reduced[0].values().clone();
    for m in &reduced[1..] {
        acc.zip_apply(m.values(), |a, b| *a = combine(*a, b));
    }
    FeatureMatrix::new(inputs[0].item_ids().to_vec(), acc)
}

/// Element-wise sum after PCA reduction to the common dimension.
pub fn fuse_sum(inputs: &[&FeatureMatrix], reduce_dim: Option<usize>) -> Result<FeatureMatrix> {
    fuse_elementwise(inputs, reduce_dim, |a, b| a + b)
}

/// Element-wise maximum after PCA reduction to the common dimension.
pub fn fuse_max(inputs: &[&FeatureMatrix], reduce_dim: Option<usize>) -> Result<FeatureMatrix> {
    fuse_elementwise(inputs, reduce_dim, f64::max)
}
