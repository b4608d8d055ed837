use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{IdMap, InteractionMatrix};
use crate::features::{FeatureMatrix, PAPER_GENRES};
use crate::seeding::{rng, subseed};
use crate::{Error, Result};

/// Additive weight on the Zipf popularity term relative to the unit-scale
/// user-item affinities.
const POPULARITY_GAIN: f64 = 2.0;

/// Parameters of the synthetic dataset generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub n_users: usize,
    pub n_items: usize,
    /// Number of items designated cold in the ground truth.
    pub n_cold: usize,
    pub feature_dim: usize,
    pub latent_dim: usize,
    /// Zipf exponent of the item-popularity bias; 0 disables it.
    pub popularity_skew: f64,
    /// Std-dev of the noise decoupling item latents from their features.
    pub noise_std: f64,
    /// Target fraction of positive cells.
    pub density_target: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            n_users: 2000,
            n_items: 500,
            n_cold: 100,
            feature_dim: 32,
            latent_dim: 16,
            popularity_skew: 1.0,
            noise_std: 0.1,
            density_target: 0.02,
            seed: 42,
        }
    }
}

/// The generating quantities behind a synthetic dataset, kept so tests can
/// assert against the known truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthGroundTruth {
    pub params: SynthParams,
    /// True user factors, `n_users x latent_dim`.
    pub user_factors: Vec<Vec<f64>>,
    /// True item latents (content projection plus noise), `n_items x latent_dim`.
    pub item_latents: Vec<Vec<f64>>,
    /// True content projection, `feature_dim x latent_dim`.
    pub projection: Vec<Vec<f64>>,
    /// Per-item popularity weights in (0, 1].
    pub popularity: Vec<f64>,
    /// Score threshold that realised the target density.
    pub threshold: f64,
    pub realized_density: f64,
    /// Indices of the items designated cold.
    pub cold_items: Vec<u32>,
}

/// A fully materialised synthetic dataset.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub interactions: InteractionMatrix,
    pub features: FeatureMatrix,
    pub genres: Vec<(String, BTreeSet<String>)>,
    pub users: IdMap,
    pub items: IdMap,
    pub ground_truth: SynthGroundTruth,
}

/// Generates a seeded synthetic dataset with planted low-rank structure.
///
/// Item latents are a linear function of the item features plus noise, user
/// preferences are inner products in that latent space, and a Zipf-shaped
/// popularity bias is added per item. Scores are thresholded at the quantile
/// matching `density_target`, so the planted signal is recoverable both from
/// ratings (warm) and from features alone (cold).
pub fn synth_dataset(params: &SynthParams) -> Result<SyntheticDataset> {
    if params.n_cold >= params.n_items {
        return Err(Error::invalid(format!(
            "n_cold ({}) must be smaller than n_items ({})",
            params.n_cold, params.n_items
        )));
    }
    if !(params.density_target > 0.0 && params.density_target < 1.0) {
        return Err(Error::invalid(format!(
            "density_target {} must lie in (0, 1)",
            params.density_target
        )));
    }
    if params.n_users == 0 || params.n_items == 0 || params.latent_dim == 0 {
        return Err(Error::invalid("n_users, n_items and latent_dim must be positive"));
    }

    let mut r = rng(subseed(params.seed, "synth"));
    let (n, m, k, d) = (
        params.n_users,
        params.n_items,
        params.latent_dim,
        params.feature_dim,
    );

    // Scales chosen so affinities come out near unit variance.
    let user_scale = 1.0 / (k as f64).sqrt();
    let feat_scale = 1.0 / (d as f64).sqrt();
    let user_factors =
        DMatrix::from_fn(n, k, |_, _| user_scale * r.sample::<f64, _>(StandardNormal));
    let features_raw =
        DMatrix::from_fn(m, d, |_, _| feat_scale * r.sample::<f64, _>(StandardNormal));
    let projection = DMatrix::from_fn(d, k, |_, _| r.sample::<f64, _>(StandardNormal));
    let noise = DMatrix::from_fn(m, k, |_, _| {
        params.noise_std * r.sample::<f64, _>(StandardNormal)
    });
    let item_latents = &features_raw * &projection + noise;

    // Zipf popularity: rank items by a seeded permutation, weight 1/(rank+1)^s.
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut r);
    let mut popularity = vec![0.0; m];
    for (rank, &item) in perm.iter().enumerate() {
        popularity[item] = ((rank + 1) as f64).powf(-params.popularity_skew);
    }

    let affinity = &user_factors * item_latents.transpose();
    let mut scores = affinity.clone();
    for i in 0..m {
        let bias = POPULARITY_GAIN * popularity[i];
        for u in 0..n {
            scores[(u, i)] += bias;
        }
    }

    let threshold = density_threshold(scores.as_slice(), params.density_target)?;
    let mut pairs = Vec::new();
    for u in 0..n {
        for i in 0..m {
            if scores[(u, i)] > threshold {
                pairs.push((u as u32, i as u32));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::InfeasibleDensity {
            requested: params.density_target,
            reason: "no score exceeds the quantile threshold".into(),
        });
    }
    let realized_density = pairs.len() as f64 / (n * m) as f64;
    let interactions = InteractionMatrix::from_pairs(n, m, pairs)?;

    let mut cold_pool: Vec<u32> = (0..m as u32).collect();
    cold_pool.shuffle(&mut r);
    let mut cold_items: Vec<u32> = cold_pool.into_iter().take(params.n_cold).collect();
    cold_items.sort_unstable();

    let users = IdMap::from_ids((0..n).map(|u| format!("u{u}")))?;
    let items = IdMap::from_ids((0..m).map(|i| format!("i{i}")))?;
    let features = FeatureMatrix::new(items.ids().to_vec(), features_raw)?;

    let genres = items
        .ids()
        .iter()
        .map(|id| {
            let count = r.gen_range(1..=3usize);
            let mut labels = BTreeSet::new();
            while labels.len() < count {
                let g = PAPER_GENRES[r.gen_range(0..PAPER_GENRES.len())];
                labels.insert(g.to_owned());
            }
            (id.clone(), labels)
        })
        .collect();

    let ground_truth = SynthGroundTruth {
        params: params.clone(),
        user_factors: matrix_rows(&user_factors),
        item_latents: matrix_rows(&item_latents),
        projection: matrix_rows(&projection),
        popularity,
        threshold,
        realized_density,
        cold_items,
    };

    Ok(SyntheticDataset {
        interactions,
        features,
        genres,
        users,
        items,
        ground_truth,
    })
}

/// Linear-interpolation quantile at `1 - density` over all scores.
fn density_threshold(scores: &[f64], density: f64) -> Result<f64> {
    let expected = density * scores.len() as f64;
    if expected < 1.0 {
        return Err(Error::InfeasibleDensity {
            requested: density,
            reason: format!(
                "would produce fewer than one positive over {} cells",
                scores.len()
            ),
        });
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let q = 1.0 - density;
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let threshold = if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    if !threshold.is_finite() || threshold == sorted[sorted.len() - 1] {
        return Err(Error::InfeasibleDensity {
            requested: density,
            reason: "quantile threshold is degenerate".into(),
        });
    }
    Ok(threshold)
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}
