//! Interaction data: sparse binary user-item matrices, identifier mapping,
//! the warm/cold fold-splitting protocol, and a synthetic dataset generator.

mod folds;
mod idmap;
mod interactions;
pub mod io;
mod synth;

pub use folds::{split_folds, FoldSplit};
pub use idmap::IdMap;
pub use interactions::{binarize, column_norms, BinarizedRatings, InteractionMatrix, RatingRecord};
pub use synth::{synth_dataset, SynthGroundTruth, SynthParams, SyntheticDataset};
