//! The confidence-weighted ALS recommender with content-embedding regression.
//!
//! Warm items (those with training ratings) learn free latent factors that a
//! ridge term tethers to a linear projection of their content features; cold
//! items are scored through that projection alone. Confidence weights follow
//! the implicit-feedback convention — observed positives count fully,
//! unobserved cells carry a small base weight — with an optional popularity
//! scaling exponent `d` on the positive weights.

mod confidence;
mod model;
mod params;
mod train;

pub use confidence::confidence;
pub use model::{CerModel, SweepRecord};
pub use params::CerHyperParams;
pub use train::{carve_validation, train, train_with_positive_confidences};
