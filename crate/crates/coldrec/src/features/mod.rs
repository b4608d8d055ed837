//! Content feature processing: frame aggregation, SSR / PCA / L2
//! post-processing, genre encoding, and the dense item-feature matrix.

mod aggregate;
mod genres;
mod matrix;
mod pca;
mod pipeline;
mod transform;

pub use aggregate::{aggregate_frames, Aggregator, FrameFeatureMatrix};
pub use genres::{encode_genres, GenreMatrix, PAPER_GENRES};
pub use matrix::FeatureMatrix;
pub use pca::{apply_pca, fit_pca, PcaModel};
pub use pipeline::{build_descriptors, AggregationSpec, PipelineFlags};
pub use transform::{l2_normalize, l2_normalize_rows, ssr, ssr_rows};
