//! Hybrid cold-start movie recommendation: weighted-ALS matrix factorization
//! with content-embedding regression, popularity-scaled confidence weights,
//! multimodal feature pipelines and a warm/cold evaluation harness.
//!
//! The crate is organised around the stages of an experiment:
//!
//! - [`data`] — sparse binary interaction matrices, fold splitting, and a
//!   synthetic dataset generator for end-to-end runs without external data.
//! - [`features`] — frame-level descriptor aggregation, SSR / PCA / L2
//!   post-processing, and genre encoding.
//! - [`fusion`] — early fusion (concat / sum / max) of per-modality features.
//! - [`cer`] — the confidence-weighted ALS recommender with a linear content
//!   projection for items that have no training ratings.
//! - [`eval`] — MAP / NDCG / intra-list diversity / coverage / entropy and the
//!   cross-validation harness.
//! - [`tuning`] — grid and Bayesian (GP expected-improvement) search for the
//!   popularity scaling factor.
//! - [`commands`] — filesystem-level orchestration backing the `coldrec` CLI.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cer;
pub mod commands;
pub mod config;
pub mod data;
mod error;
pub mod eval;
pub mod features;
pub mod fusion;
pub mod seeding;
pub mod tuning;

pub use error::{Error, Result};
