//! Scaling-factor search.
