use std::collections::HashMap;

use crate::data::IdMap;
use crate::{Error, Result};

/// One raw rating event before binarization.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingRecord {
    pub user: String,
    pub item: String,
    pub rating: f64,
}

impl RatingRecord {
    pub fn new(user: impl Into<String>, item: impl Into<String>, rating: f64) -> Self {
        Self {
            user: user.into(),
            item: item.into(),
            rating,
        }
    }
}

/// Sparse binary user-item rating matrix.
///
/// Stores the positive cells only; every absent pair means `r_ui = 0`.
/// Both row-major (per-user) and column-major (per-item) adjacency are kept
/// so that user updates, item updates and column norms are all cheap.
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionMatrix {
    n_users: usize,
    n_items: usize,
    rows: Vec<Vec<u32>>,
    cols: Vec<Vec<u32>>,
    nnz: usize,
}

impl InteractionMatrix {
    /// Builds a matrix from positive (user, item) pairs.
    ///
    /// Duplicate pairs are rejected; out-of-range indices are rejected.
    pub fn from_pairs(
        n_users: usize,
        n_items: usize,
        pairs: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n_users];
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n_items];
        let mut nnz = 0usize;
        for (u, i) in pairs {
            if u as usize >= n_users {
                return Err(Error::IndexOutOfBounds {
                    what: "users",
                    index: u as usize,
                    size: n_users,
                });
            }
            if i as usize >= n_items {
                return Err(Error::IndexOutOfBounds {
                    what: "items",
                    index: i as usize,
                    size: n_items,
                });
            }
            rows[u as usize].push(i);
            cols[i as usize].push(u);
            nnz += 1;
        }
        for r in &mut rows {
            r.sort_unstable();
            if r.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("duplicate (user, item) pair"));
            }
        }
        for c in &mut cols {
            c.sort_unstable();
        }
        Ok(Self {
            n_users,
            n_items,
            rows,
            cols,
            nnz,
        })
    }

    pub fn empty(n_users: usize, n_items: usize) -> Self {
        Self {
            n_users,
            n_items,
            rows: vec![Vec::new(); n_users],
            cols: vec![Vec::new(); n_items],
            nnz: 0,
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    /// Number of stored positives.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// Items rated positively by `user`, ascending.
    pub fn user_items(&self, user: u32) -> &[u32] {
        &self.rows[user as usize]
    }

    /// Users who rated `item` positively, ascending.
    pub fn item_users(&self, item: u32) -> &[u32] {
        &self.cols[item as usize]
    }

    pub fn contains(&self, user: u32, item: u32) -> bool {
        self.rows[user as usize].binary_search(&item).is_ok()
    }

    /// All positives as (user, item) pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, items)| items.iter().map(move |&i| (u as u32, i)))
    }
}

/// Result of binarizing raw ratings: the matrix plus the id maps that give
/// meaning to its dense indices.
#[derive(Debug, Clone)]
pub struct BinarizedRatings {
    pub interactions: InteractionMatrix,
    pub users: IdMap,
    pub items: IdMap,
}

/// Converts raw ratings into a binary interaction matrix.
///
/// A pair is stored iff `rating >= positive_threshold` (the conventional
/// threshold is 5, turning 5-star ratings into positives). Users and items
/// are indexed in first-seen order, including those whose every rating falls
/// below the threshold. Repeated (user, item) pairs are tolerated when the
/// rating value is identical and rejected otherwise.
pub fn binarize(raw_ratings: &[RatingRecord], positive_threshold: f64) -> Result<BinarizedRatings> {
    if !positive_threshold.is_finite() {
        return Err(Error::invalid("positive_threshold must be finite"));
    }
    let mut users = IdMap::new();
    let mut items = IdMap::new();
    let mut seen: HashMap<(u32, u32), f64> = HashMap::new();
    let mut pairs = Vec::new();
    for rec in raw_ratings {
        if !rec.rating.is_finite() {
            return Err(Error::invalid(format!(
                "non-finite rating for user `{}`, item `{}`",
                rec.user, rec.item
            )));
        }
        let u = users.intern(&rec.user);
        let i = items.intern(&rec.item);
        if let Some(&prev) = seen.get(&(u, i)) {
            if prev != rec.rating {
                return Err(Error::ConflictingRating {
                    user: rec.user.clone(),
                    item: rec.item.clone(),
                    first: prev,
                    second: rec.rating,
                });
            }
            continue;
        }
        seen.insert((u, i), rec.rating);
        if rec.rating >= positive_threshold {
            pairs.push((u, i));
        }
    }
    let interactions = InteractionMatrix::from_pairs(users.len(), items.len(), pairs)?;
    Ok(BinarizedRatings {
        interactions,
        users,
        items,
    })
}

/// Per-item Euclidean column norms: `sqrt(count of positives)` for binary data.
pub fn column_norms(matrix: &InteractionMatrix) -> Vec<f64> {
    (0..matrix.n_items())
        .map(|i| (matrix.item_users(i as u32).len() as f64).sqrt())
        .collect()
}
