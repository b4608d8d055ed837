use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use crate::data::InteractionMatrix;
use crate::seeding::{rng, subseed_indexed};
use crate::{Error, Result};

/// One cross-validation fold: training ratings plus warm and cold test sets.
///
/// Cold items have every one of their positives withheld from training; warm
/// items keep a per-item share of positives in training and move the rest to
/// the warm test set.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldSplit {
    pub fold_index: usize,
    pub train: InteractionMatrix,
    pub warm_test: InteractionMatrix,
    pub cold_test: InteractionMatrix,
    pub warm_items: BTreeSet<u32>,
    pub cold_items: BTreeSet<u32>,
}

impl FoldSplit {
    /// Builds a fold for a fixed cold item set, splitting every warm item's
    /// positives `train_frac : warm_frac` (seeded per item).
    ///
    /// A warm item with a single positive keeps it in train, so it stays warm
    /// rather than silently turning cold. This is the tie rule for per-item
    /// splits that cannot be divided.
    pub fn with_cold_set(
        full: &InteractionMatrix,
        fold_index: usize,
        cold_items: BTreeSet<u32>,
        train_frac: f64,
        warm_frac: f64,
        seed: u64,
    ) -> Result<Self> {
        if let Some(&bad) = cold_items.iter().find(|&&i| i as usize >= full.n_items()) {
            return Err(Error::IndexOutOfBounds {
                what: "items",
                index: bad as usize,
                size: full.n_items(),
            });
        }
        let train_share = train_frac / (train_frac + warm_frac);
        let mut r = rng(seed);

        let mut train_pairs = Vec::new();
        let mut warm_pairs = Vec::new();
        let mut cold_pairs = Vec::new();
        let mut warm_items = BTreeSet::new();
        for item in 0..full.n_items() as u32 {
            let users = full.item_users(item);
            if cold_items.contains(&item) {
                cold_pairs.extend(users.iter().map(|&u| (u, item)));
                continue;
            }
            warm_items.insert(item);
            if users.is_empty() {
                continue;
            }
            if users.len() == 1 {
                train_pairs.push((users[0], item));
                continue;
            }
            let mut shuffled = users.to_vec();
            shuffled.shuffle(&mut r);
            let n_train = ((users.len() as f64 * train_share).round() as usize)
                .clamp(1, users.len());
            for (pos, &u) in shuffled.iter().enumerate() {
                if pos < n_train {
                    train_pairs.push((u, item));
                } else {
                    warm_pairs.push((u, item));
                }
            }
        }

        let (n_users, n_items) = (full.n_users(), full.n_items());
        Ok(Self {
            fold_index,
            train: InteractionMatrix::from_pairs(n_users, n_items, train_pairs)?,
            warm_test: InteractionMatrix::from_pairs(n_users, n_items, warm_pairs)?,
            cold_test: InteractionMatrix::from_pairs(n_users, n_items, cold_pairs)?,
            warm_items,
            cold_items,
        })
    }

    /// Checks the structural fold invariants, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        let (n_users, n_items) = (self.train.n_users(), self.train.n_items());
        for (name, m) in [("warm_test", &self.warm_test), ("cold_test", &self.cold_test)] {
            if m.n_users() != n_users || m.n_items() != n_items {
                return Err(Error::invalid(format!(
                    "{name} shape {}x{} differs from train {n_users}x{n_items}",
                    m.n_users(),
                    m.n_items()
                )));
            }
        }
        if let Some(&i) = self.cold_items.intersection(&self.warm_items).next() {
            return Err(Error::invalid(format!(
                "item {i} is in both the warm and cold sets"
            )));
        }
        for &i in &self.cold_items {
            if !self.train.item_users(i).is_empty() {
                return Err(Error::invalid(format!(
                    "cold item {i} has positives in train"
                )));
            }
        }
        for (u, i) in self.warm_test.pairs() {
            if !self.warm_items.contains(&i) {
                return Err(Error::invalid(format!(
                    "warm_test positive ({u}, {i}) refers to a non-warm item"
                )));
            }
        }
        for (u, i) in self.cold_test.pairs() {
            if !self.cold_items.contains(&i) {
                return Err(Error::invalid(format!(
                    "cold_test positive ({u}, {i}) refers to a non-cold item"
                )));
            }
        }
        Ok(())
    }
}

/// Splits a full interaction matrix into `n_folds` warm/cold folds.
///
/// Per fold, items are partitioned at random (seeded) into a cold set holding
/// roughly `ratios.2` of all items, whose positives become the cold test set,
/// and a warm set whose positives are split per item between train and the
/// warm test set in proportion `ratios.0 : ratios.1`. The cold partition is
/// re-drawn independently for every fold.
pub fn split_folds(
    full: &InteractionMatrix,
    n_folds: usize,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<Vec<FoldSplit>> {
    let (train_frac, warm_frac, cold_frac) = ratios;
    let parts = [train_frac, warm_frac, cold_frac];
    if parts.iter().any(|&p| !(p > 0.0) || !p.is_finite())
        || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::BadSplitRatios(parts));
    }
    if n_folds == 0 {
        return Err(Error::invalid("n_folds must be at least 1"));
    }

    let n_cold = (full.n_items() as f64 * cold_frac).round() as usize;
    let mut folds = Vec::with_capacity(n_folds);
    for fold_index in 0..n_folds {
        let fold_seed = subseed_indexed(seed, "split", fold_index as u64);
        let mut r = rng(fold_seed);
        let mut items: Vec<u32> = (0..full.n_items() as u32).collect();
        items.shuffle(&mut r);
        let cold_items: BTreeSet<u32> = items.into_iter().take(n_cold).collect();
        folds.push(FoldSplit::with_cold_set(
            full,
            fold_index,
            cold_items,
            train_frac,
            warm_frac,
            subseed_indexed(seed, "split-items", fold_index as u64),
        )?);
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng as seeded_rng;
    use rand::Rng;
    use std::collections::BTreeSet;

    fn random_matrix(n_users: usize, n_items: usize, density: f64, seed: u64) -> InteractionMatrix {
        let mut r = seeded_rng(seed);
        let mut pairs = Vec::new();
        for u in 0..n_users as u32 {
            for i in 0..n_items as u32 {
                if r.gen::<f64>() < density {
                    pairs.push((u, i));
                }
            }
        }
        InteractionMatrix::from_pairs(n_users, n_items, pairs).unwrap()
    }

    #[test]
    fn cold_set_size_matches_ratio() {
        let m = random_matrix(50, 100, 0.1, 7);
        let folds = split_folds(&m, 5, (0.6, 0.2, 0.2), 11).unwrap();
        assert_eq!(folds.len(), 5);
        for (k, f) in folds.iter().enumerate() {
            assert_eq!(f.fold_index, k);
            assert_eq!(f.cold_items.len(), 20);
            f.validate().unwrap();
        }
    }

    #[test]
    fn folds_are_deterministic() {
        let m = random_matrix(30, 40, 0.15, 3);
        let a = split_folds(&m, 3, (0.6, 0.2, 0.2), 99).unwrap();
        let b = split_folds(&m, 3, (0.6, 0.2, 0.2), 99).unwrap();
        assert_eq!(a, b);
        let c = split_folds(&m, 3, (0.6, 0.2, 0.2), 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn positives_are_conserved() {
        let m = random_matrix(40, 60, 0.12, 5);
        for fold in split_folds(&m, 4, (0.6, 0.2, 0.2), 1).unwrap() {
            let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
            for part in [&fold.train, &fold.warm_test, &fold.cold_test] {
                for p in part.pairs() {
                    assert!(seen.insert(p), "pair {p:?} appears twice across splits");
                }
            }
            let original: BTreeSet<(u32, u32)> = m.pairs().collect();
            assert_eq!(seen, original);
        }
    }

    #[test]
    fn single_positive_items_stay_in_train() {
        let m = InteractionMatrix::from_pairs(3, 2, [(0, 0), (0, 1), (1, 1), (2, 1)]).unwrap();
        let cold = BTreeSet::new();
        let f = FoldSplit::with_cold_set(&m, 0, cold, 0.6, 0.2, 42).unwrap();
        assert_eq!(f.train.item_users(0), &[0]);
        assert!(f.warm_test.item_users(0).is_empty());
    }

    #[test]
    fn bad_ratios_rejected() {
        let m = random_matrix(5, 5, 0.5, 1);
        assert!(split_folds(&m, 2, (0.5, 0.2, 0.2), 0).is_err());
        assert!(split_folds(&m, 2, (0.6, 0.2, -0.2), 0).is_err());
        assert!(split_folds(&m, 0, (0.6, 0.2, 0.2), 0).is_err());
    }
}
