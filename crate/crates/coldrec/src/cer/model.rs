use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::cer::{confidence, CerHyperParams};
use crate::data::{column_norms, InteractionMatrix};
use crate::features::FeatureMatrix;
use crate::{Error, Result};

/// One entry of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep: usize,
    pub objective: f64,
    /// Validation MAP@5 after the sweep; NaN when no validation set exists.
    pub val_map5: f64,
}

/// A (possibly trained) factor model.
///
/// `item_factors` has one row per catalogue item, but only warm rows are
/// meaningful: cold rows stay at zero and cold predictions go through the
/// content projection instead. Immutable once training returns it.
#[derive(Debug, Clone, PartialEq)]
pub struct CerModel {
    pub(crate) user_factors: DMatrix<f64>,
    pub(crate) item_factors: DMatrix<f64>,
    /// Content projection, `content_dim x latent_dim`.
    pub(crate) projection: DMatrix<f64>,
    pub(crate) warm_items: BTreeSet<u32>,
    pub(crate) hyper: CerHyperParams,
    pub(crate) training_log: Vec<SweepRecord>,
}

impl CerModel {
    pub fn new(
        user_factors: DMatrix<f64>,
        item_factors: DMatrix<f64>,
        projection: DMatrix<f64>,
        warm_items: BTreeSet<u32>,
        hyper: CerHyperParams,
    ) -> Result<Self> {
        hyper.validate()?;
        let k = hyper.latent_dim;
        if user_factors.ncols() != k || item_factors.ncols() != k || projection.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: user_factors
                    .ncols()
                    .min(item_factors.ncols())
                    .min(projection.ncols()),
                context: "factor matrices vs latent_dim",
            });
        }
        if let Some(&bad) = warm_items
            .iter()
            .find(|&&i| i as usize >= item_factors.nrows())
        {
            return Err(Error::IndexOutOfBounds {
                what: "items",
                index: bad as usize,
                size: item_factors.nrows(),
            });
        }
        Ok(Self {
            user_factors,
            item_factors,
            projection,
            warm_items,
            hyper,
            training_log: Vec::new(),
        })
    }

    pub fn n_users(&self) -> usize {
        self.user_factors.nrows()
    }

    pub fn n_items(&self) -> usize {
        self.item_factors.nrows()
    }

    pub fn latent_dim(&self) -> usize {
        self.hyper.latent_dim
    }

    pub fn content_dim(&self) -> usize {
        self.projection.nrows()
    }

    pub fn hyper(&self) -> &CerHyperParams {
        &self.hyper
    }

    pub fn warm_items(&self) -> &BTreeSet<u32> {
        &self.warm_items
    }

    pub fn is_warm(&self, item: u32) -> bool {
        self.warm_items.contains(&item)
    }

    pub fn user_factors(&self) -> &DMatrix<f64> {
        &self.user_factors
    }

    pub fn item_factors(&self) -> &DMatrix<f64> {
        &self.item_factors
    }

    pub fn projection(&self) -> &DMatrix<f64> {
        &self.projection
    }

    pub fn training_log(&self) -> &[SweepRecord] {
        &self.training_log
    }

    pub(crate) fn set_training_log(&mut self, log: Vec<SweepRecord>) {
        self.training_log = log;
    }

    /// Score of a warm item: the plain factor dot product.
    pub fn predict_warm(&self, user: u32, item: u32) -> Result<f64> {
        self.check_user(user)?;
        if !self.is_warm(item) {
            return Err(Error::ColdItemInWarmPredict(item as usize));
        }
        Ok(self
            .user_factors
            .row(user as usize)
            .dot(&self.item_factors.row(item as usize)))
    }

    /// Score of a cold item from its content vector: `u^T (W^T x)`.
    pub fn predict_cold(&self, user: u32, content: &[f64]) -> Result<f64> {
        self.check_user(user)?;
        if content.len() != self.content_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.content_dim(),
                got: content.len(),
                context: "content vector vs projection rows",
            });
        }
        let x = DVector::from_column_slice(content);
        let latent = self.projection.transpose() * x;
        Ok(self.user_factors.row(user as usize).transpose().dot(&latent))
    }

    /// Top-`n` recommendation list over `catalogue` for one user.
    ///
    /// Warm items are scored through their factors, cold items through the
    /// content projection; `exclusions` are dropped before ranking. Ties
    /// break toward the smaller item index.
    pub fn topn(
        &self,
        user: u32,
        catalogue: &[u32],
        n: usize,
        exclusions: &BTreeSet<u32>,
        features: &FeatureMatrix,
    ) -> Result<Vec<u32>> {
        self.check_user(user)?;
        if n == 0 {
            return Err(Error::invalid("top-n requires n >= 1"));
        }
        if features.n_items() != self.n_items() {
            return Err(Error::DimensionMismatch {
                expected: self.n_items(),
                got: features.n_items(),
                context: "feature matrix rows vs model items",
            });
        }
        // u^T (W^T x) == (W u)^T x: project the user once, then dot rows.
        let projected_user = &self.projection * self.user_factors.row(user as usize).transpose();
        let u_row = self.user_factors.row(user as usize);
        let mut scored: Vec<(u32, f64)> = Vec::with_capacity(catalogue.len());
        for &item in catalogue {
            if item as usize >= self.n_items() {
                return Err(Error::IndexOutOfBounds {
                    what: "items",
                    index: item as usize,
                    size: self.n_items(),
                });
            }
            if exclusions.contains(&item) {
                continue;
            }
            let score = if self.is_warm(item) {
                u_row.dot(&self.item_factors.row(item as usize))
            } else {
                features.values().row(item as usize).transpose().dot(&projected_user)
            };
            scored.push((item, score));
        }
        scored.sort_unstable_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("finite scores")
                .then(a.0.cmp(&b.0))
        });
        scored.truncate(n);
        Ok(scored.into_iter().map(|(i, _)| i).collect())
    }

    /// Full training objective at the current factors:
    ///
    /// `sum_{u, i in warm} c_ui (r_ui - u_u^T v_i)^2 + reg_user ||U||^2
    ///  + reg_item sum_{i in warm} ||v_i - W^T x_i||^2 + reg_proj ||W||^2`.
    ///
    /// The rating double sum is computed through the base-confidence
    /// decomposition: the dense part collapses to a Gram-matrix trace and
    /// only positives need explicit correction terms.
    pub fn objective(&self, interactions: &InteractionMatrix, features: &FeatureMatrix) -> Result<f64> {
        self.check_shapes(interactions, features)?;
        let norms = column_norms(interactions);
        let c0 = self.hyper.base_confidence;

        // c0 * tr(U^T U · V_warm^T V_warm)
        let gram_users = self.user_factors.transpose() * &self.user_factors;
        let mut gram_items = DMatrix::zeros(self.latent_dim(), self.latent_dim());
        for &i in &self.warm_items {
            let v = self.item_factors.row(i as usize);
            gram_items.ger(1.0, &v.transpose(), &v.transpose(), 1.0);
        }
        let mut rating_term = c0 * gram_users.dot(&gram_items);

        for (u, i) in interactions.pairs() {
            if !self.is_warm(i) {
                return Err(Error::invalid(format!(
                    "interaction matrix has a positive on non-warm item {i}"
                )));
            }
            let c = confidence(true, norms[i as usize], &self.hyper)?;
            let p = self
                .user_factors
                .row(u as usize)
                .dot(&self.item_factors.row(i as usize));
            rating_term += c * (1.0 - p) * (1.0 - p) - c0 * p * p;
        }

        let user_reg = self.hyper.reg_user * self.user_factors.norm_squared();

        let mut tether = 0.0;
        for &i in &self.warm_items {
            let v = self.item_factors.row(i as usize).transpose();
            let wx = self.projection.transpose()
                * features.values().row(i as usize).transpose();
            tether += (v - wx).norm_squared();
        }
        let item_reg = self.hyper.reg_item * tether;
        let proj_reg = self.hyper.reg_proj * self.projection.norm_squared();

        Ok(rating_term + user_reg + item_reg + proj_reg)
    }

    /// Exact minimizer of the objective in one user's factor, holding items
    /// and projection fixed.
    pub fn solve_user(&self, user: u32, interactions: &InteractionMatrix) -> Result<DVector<f64>> {
        self.check_user(user)?;
        let norms = column_norms(interactions);
        let gram = self.warm_item_gram();
        solve_user_inner(
            user,
            &self.user_factors,
            &self.item_factors,
            interactions,
            &norms,
            &gram,
            &self.hyper,
        )
    }

    /// Exact minimizer of the objective in one warm item's factor.
    pub fn solve_item(
        &self,
        item: u32,
        interactions: &InteractionMatrix,
        features: &FeatureMatrix,
    ) -> Result<DVector<f64>> {
        if !self.is_warm(item) {
            return Err(Error::ColdItemInWarmPredict(item as usize));
        }
        self.check_shapes(interactions, features)?;
        let norms = column_norms(interactions);
        let gram = self.hyper.base_confidence
            * (self.user_factors.transpose() * &self.user_factors);
        let wx = self.projection.transpose() * features.values().row(item as usize).transpose();
        solve_item_inner(
            item,
            &self.user_factors,
            interactions,
            &norms,
            &gram,
            &wx,
            &self.hyper,
        )
    }

    /// Exact minimizer of the objective in the projection matrix.
    pub fn solve_projection(&self, features: &FeatureMatrix) -> Result<DMatrix<f64>> {
        if features.n_items() != self.n_items() {
            return Err(Error::DimensionMismatch {
                expected: self.n_items(),
                got: features.n_items(),
                context: "feature matrix rows vs model items",
            });
        }
        solve_projection_inner(
            &self.item_factors,
            &self.warm_items,
            features,
            &self.hyper,
        )
    }

    /// Base-confidence part of the item Gram over warm items only.
    pub(crate) fn warm_item_gram(&self) -> DMatrix<f64> {
        let k = self.latent_dim();
        let mut gram = DMatrix::zeros(k, k);
        for &i in &self.warm_items {
            let v = self.item_factors.row(i as usize);
            gram.ger(1.0, &v.transpose(), &v.transpose(), 1.0);
        }
        gram * self.hyper.base_confidence
    }

    fn check_user(&self, user: u32) -> Result<()> {
        if user as usize >= self.n_users() {
            return Err(Error::IndexOutOfBounds {
                what: "users",
                index: user as usize,
                size: self.n_users(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_shapes(
        &self,
        interactions: &InteractionMatrix,
        features: &FeatureMatrix,
    ) -> Result<()> {
        if interactions.n_users() != self.n_users() {
            return Err(Error::DimensionMismatch {
                expected: self.n_users(),
                got: interactions.n_users(),
                context: "interaction rows vs model users",
            });
        }
        if interactions.n_items() != self.n_items() || features.n_items() != self.n_items() {
            return Err(Error::DimensionMismatch {
                expected: self.n_items(),
                got: interactions.n_items().min(features.n_items()),
                context: "item counts across matrices",
            });
        }
        if features.dim() != self.content_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.content_dim(),
                got: features.dim(),
                context: "feature dim vs projection rows",
            });
        }
        Ok(())
    }

    /// Persists the model as a directory: `hyper.json`, `U.fmat`, `V.fmat`,
    /// `W.fmat` plus `training_log.csv` (sweep, objective, val_map5).
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        crate::data::io::write_json(&dir.join("hyper.json"), &self.hyper)?;
        write_fmat(&dir.join("U.fmat"), &self.user_factors)?;
        write_fmat(&dir.join("V.fmat"), &self.item_factors)?;
        write_fmat(&dir.join("W.fmat"), &self.projection)?;
        let log_path = dir.join("training_log.csv");
        let mut w = csv::Writer::from_path(&log_path)?;
        w.write_record(["sweep", "objective", "val_map5"])?;
        for rec in &self.training_log {
            w.write_record([
                rec.sweep.to_string(),
                format!("{}", rec.objective),
                format!("{}", rec.val_map5),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&log_path, e))
    }

    /// Loads a persisted model. The warm item set is not stored with the
    /// model; it comes from the fold the model was trained on.
    pub fn load(dir: &Path, warm_items: BTreeSet<u32>) -> Result<Self> {
        for file in ["hyper.json", "U.fmat", "V.fmat", "W.fmat"] {
            let p = dir.join(file);
            if !p.is_file() {
                return Err(Error::MissingArtifact {
                    what: format!("model file {file}"),
                    path: p,
                });
            }
        }
        let hyper: CerHyperParams = crate::data::io::read_json(&dir.join("hyper.json"))?;
        let user_factors = read_fmat(&dir.join("U.fmat"))?;
        let item_factors = read_fmat(&dir.join("V.fmat"))?;
        let projection = read_fmat(&dir.join("W.fmat"))?;
        let mut model = Self::new(user_factors, item_factors, projection, warm_items, hyper)?;
        let log_path = dir.join("training_log.csv");
        if log_path.is_file() {
            let mut reader = csv::Reader::from_path(&log_path)?;
            let mut log = Vec::new();
            for rec in reader.records() {
                let rec = rec?;
                log.push(SweepRecord {
                    sweep: rec[0].parse().unwrap_or(0),
                    objective: rec[1].parse().unwrap_or(f64::NAN),
                    val_map5: rec[2].parse().unwrap_or(f64::NAN),
                });
            }
            model.set_training_log(log);
        }
        Ok(model)
    }
}

fn write_fmat(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let ids: Vec<String> = (0..m.nrows()).map(|r| r.to_string()).collect();
    FeatureMatrix::new(ids, m.clone())?.write_fmat(path)
}

fn read_fmat(path: &Path) -> Result<DMatrix<f64>> {
    Ok(FeatureMatrix::read_fmat(path)?.values().clone())
}

/// Shared closed-form solver for one user row:
/// `(V^T C_u V + reg_user I)^-1 V^T C_u r_u`, with the Gram decomposed as
/// `base_gram + sum over positives of (c_ui - c0) v_i v_i^T`.
pub(crate) fn solve_user_inner(
    user: u32,
    item_factors: &DMatrix<f64>,
    interactions: &InteractionMatrix,
    norms: &[f64],
    base_gram: &DMatrix<f64>,
    hyper: &CerHyperParams,
) -> Result<DVector<f64>> {
    let k = hyper.latent_dim;
    let mut system = base_gram.clone();
    for d in 0..k {
        system[(d, d)] += hyper.reg_user;
    }
    let mut rhs = DVector::zeros(k);
    let c0 = hyper.base_confidence;
    for &i in interactions.user_items(user) {
        let c = confidence(true, norms[i as usize], hyper)?;
        let v = item_factors.row(i as usize).transpose();
        system.ger(c - c0, &v, &v, 1.0);
        rhs.axpy(c, &v, 1.0);
    }
    solve_spd(system, rhs, hyper.reg_user > 0.0, "user update")
}

/// Shared closed-form solver for one warm item row:
/// `(U^T C_i U + reg_item I)^-1 (U^T C_i r_i + reg_item W^T x_i)`.
pub(crate) fn solve_item_inner(
    item: u32,
    user_factors: &DMatrix<f64>,
    interactions: &InteractionMatrix,
    norms: &[f64],
    base_gram: &DMatrix<f64>,
    projected_content: &DVector<f64>,
    hyper: &CerHyperParams,
) -> Result<DVector<f64>> {
    let k = hyper.latent_dim;
    let mut system = base_gram.clone();
    for d in 0..k {
        system[(d, d)] += hyper.reg_item;
    }
    let mut rhs = projected_content * hyper.reg_item;
    let users = interactions.item_users(item);
    if !users.is_empty() {
        let c = confidence(true, norms[item as usize], hyper)?;
        let c0 = hyper.base_confidence;
        for &u in users {
            let uu = user_factors.row(u as usize).transpose();
            system.ger(c - c0, &uu, &uu, 1.0);
            rhs.axpy(c, &uu, 1.0);
        }
    }
    solve_spd(system, rhs, hyper.reg_item > 0.0, "item update")
}

/// Projection solve over warm items:
/// `W = (X^T X + (reg_proj / reg_item) I)^-1 X^T V`.
pub(crate) fn solve_projection_inner(
    item_factors: &DMatrix<f64>,
    warm_items: &std::collections::BTreeSet<u32>,
    features: &FeatureMatrix,
    hyper: &CerHyperParams,
) -> Result<DMatrix<f64>> {
    if hyper.reg_item == 0.0 {
        return Err(Error::invalid(
            "projection update undefined with reg_item = 0: the content term is absent",
        ));
    }
    let d = features.dim();
    let k = hyper.latent_dim;
    let mut xtx = DMatrix::zeros(d, d);
    let mut xtv = DMatrix::zeros(d, k);
    for &i in warm_items {
        let x = features.values().row(i as usize).transpose();
        let v = item_factors.row(i as usize);
        xtx.ger(1.0, &x, &x, 1.0);
        xtv.ger(1.0, &x, &v.transpose(), 1.0);
    }
    let ridge = hyper.reg_proj / hyper.reg_item;
    for j in 0..d {
        xtx[(j, j)] += ridge;
    }
    let chol = nalgebra::Cholesky::new(xtx).ok_or(Error::SingularSystem {
        context: "projection update",
    })?;
    Ok(chol.solve(&xtv))
}

fn solve_spd(
    system: DMatrix<f64>,
    rhs: DVector<f64>,
    has_ridge: bool,
    context: &'static str,
) -> Result<DVector<f64>> {
    match nalgebra::Cholesky::new(system) {
        Some(chol) => Ok(chol.solve(&rhs)),
        None if has_ridge => Err(Error::SingularSystem { context: "ridge system unexpectedly singular" }),
        None => Err(Error::SingularSystem {
            context: match context {
                "user update" => "user update with reg_user = 0",
                _ => "item update with reg_item = 0",
            },
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_model(warm: &[u32]) -> CerModel {
        let hyper = CerHyperParams {
            latent_dim: 2,
            ..CerHyperParams::default()
        };
        CerModel::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 0.5]),
            DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]),
            warm.iter().copied().collect(),
            hyper,
        )
        .unwrap()
    }

    #[test]
    fn warm_prediction_is_dot_product() {
        let m = tiny_model(&[0, 1]);
        assert_eq!(m.predict_warm(0, 0).unwrap(), 1.0);
        assert_eq!(m.predict_warm(0, 1).unwrap(), 0.0);
        assert_eq!(m.predict_warm(1, 1).unwrap(), 0.5);
    }

    #[test]
    fn cold_prediction_routes_through_projection() {
        let m = tiny_model(&[0, 1]);
        assert!(matches!(
            m.predict_warm(0, 2),
            Err(Error::ColdItemInWarmPredict(2))
        ));
        // W = I: score is u . x
        assert_eq!(m.predict_cold(0, &[3.0, 4.0]).unwrap(), 3.0);
        assert_eq!(m.predict_cold(1, &[2.0, 2.0]).unwrap(), 2.0);
        assert_eq!(m.predict_cold(0, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn cold_prediction_is_linear() {
        let m = tiny_model(&[0]);
        let x = [0.7, -1.3];
        let doubled: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let a = m.predict_cold(1, &x).unwrap();
        let b = m.predict_cold(1, &doubled).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn topn_sorts_and_breaks_ties_by_index() {
        let hyper = CerHyperParams {
            latent_dim: 1,
            ..CerHyperParams::default()
        };
        let m = CerModel::new(
            DMatrix::from_row_slice(1, 1, &[1.0]),
            DMatrix::from_row_slice(3, 1, &[0.9, 0.1, 0.5]),
            DMatrix::zeros(1, 1),
            [0u32, 1, 2].into_iter().collect(),
            hyper,
        )
        .unwrap();
        let feats = FeatureMatrix::from_rows(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![0.0], vec![0.0], vec![0.0]],
        )
        .unwrap();
        let list = m.topn(0, &[0, 1, 2], 2, &BTreeSet::new(), &feats).unwrap();
        assert_eq!(list, vec![0, 2]);

        // All-equal scores: ascending index order.
        let m2 = CerModel::new(
            DMatrix::from_row_slice(1, 1, &[0.0]),
            DMatrix::from_row_slice(3, 1, &[0.9, 0.1, 0.5]),
            DMatrix::zeros(1, 1),
            [0u32, 1, 2].into_iter().collect(),
            CerHyperParams {
                latent_dim: 1,
                ..CerHyperParams::default()
            },
        )
        .unwrap();
        assert_eq!(
            m2.topn(0, &[2, 0, 1], 3, &BTreeSet::new(), &feats).unwrap(),
            vec![0, 1, 2]
        );

        // Excluding the whole catalogue gives an empty list.
        let all: BTreeSet<u32> = [0, 1, 2].into_iter().collect();
        assert!(m.topn(0, &[0, 1, 2], 2, &all, &feats).unwrap().is_empty());
    }

    #[test]
    fn objective_at_origin_counts_positives() {
        let hyper = CerHyperParams {
            latent_dim: 2,
            ..CerHyperParams::default()
        };
        let m = CerModel::new(
            DMatrix::zeros(3, 2),
            DMatrix::zeros(4, 2),
            DMatrix::zeros(2, 2),
            (0..4).collect(),
            hyper,
        )
        .unwrap();
        let feats = FeatureMatrix::new(
            (0..4).map(|i| format!("i{i}")).collect(),
            DMatrix::zeros(4, 2),
        )
        .unwrap();
        let empty = InteractionMatrix::empty(3, 4);
        assert_eq!(m.objective(&empty, &feats).unwrap(), 0.0);

        let r = InteractionMatrix::from_pairs(3, 4, [(0, 0), (1, 2), (2, 3)]).unwrap();
        let obj = m.objective(&r, &feats).unwrap();
        assert!((obj - 3.0).abs() < 1e-12, "expected 3 positives -> 3, got {obj}");
    }

    #[test]
    fn doubling_reg_user_doubles_user_term_only() {
        let mut hyper = CerHyperParams {
            latent_dim: 2,
            reg_user: 0.5,
            ..CerHyperParams::default()
        };
        let u = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -1.0, 0.5]);
        let feats = FeatureMatrix::new(
            vec!["a".into(), "b".into()],
            DMatrix::from_row_slice(2, 2, &[0.2, 0.1, -0.3, 0.4]),
        )
        .unwrap();
        let r = InteractionMatrix::from_pairs(2, 2, [(0, 0)]).unwrap();
        let make = |h: &CerHyperParams| {
            CerModel::new(
                u.clone(),
                DMatrix::from_row_slice(2, 2, &[0.3, 0.0, 0.1, -0.2]),
                DMatrix::from_row_slice(2, 2, &[0.05, 0.0, 0.0, 0.05]),
                (0..2).collect(),
                h.clone(),
            )
            .unwrap()
        };
        let base = make(&hyper).objective(&r, &feats).unwrap();
        let user_term = hyper.reg_user * u.norm_squared();
        hyper.reg_user *= 2.0;
        let doubled = make(&hyper).objective(&r, &feats).unwrap();
        assert!((doubled - base - user_term).abs() < 1e-12);
    }
}
