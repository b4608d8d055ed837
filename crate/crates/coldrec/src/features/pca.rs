use nalgebra::{DMatrix, DVector};

use crate::features::FeatureMatrix;
use crate::{Error, Result};

/// Fitted principal-component model.
///
/// `components` holds one principal direction per row in descending
/// eigenvalue order; directions are orthonormal and sign-fixed so the
/// largest-magnitude entry of each is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: DVector<f64>,
    components: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl PcaModel {
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// `k x D` matrix of principal directions.
    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    /// Covariance eigenvalues, non-increasing, clamped at zero.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn k(&self) -> usize {
        self.components.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.components.ncols()
    }

    /// Maps scores back to the original space: `scores * components + mean`.
    /// Exact inverse of [`apply_pca`] when `k = input_dim`.
    pub fn inverse_transform(&self, scores: &FeatureMatrix) -> Result<FeatureMatrix> {
        if scores.dim() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: scores.dim(),
                context: "pca inverse input dim",
            });
        }
        let mut back = scores.values() * &self.components;
        for mut row in back.row_iter_mut() {
            row += self.mean.transpose();
        }
        FeatureMatrix::new(scores.item_ids().to_vec(), back)
    }
}

/// Fits a `k`-component PCA on the item-feature matrix.
///
/// Centers by the column mean and eigendecomposes the sample covariance
/// (denominator `n - 1`). A zero-variance input yields all-zero eigenvalues
/// with identity rows as the fixed component basis.
pub fn fit_pca(m: &FeatureMatrix, k: usize) -> Result<PcaModel> {
    let (n, d) = (m.n_items(), m.dim());
    if k > d {
        return Err(Error::PcaTooManyComponents { k, dim: d });
    }
    if k == 0 {
        return Err(Error::invalid("pca requires k >= 1"));
    }
    if n < 2 {
        return Err(Error::invalid(format!(
            "pca requires at least 2 items, got {n}"
        )));
    }

    let mean = m.values().row_mean().transpose();
    let mut centered = m.values().clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }

    if centered.iter().all(|&v| v == 0.0) {
        let mut components = DMatrix::zeros(k, d);
        for j in 0..k {
            components[(j, j)] = 1.0;
        }
        return Ok(PcaModel {
            mean,
            components,
            eigenvalues: DVector::zeros(k),
        });
    }

    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    let eig = cov.symmetric_eigen();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });

    let mut components = DMatrix::zeros(k, d);
    let mut eigenvalues = DVector::zeros(k);
    for (row, &src) in order.iter().take(k).enumerate() {
        eigenvalues[row] = eig.eigenvalues[src].max(0.0);
        let col = eig.eigenvectors.column(src);
        // Sign convention: flip so the largest-magnitude entry is positive.
        let lead = col
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite"))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let flip = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..d {
            components[(row, c)] = flip * col[c];
        }
    }

    Ok(PcaModel {
        mean,
        components,
        eigenvalues,
    })
}

/// Projects rows onto the fitted components: `(x - mean) * components^T`.
pub fn apply_pca(model: &PcaModel, m: &FeatureMatrix) -> Result<FeatureMatrix> {
    if m.dim() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            got: m.dim(),
            context: "pca projection input dim",
        });
    }
    let mut centered = m.values().clone();
    for mut row in centered.row_iter_mut() {
        row -= model.mean().transpose();
    }
    FeatureMatrix::new(m.item_ids().to_vec(), centered * model.components().transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fm(rows: &[Vec<f64>]) -> FeatureMatrix {
        let ids = (0..rows.len()).map(|i| format!("i{i}")).collect();
        FeatureMatrix::from_rows(ids, rows).unwrap()
    }

    #[test]
    fn line_data_has_rank_one_covariance() {
        let m = fm(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]);
        let model = fit_pca(&m, 2).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert_abs_diff_eq!(model.components()[(0, 0)], s, epsilon = 1e-12);
        assert_abs_diff_eq!(model.components()[(0, 1)], s, epsilon = 1e-12);
        assert_abs_diff_eq!(model.eigenvalues()[1], 0.0, epsilon = 1e-12);

        // Second coordinate of every projected point vanishes.
        let scores = apply_pca(&model, &m).unwrap();
        for r in 0..m.n_items() {
            assert_abs_diff_eq!(scores.values()[(r, 1)], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_matrix_projects_to_zero() {
        let m = fm(&vec![vec![2.0, -1.0, 3.0]; 4]);
        let model = fit_pca(&m, 3).unwrap();
        assert!(model.eigenvalues().iter().all(|&e| e == 0.0));
        let scores = apply_pca(&model, &m).unwrap();
        assert!(scores.values().iter().all(|&v| v == 0.0));
        // Fixed identity basis.
        for j in 0..3 {
            assert_eq!(model.components()[(j, j)], 1.0);
        }
    }

    #[test]
    fn full_rank_round_trip() {
        let m = fm(&[
            vec![1.0, 0.5, -2.0],
            vec![0.0, 2.5, 1.0],
            vec![-1.0, 1.0, 0.0],
            vec![3.0, -0.5, 2.0],
            vec![2.0, 1.5, -1.0],
        ]);
        let model = fit_pca(&m, 3).unwrap();
        let scores = apply_pca(&model, &m).unwrap();
        let back = model.inverse_transform(&scores).unwrap();
        for (a, b) in m.values().iter().zip(back.values().iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn components_are_orthonormal() {
        let m = fm(&[
            vec![1.0, 2.0, 0.0, -1.0],
            vec![3.0, -1.0, 2.0, 0.5],
            vec![0.0, 0.5, -2.0, 1.0],
            vec![-2.0, 1.0, 1.0, 2.0],
            vec![1.5, 0.0, 0.5, -0.5],
            vec![0.5, -2.0, 1.5, 1.0],
        ]);
        let model = fit_pca(&m, 4).unwrap();
        let gram = model.components() * model.components().transpose();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[(r, c)], expected, epsilon = 1e-8);
            }
        }
        // Eigenvalues non-increasing.
        for w in model.eigenvalues().as_slice().windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn mean_row_maps_to_zero() {
        let m = fm(&[vec![1.0, 3.0], vec![3.0, 5.0], vec![2.0, 1.0]]);
        let model = fit_pca(&m, 2).unwrap();
        let mean_row = FeatureMatrix::from_rows(
            vec!["mean".into()],
            &[model.mean().iter().copied().collect::<Vec<_>>()],
        )
        .unwrap();
        let score = apply_pca(&model, &mean_row).unwrap();
        for v in score.values().iter() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn k_bounds_enforced() {
        let m = fm(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(fit_pca(&m, 3).is_err());
        assert!(fit_pca(&m, 0).is_err());
        let one = fm(&[vec![1.0, 2.0]]);
        assert!(fit_pca(&one, 1).is_err());
    }

    #[test]
    fn projection_preserves_distances_at_full_rank() {
        let m = fm(&[
            vec![1.0, 0.0, 2.0],
            vec![0.0, 1.0, -1.0],
            vec![2.0, 2.0, 0.0],
            vec![-1.0, 0.5, 1.0],
        ]);
        let model = fit_pca(&m, 3).unwrap();
        let s = apply_pca(&model, &m).unwrap();
        for a in 0..4 {
            for b in (a + 1)..4 {
                let orig: f64 = (0..3)
                    .map(|c| (m.values()[(a, c)] - m.values()[(b, c)]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let proj: f64 = (0..3)
                    .map(|c| (s.values()[(a, c)] - s.values()[(b, c)]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert_abs_diff_eq!(orig, proj, epsilon = 1e-8);
            }
        }
    }
}
