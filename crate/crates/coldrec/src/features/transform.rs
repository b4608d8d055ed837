use nalgebra::DMatrix;

/// Signed square root: `sign(x) * sqrt(|x|)` element-wise, dampening dominant
/// dimensions so they do not overshadow the rest in similarity computations.
pub fn ssr(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.signum() * v.abs().sqrt()).collect()
}

/// Applies [`ssr`] to every row of a matrix in place.
pub fn ssr_rows(m: &mut DMatrix<f64>) {
    for v in m.iter_mut() {
        *v = v.signum() * v.abs().sqrt();
    }
}

/// Scales a vector to unit Euclidean norm. The zero vector is returned
/// unchanged: an all-zero descriptor carries no content signal and must not
/// turn into NaNs.
pub fn l2_normalize(x: &[f64]) -> Vec<f64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return x.to_vec();
    }
    x.iter().map(|v| v / norm).collect()
}

/// Applies [`l2_normalize`] to every row of a matrix in place.
pub fn l2_normalize_rows(m: &mut DMatrix<f64>) {
    for mut row in m.row_iter_mut() {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ssr_hand_values() {
        assert_eq!(ssr(&[4.0, -9.0, 0.0]), vec![2.0, -3.0, 0.0]);
        assert_eq!(ssr(&[1.0]), vec![1.0]);
        assert_eq!(ssr(&[0.25]), vec![0.5]);
    }

    #[test]
    fn ssr_sign_of_zero() {
        // f64::signum(0.0) is 1.0, but sqrt(0) = 0 keeps the output at zero.
        assert_eq!(ssr(&[0.0, -0.0])[0], 0.0);
        assert_eq!(ssr(&[0.0, -0.0])[1], 0.0);
    }

    #[test]
    fn l2_hand_values() {
        assert_eq!(l2_normalize(&[3.0, 4.0]), vec![0.6, 0.8]);
        assert_eq!(l2_normalize(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn l2_idempotent() {
        let once = l2_normalize(&[1.5, -2.5, 0.25]);
        let twice = l2_normalize(&once);
        for (a, b) in once.iter().zip(&twice) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        let norm = once.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }
}
