use crate::cer::CerHyperParams;
use crate::{Error, Result};

/// Confidence weight of one user-item cell.
///
/// Positives weigh `norm^(d-1)` where `norm` is the item's rating-column
/// Euclidean norm; `d = 1` collapses to the unscaled weight of exactly 1.
/// Unobserved cells always carry the base confidence — popularity scaling
/// applies only where a rating exists.
pub fn confidence(positive: bool, norm: f64, hyper: &CerHyperParams) -> Result<f64> {
    if !positive {
        return Ok(hyper.base_confidence);
    }
    if norm <= 0.0 {
        return Err(Error::InconsistentNorm);
    }
    if hyper.scaling == 1.0 {
        Ok(1.0)
    } else {
        Ok(norm.powf(hyper.scaling - 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hyper(d: f64) -> CerHyperParams {
        CerHyperParams {
            scaling: d,
            ..CerHyperParams::default()
        }
    }

    #[test]
    fn unscaled_positive_is_exactly_one() {
        for norm in [1.0, 2.0, 7.5, 100.0] {
            assert_eq!(confidence(true, norm, &hyper(1.0)).unwrap(), 1.0);
        }
    }

    #[test]
    fn negative_is_base_confidence() {
        assert_eq!(confidence(false, 4.0, &hyper(1.0)).unwrap(), 0.01);
        assert_eq!(confidence(false, 4.0, &hyper(0.5)).unwrap(), 0.01);
    }

    #[test]
    fn scaled_positive_hand_value() {
        // norm 4, d = 0.5: 4^(-0.5) = 0.5
        assert_abs_diff_eq!(
            confidence(true, 4.0, &hyper(0.5)).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn positive_with_zero_norm_is_inconsistent() {
        assert!(confidence(true, 0.0, &hyper(1.0)).is_err());
    }

    #[test]
    fn popularity_sensitivity_direction() {
        // For counts p1 < p2 the confidence ratio is (p2/p1)^((d-1)/2),
        // strictly increasing in d.
        let (p1, p2) = (4.0_f64, 25.0_f64);
        let ratio = |d: f64| {
            let h = hyper(d);
            confidence(true, p2.sqrt(), &h).unwrap() / confidence(true, p1.sqrt(), &h).unwrap()
        };
        for d in [0.3, 0.7, 1.0, 1.3] {
            assert_abs_diff_eq!(ratio(d), (p2 / p1).powf((d - 1.0) / 2.0), epsilon = 1e-12);
        }
        assert!(ratio(0.5) < ratio(0.8));
        assert!(ratio(0.8) < ratio(1.0));
        assert!(ratio(1.0) < ratio(1.4));
    }
}
