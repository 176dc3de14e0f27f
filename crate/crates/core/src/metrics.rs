//! Recovery figures of merit: relative error, thresholded support accuracy
//! and rank-based AUC.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::frobenius_norm;
use crate::scalar::Real;

/// Threshold `κ` defining `supp_κ(M) = {(i, j) : |M_ij| > κ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportThreshold<T>(T);

impl<T: Real> SupportThreshold<T> {
    pub fn new(kappa: T) -> Result<Self> {
        if !(kappa >= T::zero()) {
            return Err(Error::Domain(format!("support threshold {kappa} must be nonnegative")));
        }
        Ok(Self(kappa))
    }

    pub fn kappa(&self) -> T {
        self.0
    }
}

impl<T: Real> Default for SupportThreshold<T> {
    fn default() -> Self {
        Self(T::lit(0.1))
    }
}

/// `‖X̂ - X₀‖_F / ‖X₀‖_F`.
pub fn rel_error<T: Real>(x_hat: &Array2<T>, x0: &Array2<T>) -> Result<T> {
    if x_hat.dim() != x0.dim() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", x_hat.dim(), x0.dim())));
    }
    let denom = frobenius_norm(x0);
    if !(denom > T::zero()) {
        return Err(Error::Domain("relative error against a zero matrix".into()));
    }
    Ok(frobenius_norm(&(x_hat - x0)) / denom)
}

/// `|supp_κ(X̂) ∩ supp_κ(X₀)| / |supp_κ(X₀)|`, thresholding raw entries.
pub fn support_accuracy<T: Real>(x_hat: &Array2<T>, x0: &Array2<T>, threshold: SupportThreshold<T>) -> Result<T> {
    if x_hat.dim() != x0.dim() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", x_hat.dim(), x0.dim())));
    }
    let kappa = threshold.kappa();
    let (mut hits, mut truth) = (0usize, 0usize);
    for (&est, &tru) in x_hat.iter().zip(x0.iter()) {
        if tru.abs() > kappa {
            truth += 1;
            if est.abs() > kappa {
                hits += 1;
            }
        }
    }
    if truth == 0 {
        return Err(Error::Domain(format!("true support is empty at kappa = {kappa}")));
    }
    Ok(T::from_count(hits) / T::from_count(truth))
}

/// Probability that a random positive outscores a random negative, via the
/// Mann–Whitney rank-sum with average ranks for ties.
pub fn auc<T: Real>(scores: &[T], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} scores, {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("NaN score".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Domain("AUC needs both positive and negative labels".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("no NaN"));
    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Ranks start..end (1-based start+1 ..= end) share their average.
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        let positives = order[start..end].iter().filter(|&&i| labels[i]).count();
        rank_sum_pos += avg_rank * positives as f64;
        start = end;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn relative_error_cases() {
        let x0: Array2<f64> = array![[1.0, -2.0], [0.0, 3.0]];
        assert_eq!(rel_error(&x0, &x0).unwrap(), 0.0);
        assert_eq!(rel_error(&Array2::zeros((2, 2)), &x0).unwrap(), 1.0);
        assert!((rel_error(&(&x0 * 2.0), &x0).unwrap() - 1.0).abs() < 1e-15);
        assert!(rel_error(&x0, &Array2::zeros((2, 2))).is_err());
    }

    #[test]
    fn support_accuracy_cases() {
        let x0 = array![[0.05, 0.5], [0.0, -2.0]];
        let k = SupportThreshold::default();
        assert_eq!(support_accuracy(&x0, &x0, k).unwrap(), 1.0);
        assert_eq!(support_accuracy(&Array2::zeros((2, 2)), &x0, k).unwrap(), 0.0);
        let partial = array![[0.0, 0.5], [0.0, 0.01]];
        assert_eq!(support_accuracy(&partial, &x0, k).unwrap(), 0.5);
        assert!(support_accuracy(&x0, &array![[0.01, 0.0], [0.0, 0.0]], k).is_err());
        assert!(SupportThreshold::new(-1.0).is_err());
    }

    #[test]
    fn auc_cases() {
        assert_eq!(auc(&[0.9, 0.4, 0.6, 0.1], &[true, false, true, false]).unwrap(), 1.0);
        assert_eq!(auc(&[0.5; 6], &[true, false, true, false, false, true]).unwrap(), 0.5);
        assert_eq!(auc(&[0.1, 0.9], &[true, false]).unwrap(), 0.0);
        // One tie between a positive and a negative counts one half.
        assert_eq!(auc(&[0.3, 0.3, 0.1], &[true, false, false]).unwrap(), 0.75);
        assert!(auc(&[0.1, 0.2], &[true, true]).is_err());
        assert!(auc(&[0.1], &[true, false]).is_err());
    }
}
