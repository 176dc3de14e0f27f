use ndarray::Array2;

use crate::error::{Error, Result};
use crate::gsp::{unvec_col_major, DesignMatrix, FrequencyResponse};
use crate::scalar::Real;

/// `X̂ = unvec(A ĝ)` as an `N × P` matrix.
pub fn reconstruct_sources<T: Real>(design: &DesignMatrix<T>, g_hat: &FrequencyResponse<T>) -> Result<Array2<T>> {
    if g_hat.len() != design.n_nodes() {
        return Err(Error::Dimension(format!(
            "response of length {} for a design with {} columns",
            g_hat.len(),
            design.n_nodes()
        )));
    }
    unvec_col_major(&design.apply(g_hat.view()), design.n_nodes(), design.n_signals())
}

/// Diffusion filter estimate `Ĥ = V diag(1/ĝ) Vᵀ`.
pub fn estimate_filter<T: Real>(eigvecs: &Array2<T>, g_hat: &FrequencyResponse<T>, tol: T) -> Result<Array2<T>> {
    let n = eigvecs.nrows();
    if eigvecs.ncols() != n || g_hat.len() != n {
        return Err(Error::Dimension(format!(
            "eigvecs {:?} with response of length {}",
            eigvecs.dim(),
            g_hat.len()
        )));
    }
    let inverse = crate::gsp::inverse_response_with_tol(g_hat, tol)?;
    let scaled = eigvecs * inverse.values();
    Ok(scaled.dot(&eigvecs.t()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsp::khatri_rao_design;
    use ndarray::array;

    #[test]
    fn unit_response_returns_observations() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = array![[h, h], [h, -h]];
        let y = array![[1.0, -2.0], [0.5, 4.0]];
        let a = khatri_rao_design(&y, &v).unwrap();
        let x = reconstruct_sources(&a, &FrequencyResponse::ones(2)).unwrap();
        for (p, q) in x.iter().zip(y.iter()) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn filter_estimate_of_unit_response_is_identity() {
        let v = Array2::<f64>::eye(3);
        let h = estimate_filter(&v, &FrequencyResponse::ones(3), 1e-8).unwrap();
        assert_eq!(h, Array2::eye(3));
        assert!(estimate_filter(&v, &FrequencyResponse(array![1.0, 1e-12, 1.0]), 1e-8).is_err());
    }
}
