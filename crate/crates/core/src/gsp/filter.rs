use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::gsp::shift::ShiftOperator;
use crate::scalar::Real;

/// Polynomial graph filter `H = Σ_l h_l S^l`, coefficients `h_0 … h_{L-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFilter<T> {
    coeffs: Array1<T>,
}

impl<T: Real> GraphFilter<T> {
    pub fn new(coeffs: Array1<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("graph filter needs at least one coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn identity() -> Self {
        Self {
            coeffs: Array1::ones(1),
        }
    }

    pub fn coeffs(&self) -> &Array1<T> {
        &self.coeffs
    }

    /// Number of taps `L`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
}

/// Per-frequency gains of a filter (or of its inverse), one entry per
/// eigenvalue of the shift operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse<T>(pub Array1<T>);

impl<T: Real> FrequencyResponse<T> {
    pub fn ones(n: usize) -> Self {
        Self(Array1::ones(n))
    }

    pub fn values(&self) -> &Array1<T> {
        &self.0
    }

    pub fn view(&self) -> ArrayView1<'_, T> {
        self.0.view()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_abs(&self) -> T {
        self.0.iter().fold(T::infinity(), |m, x| m.min(x.abs()))
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Relative tolerance `1e-8 · max_i |value_i|` used when no explicit
    /// invertibility threshold is given.
    pub fn default_tol(&self) -> T {
        T::lit(1e-8) * self.max_abs()
    }
}

impl<T> From<Array1<T>> for FrequencyResponse<T> {
    fn from(values: Array1<T>) -> Self {
        Self(values)
    }
}

/// `Ψ_ij = λ_i^j` for `j = 0 … L-1`.
pub fn vandermonde<T: Real>(eigvals: ArrayView1<'_, T>, taps: usize) -> Result<Array2<T>> {
    if taps < 1 {
        return Err(Error::Domain("Vandermonde matrix needs at least one column".into()));
    }
    let n = eigvals.len();
    let mut psi = Array2::zeros((n, taps));
    for (i, &lambda) in eigvals.iter().enumerate() {
        let mut power = T::one();
        for j in 0..taps {
            psi[[i, j]] = power;
            power *= lambda;
        }
    }
    Ok(psi)
}

/// `Σ_l h_l S^l X` by Horner's rule on repeated shifts.
pub fn apply_filter_coeffs<T: Real>(
    shift: &ShiftOperator<T>,
    filter: &GraphFilter<T>,
    x: &Array2<T>,
) -> Result<Array2<T>> {
    let n = shift.n_nodes();
    if x.nrows() != n {
        return Err(Error::Dimension(format!(
            "signal has {} rows, shift operator is {n}x{n}",
            x.nrows()
        )));
    }
    if filter.order() > n {
        return Err(Error::Dimension(format!(
            "filter with {} taps exceeds graph size {n}",
            filter.order()
        )));
    }
    let h = filter.coeffs();
    let last = filter.order() - 1;
    let mut acc = x * h[last];
    for l in (0..last).rev() {
        acc = shift.matrix().dot(&acc);
        acc.scaled_add(h[l], x);
    }
    Ok(acc)
}

/// `V diag(response) Vᵀ X`.
pub fn apply_spectral_filter<T: Real>(
    eigvecs: &Array2<T>,
    response: &FrequencyResponse<T>,
    x: &Array2<T>,
) -> Result<Array2<T>> {
    let n = eigvecs.nrows();
    if eigvecs.ncols() != n || response.len() != n || x.nrows() != n {
        return Err(Error::Dimension(format!(
            "eigvecs {:?}, response {}, signal {:?}",
            eigvecs.dim(),
            response.len(),
            x.dim()
        )));
    }
    let mut spectral = eigvecs.t().dot(x);
    for (mut row, &g) in spectral.rows_mut().into_iter().zip(response.values().iter()) {
        row *= g;
    }
    Ok(eigvecs.dot(&spectral))
}

/// `h̃ = Ψ_L h`.
pub fn frequency_response<T: Real>(
    filter: &GraphFilter<T>,
    eigvals: ArrayView1<'_, T>,
) -> Result<FrequencyResponse<T>> {
    if filter.order() > eigvals.len() {
        return Err(Error::Dimension(format!(
            "filter with {} taps exceeds graph size {}",
            filter.order(),
            eigvals.len()
        )));
    }
    let psi = vandermonde(eigvals, filter.order())?;
    Ok(FrequencyResponse(psi.dot(filter.coeffs())))
}

pub fn is_invertible<T: Real>(response: &FrequencyResponse<T>, tol: T) -> bool {
    !response.is_empty() && response.min_abs() > tol
}

/// Entrywise reciprocal, rejected when any gain is within the default
/// relative tolerance of zero.
pub fn inverse_response<T: Real>(response: &FrequencyResponse<T>) -> Result<FrequencyResponse<T>> {
    inverse_response_with_tol(response, response.default_tol())
}

pub fn inverse_response_with_tol<T: Real>(response: &FrequencyResponse<T>, tol: T) -> Result<FrequencyResponse<T>> {
    if !is_invertible(response, tol) {
        return Err(Error::NotInvertible {
            min_abs: response.min_abs().as_f64(),
            tol: tol.as_f64(),
        });
    }
    Ok(FrequencyResponse(response.values().mapv(|v| v.recip())))
}
