//! Exact- and stable-recovery certificates for the ℓ1-synthesis program.
//!
//! Given the eigenbasis `V`, the ground-truth inverse response `g₀`, the
//! constraint `(r, c)` and the free parameters `σ₁ … σ₅`, these routines
//! evaluate the sufficient condition `‖P₁⊥ diag(r) g₀‖₂ ≤ c·d₀`, the stability
//! constant `Q`, the resulting error bound on `ĝ - g₀` and the tolerable
//! noise level.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::gsp::{apply_spectral_filter, khatri_rao_design, FrequencyResponse};
use crate::linalg::{l11_norm, l2_norm, max_column_norm, mean_projector, project_out_mean, spectral_norm};
use crate::scalar::Real;

/// Largest sparsity level for which the exact-recovery conditions are
/// stated (a convenient lower value of the root returned by [`theta_max`]).
pub const THETA_FEASIBLE: f64 = 0.324;

/// Free parameters of the recovery conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaParams<T> {
    pub sigma1: T,
    pub sigma2: T,
    pub sigma3: T,
    pub sigma4: T,
    pub sigma5: T,
    pub theta: T,
    pub delta_prob: T,
}

impl<T: Real> SigmaParams<T> {
    /// Validates the parameter ranges:
    /// `σ₁ ∈ (0, √π θ^{3/2}/2]`, `σ₂ ∈ (0, √π θ/2]`, `σ₃ > 0`, `σ₄ ∈ (0, 1)`,
    /// `σ₅ ∈ [0, 1]`, `θ ∈ (0, 0.324]`, `δ ∈ (0, 1)`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(sigma1: T, sigma2: T, sigma3: T, sigma4: T, sigma5: T, theta: T, delta_prob: T) -> Result<Self> {
        let zero = T::zero();
        let one = T::one();
        // Relative slack so that parameters computed at the upper limits pass.
        let slack = one + T::lit(1e-12);
        if !(theta > zero && theta <= T::lit(THETA_FEASIBLE)) {
            return Err(Error::Domain(format!("theta = {theta} outside (0, {THETA_FEASIBLE}]")));
        }
        if !(sigma1 > zero && sigma1 <= sigma1_max(theta) * slack) {
            return Err(Error::Domain(format!("sigma1 = {sigma1} outside (0, √π θ^1.5 / 2]")));
        }
        if !(sigma2 > zero && sigma2 <= sigma2_max(theta) * slack) {
            return Err(Error::Domain(format!("sigma2 = {sigma2} outside (0, √π θ / 2]")));
        }
        if !(sigma3 > zero) || !sigma3.is_finite() {
            return Err(Error::Domain(format!("sigma3 = {sigma3} must be positive")));
        }
        if !(sigma4 > zero && sigma4 < one) {
            return Err(Error::Domain(format!("sigma4 = {sigma4} outside (0, 1)")));
        }
        if !(sigma5 >= zero && sigma5 <= one) {
            return Err(Error::Domain(format!("sigma5 = {sigma5} outside [0, 1]")));
        }
        if !(delta_prob > zero && delta_prob < one) {
            return Err(Error::Domain(format!("delta = {delta_prob} outside (0, 1)")));
        }
        Ok(Self {
            sigma1,
            sigma2,
            sigma3,
            sigma4,
            sigma5,
            theta,
            delta_prob,
        })
    }

    /// `σ₁`, `σ₂` at their upper limits, `σ₃ = σ₄ = 0.1`, `σ₅ = 1`, `δ = 0.05`.
    pub fn defaults(theta: T) -> Result<Self> {
        Self::new(
            sigma1_max(theta),
            sigma2_max(theta),
            T::lit(0.1),
            T::lit(0.1),
            T::one(),
            theta,
            T::lit(0.05),
        )
    }

    /// `σ_m = min(σ₁, σ₂, σ₃, σ₄)`.
    pub fn sigma_min(&self) -> T {
        self.sigma1.min(self.sigma2).min(self.sigma3).min(self.sigma4)
    }
}

/// `√π θ^{3/2} / 2`.
pub fn sigma1_max<T: Real>(theta: T) -> T {
    T::PI().sqrt() * theta.powf(T::lit(1.5)) / T::lit(2.0)
}

/// `√π θ / 2`.
pub fn sigma2_max<T: Real>(theta: T) -> T {
    T::PI().sqrt() * theta / T::lit(2.0)
}

/// Outcome of the exact-recovery condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryCertificate<T> {
    /// `‖P₁⊥ (r ∘ g₀)‖₂`.
    pub lhs: T,
    /// `c · d₀`.
    pub rhs: T,
    pub d0: T,
    pub sigma_max_u: Option<T>,
    pub satisfied: bool,
}

/// Noise stability summary. Bounds are `None` when the denominator is not
/// positive (the bound is vacuous).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport<T> {
    pub q: T,
    pub d_norm: T,
    pub denominator: T,
    pub denominator_positive: bool,
    pub error_bound_l1: Option<T>,
    pub error_bound_l2: Option<T>,
    /// Largest tolerable `‖N⁽ᶜ⁾‖_F`; `None` when the noise is zero.
    pub noise_tolerance: Option<T>,
}

/// Which norm of `ĝ - g₀` a bound controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
}

impl<T: Real> StabilityReport<T> {
    pub fn bound(&self, kind: NormKind) -> Option<T> {
        match kind {
            NormKind::L1 => self.error_bound_l1,
            NormKind::L2 => self.error_bound_l2,
        }
    }
}

/// `σ_max((V ∘ V) P₁⊥)`.
pub fn sigma_max_u<T: Real>(eigvecs: &Array2<T>) -> Result<T> {
    let n = eigvecs.nrows();
    if eigvecs.ncols() != n {
        return Err(Error::Dimension(format!("eigvecs {:?}", eigvecs.dim())));
    }
    let squared = eigvecs.mapv(|v| v * v);
    spectral_norm(&squared.dot(&mean_projector(n)))
}

/// `d₀ = √(1 - σ²_max) [(1 - σ₁) - 2θ(1 + σ₂)] (1 - σ₄) / ((1 + σ₃) √θ)`.
///
/// Nonpositive values are returned unchanged; they mean the condition
/// cannot be met.
pub fn compute_d0<T: Real>(params: &SigmaParams<T>, sigma_max_u: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let spectral = (one - sigma_max_u * sigma_max_u).max(T::zero()).sqrt();
    let bracket = (one - params.sigma1) - two * params.theta * (one + params.sigma2);
    spectral * bracket * (one - params.sigma4) / ((one + params.sigma3) * params.theta.sqrt())
}

/// Evaluates `‖P₁⊥ diag(r) g₀‖₂ ≤ c d₀`.
pub fn check_exact_recovery<T: Real>(
    g0: &FrequencyResponse<T>,
    r: &Array1<T>,
    c: T,
    d0: T,
) -> Result<RecoveryCertificate<T>> {
    if g0.len() != r.len() {
        return Err(Error::Dimension(format!(
            "g0 has {} entries, r has {}",
            g0.len(),
            r.len()
        )));
    }
    if c == T::zero() {
        return Err(Error::Domain("constraint value c must be nonzero".into()));
    }
    let lhs = l2_norm(project_out_mean((r * g0.values()).view()).view());
    let rhs = c * d0;
    Ok(RecoveryCertificate {
        lhs,
        rhs,
        d0,
        sigma_max_u: None,
        satisfied: lhs <= rhs,
    })
}

/// `Q = (1 + σ₃) √θ / c · [√(c² d₀² - (1 - σ₅)² ‖d‖²) - σ₅ ‖d‖]`.
pub fn compute_q<T: Real>(params: &SigmaParams<T>, d0: T, d_norm: T, c: T) -> Result<T> {
    let one = T::one();
    let radicand = c * c * d0 * d0 - (one - params.sigma5).powi(2) * d_norm * d_norm;
    if radicand < T::zero() {
        return Err(Error::Domain(format!(
            "negative radicand {} in Q: the recovery condition is violated",
            radicand.as_f64()
        )));
    }
    Ok((one + params.sigma3) * params.theta.sqrt() / c * (radicand.sqrt() - params.sigma5 * d_norm))
}

/// `[V diag(g₀) Vᵀ N]` with the entries on `support` zeroed.
pub fn effective_offsupport_noise<T: Real>(
    eigvecs: &Array2<T>,
    g0: &FrequencyResponse<T>,
    noise: &Array2<T>,
    support: &[(usize, usize)],
) -> Result<Array2<T>> {
    let mut effective = apply_spectral_filter(eigvecs, g0, noise)?;
    for &(i, p) in support {
        if i >= effective.nrows() || p >= effective.ncols() {
            return Err(Error::Dimension(format!("support entry ({i},{p}) out of range")));
        }
        effective[[i, p]] = T::zero();
    }
    Ok(effective)
}

/// Error bound on `ĝ - g₀` in the ℓ1 and ℓ2 norms for off-support noise
/// `noise_offsupport` (an `N × P` matrix).
///
/// The numerator factor `‖diag(g₀)(I - 1 (r∘g₀)ᵀ/c)‖_{l→2}` uses the largest
/// column norm for `l = 1` and the spectral norm for `l = 2`.
pub fn stable_bound<T: Real>(
    g0: &FrequencyResponse<T>,
    r: &Array1<T>,
    c: T,
    noise_offsupport: &Array2<T>,
    eigvecs: &Array2<T>,
    params: &SigmaParams<T>,
    d0: T,
) -> Result<StabilityReport<T>> {
    let n = g0.len();
    if r.len() != n || noise_offsupport.nrows() != n || eigvecs.dim() != (n, n) {
        return Err(Error::Dimension("inconsistent sizes in stable_bound".into()));
    }
    let n_signals = noise_offsupport.ncols();
    let d_norm = l2_norm(project_out_mean((r * g0.values()).view()).view());
    let q = compute_q(params, d0, d_norm, c)?;

    let rg = r * g0.values();
    let operator = Array2::from_shape_fn((n, n), |(i, j)| {
        let identity = if i == j { T::one() } else { T::zero() };
        g0.values()[i] * (identity - rg[j] / c)
    });
    let op_l1 = max_column_norm(&operator);
    let op_l2 = spectral_norm(&operator)?;

    let noise_l11 = l11_norm(noise_offsupport);
    let noise_kr = khatri_rao_design(noise_offsupport, eigvecs)?.max_column_norm();
    let beta0 = (T::lit(2.0) / T::PI()).sqrt();
    let denominator = beta0 * T::from_count(n_signals) * q - d0 * noise_l11 - noise_kr;
    let denominator_positive = denominator > T::zero();
    let two = T::lit(2.0);
    let bound = |op: T| denominator_positive.then(|| two * op * noise_l11 / denominator);

    let noise_tolerance = if noise_l11 > T::zero() {
        Some(noise_tolerance(noise_offsupport, eigvecs, n_signals, q, d0)?)
    } else {
        None
    };
    Ok(StabilityReport {
        q,
        d_norm,
        denominator,
        denominator_positive,
        error_bound_l1: bound(op_l1),
        error_bound_l2: bound(op_l2),
        noise_tolerance,
    })
}

/// `√(2/π) P Q / (d₀ ‖N̄‖₁,₁ + ‖N̄ᵀV ⊙ V‖_{1→2})` with `N̄ = N⁽ᶜ⁾/‖N⁽ᶜ⁾‖_F`.
pub fn noise_tolerance<T: Real>(
    noise_offsupport: &Array2<T>,
    eigvecs: &Array2<T>,
    n_signals: usize,
    q: T,
    d0: T,
) -> Result<T> {
    let fro = crate::linalg::frobenius_norm(noise_offsupport);
    if !(fro > T::zero()) {
        return Err(Error::Domain("noise tolerance is undefined for zero noise".into()));
    }
    let normalized = noise_offsupport / fro;
    let kr = khatri_rao_design(&normalized, eigvecs)?.max_column_norm();
    let beta0 = (T::lit(2.0) / T::PI()).sqrt();
    Ok(beta0 * T::from_count(n_signals) * q / (d0 * l11_norm(&normalized) + kr))
}

/// Piecewise lower-bound parameter `σ′ᵢ` for a hollow row with
/// `αᵢ = ‖mᵢ‖_∞/‖mᵢ‖₂`:
///
/// * `αᵢ²/θ` when `αᵢ ≤ √θ`,
/// * `1 - √θ αᵢ [1 + (1 - αᵢ²) θ² / (2 αᵢ² (1 - θ))]` otherwise.
///
/// The two branches do not meet at `αᵢ = √θ`: the first gives 1, the second
/// `1 - θ - θ²/2`.
pub fn sigma_prime<T: Real>(alpha_i: T, theta: T) -> Result<T> {
    let one = T::one();
    if !(theta > T::zero() && theta <= (-one).exp()) {
        return Err(Error::Domain(format!("theta = {theta} outside (0, 1/e]")));
    }
    if !(alpha_i > T::zero() && alpha_i <= one) {
        return Err(Error::Domain(format!("alpha_i = {alpha_i} outside (0, 1]")));
    }
    let a2 = alpha_i * alpha_i;
    if alpha_i <= theta.sqrt() {
        Ok(a2 / theta)
    } else {
        let correction = (one - a2) * theta * theta / (T::lit(2.0) * a2 * (one - theta));
        Ok(one - theta.sqrt() * alpha_i * (one + correction))
    }
}

/// `f(θ) = √π θ² + 2θ + (√π/2) θ^{3/2} - 1`.
pub fn theta_polynomial<T: Real>(theta: T) -> T {
    let sqrt_pi = T::PI().sqrt();
    sqrt_pi * theta * theta + T::lit(2.0) * theta + sqrt_pi / T::lit(2.0) * theta.powf(T::lit(1.5)) - T::one()
}

/// The unique root of [`theta_polynomial`] on `(0, 1/e]`, by bisection.
pub fn theta_max<T: Real>() -> T {
    let mut lo = T::zero();
    let mut hi = (-T::one()).exp();
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if theta_polynomial(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// `⌈C′ σ_m⁻² ln(4/δ)⌉`. `C′` has no known value; callers supply it
/// (1.0 is the conventional placeholder). `δ` may be any value in `(0, 4)`,
/// where the logarithm is positive.
pub fn min_sample_size(sigma_m: f64, delta_prob: f64, c_prime: f64) -> Result<u64> {
    if !(sigma_m > 0.0) || !(c_prime > 0.0) || !(delta_prob > 0.0 && delta_prob < 4.0) {
        return Err(Error::Domain(format!(
            "need sigma_m > 0, C' > 0 and delta in (0, 4); got {sigma_m}, {c_prime}, {delta_prob}"
        )));
    }
    let raw = c_prime * (4.0 / delta_prob).ln() / (sigma_m * sigma_m);
    // Values within rounding of an integer are not pushed to the next one.
    let nearest = raw.round();
    let value = if (raw - nearest).abs() <= 1e-12 * raw.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    Ok(value as u64)
}
