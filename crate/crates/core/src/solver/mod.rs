//! Weighted ℓ1-synthesis minimization under one linear equality constraint,
//! the iteratively reweighted refinement, and source/filter reconstruction.
//!
//! The problem solved is
//!
//! ```text
//! minimize  Σ_i w_i |(A g)_i|   subject to  rᵀ g = c
//! ```
//!
//! where `A = YᵀV ⊙ V` is the `NP × N` design matrix and `g` the frequency
//! response of the inverse filter.

mod ipm;
mod reconstruct;
mod reweight;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::gsp::FrequencyResponse;
use crate::scalar::Real;

pub use ipm::solve_l1_synthesis;
pub use reconstruct::{estimate_filter, reconstruct_sources};
pub use reweight::{reweighted_l1, reweighted_l1_with_weights};

/// A weighted ℓ1-synthesis problem `min ‖w ∘ (A g)‖₁ s.t. rᵀg = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1SynthesisProblem<T> {
    design: Array2<T>,
    r: Array1<T>,
    c: T,
    weights: Array1<T>,
}

impl<T: Real> L1SynthesisProblem<T> {
    pub fn new(design: Array2<T>, r: Array1<T>, c: T, weights: Array1<T>) -> Result<Self> {
        let (m, n) = design.dim();
        if n == 0 || m == 0 {
            return Err(Error::Dimension("design matrix is empty".into()));
        }
        if m % n != 0 {
            return Err(Error::Dimension(format!(
                "design has {m} rows, not a multiple of its {n} columns"
            )));
        }
        if r.len() != n {
            return Err(Error::Dimension(format!(
                "constraint vector has {} entries, expected {n}",
                r.len()
            )));
        }
        if weights.len() != m {
            return Err(Error::Dimension(format!("{} weights for {m} rows", weights.len())));
        }
        if r.iter().all(|&v| v == T::zero()) {
            return Err(Error::Domain(
                "constraint vector r is zero; the problem is infeasible".into(),
            ));
        }
        if c == T::zero() || !c.is_finite() {
            return Err(Error::Domain(format!(
                "constraint value c = {c} must be finite and nonzero"
            )));
        }
        if weights.iter().any(|&w| !(w > T::zero()) || !w.is_finite()) {
            return Err(Error::Domain("weights must be finite and positive".into()));
        }
        if design.iter().chain(r.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("problem data has non-finite entries".into()));
        }
        Ok(Self { design, r, c, weights })
    }

    /// Unit weights, `r = 1`, `c = N`.
    pub fn standard(design: Array2<T>) -> Result<Self> {
        let (m, n) = design.dim();
        Self::new(design, Array1::ones(n), T::from_count(n), Array1::ones(m))
    }

    pub fn design(&self) -> &Array2<T> {
        &self.design
    }

    pub fn r(&self) -> &Array1<T> {
        &self.r
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn weights(&self) -> &Array1<T> {
        &self.weights
    }

    pub fn n_nodes(&self) -> usize {
        self.design.ncols()
    }

    pub fn n_signals(&self) -> usize {
        self.design.nrows() / self.design.ncols()
    }

    /// `Σ w_i |(A g)_i|`.
    pub fn objective(&self, g: &Array1<T>) -> T {
        self.design
            .dot(g)
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| w * x.abs())
            .sum()
    }

    pub fn with_weights(&self, weights: Array1<T>) -> Result<Self> {
        Self::new(self.design.clone(), self.r.clone(), self.c, weights)
    }
}

/// Tolerances and iteration budgets for the inner solver and the
/// reweighting loop.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Relative primal/dual residual and duality-gap tolerance.
    pub tolerance: T,
    /// Inner iteration cap; `None` means `50·N·P`.
    pub max_inner_iterations: Option<usize>,
    /// Reweighting damping δ; `None` means `1e-3·max(1, max|vec(X⁽¹⁾)|)`.
    pub delta: Option<T>,
    /// Outer stop: `‖X⁽ᵗ⁾ - X⁽ᵗ⁻¹⁾‖_F ≤ epsilon`.
    pub epsilon: T,
    pub max_outer_iterations: usize,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-9),
            max_inner_iterations: None,
            delta: None,
            epsilon: T::lit(1e-6),
            max_outer_iterations: 4,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero()) || !(self.epsilon > T::zero()) {
            return Err(Error::Domain("solver tolerances must be positive".into()));
        }
        if let Some(delta) = self.delta {
            if !(delta > T::zero()) {
                return Err(Error::Domain("reweighting delta must be positive".into()));
            }
        }
        if self.max_outer_iterations == 0 || self.max_inner_iterations == Some(0) {
            return Err(Error::Domain("iteration budgets must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn inner_budget(&self, n: usize, p: usize) -> usize {
        self.max_inner_iterations.unwrap_or(50 * n * p).max(1)
    }
}

/// Result of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub g_hat: FrequencyResponse<T>,
    /// `unvec(A g_hat)`, an `N × P` matrix.
    pub x_hat: Array2<T>,
    /// Weighted objective of the final inner problem for a single solve; the
    /// unweighted `‖A g_hat‖₁` for the reweighted loop.
    pub objective: T,
    /// Inner iterations for a single solve, outer iterations for the
    /// reweighted loop.
    pub iterations: usize,
    pub converged: bool,
    /// Unweighted `‖A g⁽ᵗ⁾‖₁` after each outer iteration (empty for a single
    /// solve).
    pub objective_trace: Vec<T>,
}
