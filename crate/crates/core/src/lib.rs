//! Blind deconvolution of diffused graph signals.
//!
//! Observations `Y = H X` are sparse sources `X` diffused by an unknown
//! polynomial graph filter `H`. Writing the inverse filter in the graph
//! spectral domain, `X = V diag(g) Vᵀ Y`, turns joint recovery of `(X, g)`
//! into the linear program
//!
//! ```text
//! minimize ‖(YᵀV ⊙ V) g‖₁   subject to   1ᵀ g = N
//! ```
//!
//! which [`solver::solve_l1_synthesis`] solves with an interior-point
//! method and [`solver::reweighted_l1`] refines by iterative reweighting.
//! [`guarantees`] evaluates the exact- and stable-recovery certificates.
//!
//! All numerical code is generic over [`Real`]; the `*64`/`*32` aliases
//! below fix the scalar type.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gsp;
pub mod guarantees;
pub mod linalg;
pub mod metrics;
pub mod scalar;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Graph64 = gsp::Graph<f64>;
pub type ShiftOperator64 = gsp::ShiftOperator<f64>;
pub type SpectralDecomposition64 = gsp::SpectralDecomposition<f64>;
pub type GraphFilter64 = gsp::GraphFilter<f64>;
pub type FrequencyResponse64 = gsp::FrequencyResponse<f64>;
pub type DesignMatrix64 = gsp::DesignMatrix<f64>;
pub type SourceMatrix64 = synth::SourceMatrix<f64>;
pub type L1SynthesisProblem64 = solver::L1SynthesisProblem<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type Solution64 = solver::Solution<f64>;
pub type SigmaParams64 = guarantees::SigmaParams<f64>;

pub type Graph32 = gsp::Graph<f32>;
pub type ShiftOperator32 = gsp::ShiftOperator<f32>;
pub type SpectralDecomposition32 = gsp::SpectralDecomposition<f32>;
pub type GraphFilter32 = gsp::GraphFilter<f32>;
pub type FrequencyResponse32 = gsp::FrequencyResponse<f32>;
pub type DesignMatrix32 = gsp::DesignMatrix<f32>;
pub type SourceMatrix32 = synth::SourceMatrix<f32>;
pub type L1SynthesisProblem32 = solver::L1SynthesisProblem<f32>;
pub type SolverConfig32 = solver::SolverConfig<f32>;
pub type Solution32 = solver::Solution<f32>;
