use ndarray::Array1;

use super::ipm::solve_warm;
use super::{L1SynthesisProblem, Solution, SolverConfig};
use crate::error::Result;
use crate::linalg::l2_norm;
use crate::scalar::Real;

/// Iteratively reweighted ℓ1 minimization starting from unit weights.
///
/// Each outer iteration solves the weighted problem (warm-started from the
/// previous response), forms `x = A g` and sets `w_i = 1/(|x_i| + δ)`. The
/// loop stops once `‖X⁽ᵗ⁾ - X⁽ᵗ⁻¹⁾‖_F ≤ ε` or after
/// `max_outer_iterations` passes.
pub fn reweighted_l1<T: Real>(
    design: &ndarray::Array2<T>,
    r: &Array1<T>,
    c: T,
    config: &SolverConfig<T>,
) -> Result<Solution<T>> {
    let weights = Array1::ones(design.nrows());
    let problem = L1SynthesisProblem::new(design.clone(), r.clone(), c, weights)?;
    reweighted_l1_with_weights(&problem, config)
}

/// Same as [`reweighted_l1`] but starting from the weights carried by
/// `problem`.
pub fn reweighted_l1_with_weights<T: Real>(
    problem: &L1SynthesisProblem<T>,
    config: &SolverConfig<T>,
) -> Result<Solution<T>> {
    config.validate()?;
    let mut current = problem.clone();
    let mut previous_x = Array1::zeros(problem.design().nrows());
    let mut delta = config.delta;
    let mut warm: Option<Array1<T>> = None;
    let mut trace = Vec::with_capacity(config.max_outer_iterations);
    let mut all_converged = true;
    let mut last = None;

    for outer in 1..=config.max_outer_iterations {
        let sol = solve_warm(&current, config, warm.as_ref())?;
        all_converged &= sol.converged;
        let x = problem.design().dot(sol.g_hat.values());
        trace.push(x.iter().map(|v| v.abs()).sum::<T>());

        let delta = *delta.get_or_insert_with(|| {
            let peak = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            T::lit(1e-3) * peak.max(T::one())
        });
        let change = l2_norm((&x - &previous_x).view());
        let done = change <= config.epsilon || outer == config.max_outer_iterations;
        warm = Some(sol.g_hat.values().clone());
        last = Some((sol, outer));
        if done {
            break;
        }
        current = current.with_weights(x.mapv(|v| (v.abs() + delta).recip()))?;
        previous_x = x;
    }

    let (mut sol, outer) = last.expect("at least one outer iteration");
    sol.objective = *trace.last().expect("trace recorded");
    sol.iterations = outer;
    sol.converged = all_converged;
    sol.objective_trace = trace;
    Ok(sol)
}
