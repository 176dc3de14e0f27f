//! Mehrotra predictor-corrector interior-point method for the weighted ℓ1
//! problem written as the linear program
//!
//! ```text
//! minimize  wᵀ(u⁺ + u⁻)
//! s.t.      A g - u⁺ + u⁻ = 0,   rᵀ g = c,   u⁺, u⁻ ≥ 0,   g free.
//! ```
//!
//! The slack blocks are diagonal, so each Newton step reduces to the
//! `(N+1) × (N+1)` saddle system `[Aᵀ D⁻¹ A, -r; rᵀ, 0]`, solved with a
//! Cholesky factorization of the `N × N` block.

use ndarray::{Array1, Zip};

use super::{L1SynthesisProblem, Solution, SolverConfig};
use crate::error::{Error, Result};
use crate::gsp::{unvec_col_major, FrequencyResponse};
use crate::linalg::{l2_norm, Cholesky};
use crate::scalar::Real;

const STEP_FRACTION: f64 = 0.995;

/// Solves `min ‖w ∘ (A g)‖₁ s.t. rᵀg = c`.
///
/// The returned `g_hat` satisfies the constraint to rounding. When the
/// iteration budget runs out the last iterate is returned with
/// `converged = false`.
pub fn solve_l1_synthesis<T: Real>(problem: &L1SynthesisProblem<T>, config: &SolverConfig<T>) -> Result<Solution<T>> {
    solve_warm(problem, config, None)
}

pub(crate) fn solve_warm<T: Real>(
    problem: &L1SynthesisProblem<T>,
    config: &SolverConfig<T>,
    warm_start: Option<&Array1<T>>,
) -> Result<Solution<T>> {
    config.validate()?;
    let n = problem.n_nodes();
    let p = problem.n_signals();

    // Work on a unit-scale copy: r̂ = r/‖r‖, A/max|A|, w/max w, and g = s·ĝ
    // with s = |c|/‖r‖ so that r̂ᵀĝ = ±1.
    let r_norm = l2_norm(problem.r().view());
    let r_hat = problem.r() / r_norm;
    let c_over = problem.c() / r_norm;
    let g_scale = c_over.abs();
    let c_hat = c_over.signum();
    let a_scale = problem
        .design()
        .iter()
        .fold(T::zero(), |m, v| m.max(v.abs()))
        .max(T::min_positive_value());
    let a = problem.design() / a_scale;
    let w_scale = problem.weights().iter().fold(T::zero(), |m, &v| m.max(v));
    let w = problem.weights() / w_scale;

    let start = match warm_start {
        Some(g) if g.len() == n && g.iter().all(|v| v.is_finite()) => {
            let mut g = g / g_scale;
            project_onto_constraint(&mut g, &r_hat, c_hat);
            g
        }
        _ => &r_hat * c_hat,
    };

    let state = Ipm::new(&a, &r_hat, c_hat, &w, start);
    let (g_unit, iterations, converged) = state.run(config.tolerance, config.inner_budget(n, p))?;

    let mut g = g_unit * g_scale;
    project_onto_constraint(&mut g, problem.r(), problem.c());
    let x = problem.design().dot(&g);
    let x_hat = unvec_col_major(&x, n, p)?;
    let objective = problem.objective(&g);
    Ok(Solution {
        g_hat: FrequencyResponse(g),
        x_hat,
        objective,
        iterations,
        converged,
        objective_trace: Vec::new(),
    })
}

/// Moves `g` along `r` until `rᵀg = c`.
fn project_onto_constraint<T: Real>(g: &mut Array1<T>, r: &Array1<T>, c: T) {
    let rr = r.dot(r);
    let shift = (c - r.dot(g)) / rr;
    g.scaled_add(shift, r);
}

struct Ipm<'a, T> {
    a: &'a ndarray::Array2<T>,
    r: &'a Array1<T>,
    c: T,
    w: &'a Array1<T>,
    g: Array1<T>,
    up: Array1<T>,
    um: Array1<T>,
    y: Array1<T>,
    nu: T,
    sp: Array1<T>,
    sm: Array1<T>,
}

struct Residuals<T> {
    primal: Array1<T>,
    constraint: T,
    dual: Array1<T>,
    slack_plus: Array1<T>,
    slack_minus: Array1<T>,
}

struct Direction<T> {
    g: Array1<T>,
    up: Array1<T>,
    um: Array1<T>,
    y: Array1<T>,
    nu: T,
    sp: Array1<T>,
    sm: Array1<T>,
}

impl<'a, T: Real> Ipm<'a, T> {
    fn new(a: &'a ndarray::Array2<T>, r: &'a Array1<T>, c: T, w: &'a Array1<T>, g: Array1<T>) -> Self {
        let u = a.dot(&g);
        let margin = T::lit(0.1) * (T::one() + u.iter().fold(T::zero(), |m, v| m.max(v.abs())));
        let up = u.mapv(|v| v.max(T::zero()) + margin);
        let um = u.mapv(|v| (-v).max(T::zero()) + margin);
        let m = a.nrows();
        Self {
            a,
            r,
            c,
            w,
            g,
            up,
            um,
            y: Array1::zeros(m),
            nu: T::zero(),
            sp: w.clone(),
            sm: w.clone(),
        }
    }

    fn residuals(&self) -> Residuals<T> {
        let primal = self.a.dot(&self.g) - &self.up + &self.um;
        let constraint = self.r.dot(&self.g) - self.c;
        let dual = self.a.t().dot(&self.y) + &(self.r * self.nu);
        let slack_plus = self.w + &self.y - &self.sp;
        let slack_minus = self.w - &self.y - &self.sm;
        Residuals {
            primal,
            constraint,
            dual,
            slack_plus,
            slack_minus,
        }
    }

    fn mu(&self) -> T {
        let m = T::from_count(2 * self.up.len());
        (self.up.dot(&self.sp) + self.um.dot(&self.sm)) / m
    }

    fn run(mut self, tol: T, max_iter: usize) -> Result<(Array1<T>, usize, bool)> {
        let one = T::one();
        let w_norm = l2_norm(self.w.view());
        for iter in 0..max_iter {
            let res = self.residuals();
            let primal_obj = self.w.dot(&(&self.up + &self.um));
            let dual_obj = self.c * self.nu;
            let au_norm = l2_norm(self.a.dot(&self.g).view());
            let primal_ok = l2_norm(res.primal.view()) <= tol * (one + au_norm)
                && res.constraint.abs() <= tol * (one + self.c.abs());
            let dual_ok = l2_norm(res.dual.view()) <= tol * (one + l2_norm(self.r.view()) * self.nu.abs())
                && l2_norm(res.slack_plus.view()) <= tol * (one + w_norm)
                && l2_norm(res.slack_minus.view()) <= tol * (one + w_norm);
            let gap_ok = (primal_obj - dual_obj).abs() <= tol * (one + primal_obj.abs());
            if primal_ok && dual_ok && gap_ok {
                return Ok((self.g, iter, true));
            }

            let d_inv = Zip::from(&self.up)
                .and(&self.sp)
                .and(&self.um)
                .and(&self.sm)
                .map_collect(|&up, &sp, &um, &sm| (up / sp + um / sm).recip());
            let reduced = self.factor(&d_inv)?;

            // Predictor (affine scaling) direction.
            let comp_p = &self.up * &self.sp;
            let comp_m = &self.um * &self.sm;
            let affine = self.direction(&res, &d_inv, &reduced, &comp_p, &comp_m);
            let (ap, ad) = self.step_lengths(&affine);
            let mu = self.mu();
            let mu_aff = {
                let upa = &self.up + &(&affine.up * ap);
                let uma = &self.um + &(&affine.um * ap);
                let spa = &self.sp + &(&affine.sp * ad);
                let sma = &self.sm + &(&affine.sm * ad);
                (upa.dot(&spa) + uma.dot(&sma)) / T::from_count(2 * self.up.len())
            };
            let sigma = (mu_aff / mu).powi(3).min(one);

            // Corrector with centering.
            let target = sigma * mu;
            let cp = Zip::from(&comp_p)
                .and(&affine.up)
                .and(&affine.sp)
                .map_collect(|&c, &du, &ds| c + du * ds - target);
            let cm = Zip::from(&comp_m)
                .and(&affine.um)
                .and(&affine.sm)
                .map_collect(|&c, &du, &ds| c + du * ds - target);
            let step = self.direction(&res, &d_inv, &reduced, &cp, &cm);
            let (ap, ad) = self.step_lengths(&step);
            let ap = (ap * T::lit(STEP_FRACTION)).min(one);
            let ad = (ad * T::lit(STEP_FRACTION)).min(one);

            self.g.scaled_add(ap, &step.g);
            self.up.scaled_add(ap, &step.up);
            self.um.scaled_add(ap, &step.um);
            self.y.scaled_add(ad, &step.y);
            self.nu += ad * step.nu;
            self.sp.scaled_add(ad, &step.sp);
            self.sm.scaled_add(ad, &step.sm);

            if self.g.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain("interior-point iterate diverged".into()));
            }
        }
        Ok((self.g, max_iter, false))
    }

    /// Cholesky factor of `Aᵀ D⁻¹ A`, regularized when rank deficient.
    fn factor(&self, d_inv: &Array1<T>) -> Result<Cholesky<T>> {
        let weighted = self.a * &d_inv.view().insert_axis(ndarray::Axis(1));
        let mut m = self.a.t().dot(&weighted);
        let n = m.nrows();
        let trace = (0..n).map(|i| m[[i, i]]).sum::<T>() / T::from_count(n);
        let mut reg = trace.max(T::min_positive_value()) * T::epsilon() * T::lit(16.0);
        for _ in 0..12 {
            if let Ok(ch) = Cholesky::factor(&m) {
                return Ok(ch);
            }
            for i in 0..n {
                m[[i, i]] += reg;
            }
            reg *= T::lit(100.0);
        }
        Err(Error::Domain("normal equations could not be factored".into()))
    }

    fn direction(
        &self,
        res: &Residuals<T>,
        d_inv: &Array1<T>,
        reduced: &Cholesky<T>,
        comp_p: &Array1<T>,
        comp_m: &Array1<T>,
    ) -> Direction<T> {
        // q = -r_p - (comp⁺ + u⁺ r_s⁺)/s⁺ + (comp⁻ + u⁻ r_s⁻)/s⁻
        let q = Zip::from(&res.primal)
            .and(comp_p)
            .and(&self.up)
            .and(&res.slack_plus)
            .and(&self.sp)
            .map_collect(|&rp, &cp, &up, &rsp, &sp| -rp - (cp + up * rsp) / sp);
        let q = Zip::from(&q)
            .and(comp_m)
            .and(&self.um)
            .and(&res.slack_minus)
            .and(&self.sm)
            .map_collect(|&q, &cm, &um, &rsm, &sm| q + (cm + um * rsm) / sm);

        let dq = &q * d_inv;
        let b = self.a.t().dot(&dq) + &res.dual;
        let m_inv_b = reduced.solve(b.view());
        let m_inv_r = reduced.solve(self.r.view());
        let dnu = (-res.constraint - self.r.dot(&m_inv_b)) / self.r.dot(&m_inv_r);
        let dg = &m_inv_b + &(&m_inv_r * dnu);
        let dy = (&q - &self.a.dot(&dg)) * d_inv;
        let dsp = &dy + &res.slack_plus;
        let dsm = &res.slack_minus - &dy;
        let dup = Zip::from(comp_p)
            .and(&self.up)
            .and(&dsp)
            .and(&self.sp)
            .map_collect(|&c, &u, &ds, &s| -(c + u * ds) / s);
        let dum = Zip::from(comp_m)
            .and(&self.um)
            .and(&dsm)
            .and(&self.sm)
            .map_collect(|&c, &u, &ds, &s| -(c + u * ds) / s);
        Direction {
            g: dg,
            up: dup,
            um: dum,
            y: dy,
            nu: dnu,
            sp: dsp,
            sm: dsm,
        }
    }

    /// Largest primal and dual steps in `(0, 1]` keeping the cone variables
    /// nonnegative.
    fn step_lengths(&self, d: &Direction<T>) -> (T, T) {
        let ratio = |x: &Array1<T>, dx: &Array1<T>| {
            x.iter().zip(dx.iter()).fold(
                T::one(),
                |alpha, (&v, &dv)| {
                    if dv < T::zero() {
                        alpha.min(-v / dv)
                    } else {
                        alpha
                    }
                },
            )
        };
        let primal = ratio(&self.up, &d.up).min(ratio(&self.um, &d.um));
        let dual = ratio(&self.sp, &d.sp).min(ratio(&self.sm, &d.sm));
        (primal, dual)
    }
}
