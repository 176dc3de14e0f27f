mod common;

use common::{er_fixture, fro, gaussian_matrix, gaussian_vector, lp_vertex_oracle};
use gsdeconv::gsp::{apply_spectral_filter, khatri_rao_design, FrequencyResponse};
use gsdeconv::metrics::rel_error;
use gsdeconv::solver::{
    estimate_filter, reconstruct_sources, reweighted_l1, solve_l1_synthesis, L1SynthesisProblem, SolverConfig,
};
use gsdeconv::synth::{gen_bernoulli_gaussian, gen_inverse_filter, RngSeed, SourceMatrix};
use ndarray::{Array1, Array2};
use rand::Rng;

fn relative_gap(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-12)
}

#[test]
fn matches_vertex_oracle_on_random_small_problems() {
    let mut rng = RngSeed::new(2024).rng();
    let config = SolverConfig::default();
    let mut worst = 0.0f64;
    for trial in 0..150 {
        let n = rng.random_range(2..=6);
        let p = rng.random_range(1..=4);
        let a = gaussian_matrix(&mut rng, n * p, n);
        let r = gaussian_vector(&mut rng, n);
        let c = rng.random_range(0.5..3.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let w = if trial % 2 == 0 {
            Array1::ones(n * p)
        } else {
            Array1::from_shape_simple_fn(n * p, || rng.random_range(0.2..5.0))
        };
        let oracle = lp_vertex_oracle(&a, &r, c, &w);
        let problem = L1SynthesisProblem::new(a, r.clone(), c, w).unwrap();
        let sol = solve_l1_synthesis(&problem, &config).unwrap();
        assert!(sol.converged, "trial {trial} did not converge");
        assert!((r.dot(sol.g_hat.values()) - c).abs() <= 1e-8 * c.abs());
        let gap = relative_gap(sol.objective, oracle);
        worst = worst.max(gap);
        assert!(
            gap <= 1e-6,
            "trial {trial}: solver {} vs oracle {oracle}",
            sol.objective
        );
    }
    println!("worst relative gap {worst:e}");
}

#[test]
fn tall_random_problem_matches_oracle() {
    let mut rng = RngSeed::new(12).rng();
    for _ in 0..5 {
        let a = gaussian_matrix(&mut rng, 12, 3);
        let r = gaussian_vector(&mut rng, 3);
        let w = Array1::ones(12);
        let oracle = lp_vertex_oracle(&a, &r, 1.0, &w);
        let sol = solve_l1_synthesis(
            &L1SynthesisProblem::new(a, r, 1.0, w).unwrap(),
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(relative_gap(sol.objective, oracle) <= 1e-6);
    }
}

fn benign_instance(seed: u64, theta: f64) -> (Array2<f64>, SourceMatrix<f64>, Array2<f64>) {
    let (_, _, dec) = er_fixture(seed);
    let x0: SourceMatrix<f64> = gen_bernoulli_gaussian(20, 20, theta, &RngSeed::with_path(seed, vec![1])).unwrap();
    // Identity filter: the observations are the sources themselves.
    let y = x0.values.clone();
    (dec.eigvecs().clone(), x0, y)
}

#[test]
fn identity_filter_regime_recovers_unit_response() {
    let (v, x0, y) = benign_instance(5, 0.1);
    let design = khatri_rao_design(&y, &v).unwrap();
    let problem = L1SynthesisProblem::standard(design.matrix().clone()).unwrap();
    let sol = solve_l1_synthesis(&problem, &SolverConfig::default()).unwrap();
    let l11: f64 = x0.values.iter().map(|x| x.abs()).sum();
    assert!(relative_gap(sol.objective, l11) < 1e-6);
    for g in sol.g_hat.values() {
        assert!((g - 1.0).abs() < 1e-6);
    }

    // No random feasible point beats the objective at 1_N.
    let mut rng = RngSeed::new(77).rng();
    let ones_obj = problem.objective(&Array1::ones(20));
    for _ in 0..10_000 {
        let mut g = Array1::ones(20) + gaussian_vector(&mut rng, 20) * rng.random_range(0.001..0.5);
        let shift = (20.0 - g.sum()) / 20.0;
        g.mapv_inplace(|v| v + shift);
        assert!(problem.objective(&g) >= ones_obj - 1e-9);
    }
}

#[test]
fn objective_is_homogeneous_in_constraint_value() {
    let mut rng = RngSeed::new(31).rng();
    let config = SolverConfig::default();
    for _ in 0..10 {
        let a = gaussian_matrix(&mut rng, 15, 5);
        let r = gaussian_vector(&mut rng, 5);
        let base = solve_l1_synthesis(
            &L1SynthesisProblem::new(a.clone(), r.clone(), 1.0, Array1::ones(15)).unwrap(),
            &config,
        )
        .unwrap();
        for s in [0.1, 3.0, 250.0] {
            let scaled = solve_l1_synthesis(
                &L1SynthesisProblem::new(a.clone(), r.clone(), s, Array1::ones(15)).unwrap(),
                &config,
            )
            .unwrap();
            assert!(relative_gap(scaled.objective, s * base.objective) < 1e-7);
            for (x, y) in scaled.g_hat.values().iter().zip(base.g_hat.values()) {
                assert!((x - s * y).abs() <= 1e-5 * s.max(1.0));
            }
        }
    }
}

#[test]
fn reconstruction_matches_spectral_filtering() {
    let (_, shift, dec) = er_fixture(3);
    let mut rng = RngSeed::new(4).rng();
    let y = gaussian_matrix(&mut rng, 20, 7);
    let g = FrequencyResponse(gaussian_vector(&mut rng, 20));
    let design = khatri_rao_design(&y, dec.eigvecs()).unwrap();
    let via_design = reconstruct_sources(&design, &g).unwrap();
    let direct = apply_spectral_filter(dec.eigvecs(), &g, &y).unwrap();
    assert!(fro(&(&via_design - &direct)) <= 1e-10 * fro(&direct));
    assert!(fro(&(reconstruct_sources(&design, &FrequencyResponse::ones(20)).unwrap() - &y)) <= 1e-10 * fro(&y));

    // Model consistency: the true inverse response returns the sources.
    let x0: SourceMatrix<f64> = gen_bernoulli_gaussian(20, 7, 0.2, &RngSeed::new(8)).unwrap();
    let g0: FrequencyResponse<f64> = gen_inverse_filter(20, 0.3, &RngSeed::new(9)).unwrap();
    let h0 = FrequencyResponse(g0.values().mapv(|v| 1.0 / v));
    let y = apply_spectral_filter(dec.eigvecs(), &h0, &x0.values).unwrap();
    let x_hat = reconstruct_sources(&khatri_rao_design(&y, dec.eigvecs()).unwrap(), &g0).unwrap();
    assert!(fro(&(&x_hat - &x0.values)) <= 1e-9 * fro(&x0.values));

    // Filter estimate: unit response and reciprocal eigenvalues.
    let eye = estimate_filter(dec.eigvecs(), &FrequencyResponse::ones(20), 1e-8).unwrap();
    assert!(fro(&(&eye - &Array2::<f64>::eye(20))) < 1e-12);
    let inv_lambda = FrequencyResponse(dec.eigvals().mapv(|l| 1.0 / l));
    if inv_lambda.values().iter().all(|v| v.is_finite() && v.abs() < 1e8) {
        let s_hat = estimate_filter(dec.eigvecs(), &inv_lambda, 1e-12).unwrap();
        assert!(fro(&(&s_hat - shift.matrix())) < 1e-8);
    }
    let g = FrequencyResponse(dec.eigvals().mapv(|l| 1.5 + l));
    let h_hat = estimate_filter(dec.eigvecs(), &g, 1e-8).unwrap();
    let x = gaussian_matrix(&mut rng, 20, 3);
    let round = h_hat.dot(&apply_spectral_filter(dec.eigvecs(), &g, &x).unwrap());
    assert!(fro(&(&round - &x)) <= 1e-8 * fro(&x));
    let g_mat = apply_spectral_filter(dec.eigvecs(), &g, &Array2::<f64>::eye(20)).unwrap();
    assert!(fro(&(h_hat.dot(&g_mat) - Array2::<f64>::eye(20))) <= 1e-8);
}

#[test]
fn reweighting_settles_quickly_when_exactly_recoverable() {
    let (v, x0, y) = benign_instance(11, 0.1);
    let design = khatri_rao_design(&y, &v).unwrap();
    let config = SolverConfig::default();
    let sol = reweighted_l1(design.matrix(), &Array1::ones(20), 20.0, &config).unwrap();
    assert!(sol.converged);
    assert!(sol.iterations <= 2, "took {} outer iterations", sol.iterations);
    assert!(rel_error(&sol.x_hat, &x0.values).unwrap() < 1e-6);
}

#[test]
fn huge_delta_matches_unweighted_solve() {
    let (_, _, dec) = er_fixture(2);
    let mut rng = RngSeed::new(6).rng();
    let x0: SourceMatrix<f64> = gen_bernoulli_gaussian(20, 20, 0.2, &RngSeed::new(10)).unwrap();
    let g0: FrequencyResponse<f64> = gen_inverse_filter(20, 0.3, &RngSeed::new(12)).unwrap();
    let h0 = FrequencyResponse(g0.values().mapv(|v| 1.0 / v));
    let y = apply_spectral_filter(dec.eigvecs(), &h0, &x0.values).unwrap() + gaussian_matrix(&mut rng, 20, 20) * 0.05;
    let design = khatri_rao_design(&y, dec.eigvecs()).unwrap();
    let single = solve_l1_synthesis(
        &L1SynthesisProblem::standard(design.matrix().clone()).unwrap(),
        &SolverConfig::default(),
    )
    .unwrap();
    let config = SolverConfig {
        delta: Some(1e9),
        ..SolverConfig::default()
    };
    let re = reweighted_l1(design.matrix(), &Array1::ones(20), 20.0, &config).unwrap();
    assert!(relative_gap(re.objective, single.objective) < 1e-6);
}

#[test]
fn rejects_zero_constraint_vector() {
    let a = Array2::<f64>::eye(3);
    assert!(L1SynthesisProblem::new(a, Array1::zeros(3), 3.0, Array1::ones(3)).is_err());
}
