use gsdeconv::gsp::{apply_spectral_filter, build_gso, eig_sym, inverse_response, khatri_rao_design, ShiftKind};
use gsdeconv::metrics::rel_error;
use gsdeconv::solver::reweighted_l1;
use gsdeconv::synth::{gen_bernoulli_gaussian, gen_er_graph, gen_inverse_filter, RngSeed};
use gsdeconv::{FrequencyResponse32, Graph32, SolverConfig32};
use ndarray::Array1;

#[test]
fn recovers_sources_in_f32() {
    let config = SolverConfig32 { tolerance: 1e-5, epsilon: 1e-4, ..SolverConfig32::default() };
    for seed in 0..5 {
        let s = RngSeed::new(seed);
        let graph: Graph32 = gen_er_graph(20, 0.4, &s.child(0)).unwrap();
        let dec = eig_sym(&build_gso(&graph, ShiftKind::NormalizedAdjacency).unwrap()).unwrap();
        assert!(dec.orthonormality_error() < 1e-5);
        let g0: FrequencyResponse32 = gen_inverse_filter(20, 0.05, &s.child(1)).unwrap();
        let x0 = gen_bernoulli_gaussian::<f32>(20, 20, 0.1, &s.child(2)).unwrap();
        let y = apply_spectral_filter(dec.eigvecs(), &inverse_response(&g0).unwrap(), &x0.values).unwrap();
        let design = khatri_rao_design(&y, dec.eigvecs()).unwrap();
        let sol = reweighted_l1(design.matrix(), &Array1::ones(20), g0.values().sum(), &config).unwrap();
        let re = rel_error(&sol.x_hat, &x0.values).unwrap();
        assert!(re < 1e-3, "seed {seed}: RE {re}");
    }
}
