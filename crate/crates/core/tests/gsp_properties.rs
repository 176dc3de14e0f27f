mod common;

use common::{er_fixture, fro, gaussian_matrix, gaussian_vector};
use gsdeconv::gsp::{
    apply_filter_coeffs, apply_spectral_filter, build_gso, eig_sym, eig_sym_matrix, frequency_response,
    khatri_rao_design, unvec_col_major, vandermonde, vec_col_major, FrequencyResponse, Graph, GraphFilter, ShiftKind,
};
use gsdeconv::guarantees::sigma_max_u;
use gsdeconv::synth::{gen_er_graph, gen_filter_coeffs, RngSeed};
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn normalized_adjacency_spectrum_on_er_fixture() {
    for seed in 0..5 {
        let (_, _, dec) = er_fixture(seed);
        let vals = dec.eigvals();
        assert!((vals[0] - 1.0).abs() < 1e-10, "largest eigenvalue {}", vals[0]);
        for &l in vals.iter() {
            assert!(l > -1.0 && l <= 1.0 + 1e-10);
        }
        for w in vals.as_slice().unwrap().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }
}

#[test]
fn random_symmetric_eigendecomposition() {
    let mut rng = RngSeed::new(8).rng();
    for _ in 0..20 {
        let b = gaussian_matrix(&mut rng, 8, 8);
        let s = &b + &b.t();
        let dec = eig_sym_matrix(&s).unwrap();
        assert!(fro(&(dec.reconstruct() - &s)) <= 1e-10 * fro(&s));
        assert!(dec.orthonormality_error() <= 1e-10);
        let v = dec.eigvecs();
        let lhs = s.dot(v);
        let rhs = v * &dec.eigvals().view().insert_axis(ndarray::Axis(0));
        assert!(fro(&(lhs - rhs)) <= 1e-10 * fro(&s));
    }
}

#[test]
fn every_shift_kind_diagonalizes() {
    let graph: Graph<f64> = gen_er_graph(15, 0.3, &RngSeed::new(4)).unwrap();
    for kind in [
        ShiftKind::Adjacency,
        ShiftKind::NormalizedAdjacency,
        ShiftKind::CombinatorialLaplacian,
    ] {
        let shift = build_gso(&graph, kind).unwrap();
        let dec = eig_sym(&shift).unwrap();
        assert!(fro(&(dec.reconstruct() - shift.matrix())) <= 1e-10 * fro(shift.matrix()).max(1.0));
    }
    let lap = build_gso(&graph, ShiftKind::CombinatorialLaplacian).unwrap();
    let dec = eig_sym(&lap).unwrap();
    assert!(dec.eigvals()[14].abs() < 1e-10);
    assert!(dec.eigvals().iter().all(|&l| l > -1e-10));
}

#[test]
fn polynomial_and_spectral_filtering_agree() {
    let mut rng = RngSeed::new(21).rng();
    for seed in 0..5 {
        let (_, shift, dec) = er_fixture(seed);
        for taps in [1, 2, 3, 5] {
            let h: GraphFilter<f64> =
                gen_filter_coeffs(taps, 0.8, &RngSeed::with_path(seed, vec![taps as u64])).unwrap();
            let x = gaussian_matrix(&mut rng, 20, 6);
            let poly = apply_filter_coeffs(&shift, &h, &x).unwrap();
            let resp = frequency_response(&h, dec.eigvals().view()).unwrap();
            let spec = apply_spectral_filter(dec.eigvecs(), &resp, &x).unwrap();
            assert!(fro(&(&poly - &spec)) <= 1e-10 * fro(&x));
        }
    }
}

#[test]
fn vandermonde_entries_are_powers() {
    let mut rng = RngSeed::new(3).rng();
    let lambda = gaussian_vector(&mut rng, 7);
    let psi = vandermonde(lambda.view(), 4).unwrap();
    for i in 0..7 {
        for l in 0..4 {
            assert!((psi[[i, l]] - lambda[i].powi(l as i32)).abs() <= 1e-14 * (1.0 + psi[[i, l]].abs()));
        }
    }
    let h = GraphFilter::new(Array1::from(vec![0.5, -1.0, 2.0])).unwrap();
    let resp = frequency_response(&h, lambda.view()).unwrap();
    for i in 0..7 {
        let oracle = 0.5 - lambda[i] + 2.0 * lambda[i] * lambda[i];
        assert!((resp.values()[i] - oracle).abs() < 1e-12);
    }
}

#[test]
fn khatri_rao_two_node_oracle() {
    let mut rng = RngSeed::new(5).rng();
    let t: f64 = 0.7;
    let v = Array2::from_shape_vec((2, 2), vec![t.cos(), -t.sin(), t.sin(), t.cos()]).unwrap();
    let y = gaussian_matrix(&mut rng, 2, 1);
    let design = khatri_rao_design(&y, &v).unwrap();
    for _ in 0..10 {
        let g = gaussian_vector(&mut rng, 2);
        let mut oracle = [0.0; 2];
        for (i, o) in oracle.iter_mut().enumerate() {
            for k in 0..2 {
                let mut vty = 0.0;
                for j in 0..2 {
                    vty += v[[j, k]] * y[[j, 0]];
                }
                *o += v[[i, k]] * g[k] * vty;
            }
        }
        let got = design.apply(g.view());
        for i in 0..2 {
            assert!((got[i] - oracle[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn design_matrix_matches_filtered_signals() {
    let (_, _, dec) = er_fixture(1);
    let mut rng = RngSeed::new(6).rng();
    let y = gaussian_matrix(&mut rng, 20, 9);
    let design = khatri_rao_design(&y, dec.eigvecs()).unwrap();
    for _ in 0..5 {
        let g = FrequencyResponse(gaussian_vector(&mut rng, 20));
        let lhs = design.apply(g.view());
        let rhs = vec_col_major(&apply_spectral_filter(dec.eigvecs(), &g, &y).unwrap());
        let err = (&lhs - &rhs).mapv(|v| v * v).sum().sqrt();
        assert!(err <= 1e-10 * fro(&y) * g.max_abs());
    }
}

#[test]
fn sigma_max_u_is_at_most_one() {
    for seed in 0..20 {
        let (_, _, dec) = er_fixture(seed);
        let s = sigma_max_u(dec.eigvecs()).unwrap();
        assert!((0.0..=1.0 + 1e-10).contains(&s));
    }
}

#[test]
fn edge_list_roundtrip_preserves_graph() {
    let graph: Graph<f64> = gen_er_graph(12, 0.35, &RngSeed::new(40)).unwrap();
    let text = graph.to_edge_list();
    let back: Graph<f64> = Graph::parse_edge_list(&text, None).unwrap();
    assert_eq!(back.adjacency(), graph.adjacency());
    let weighted: Graph<f64> = Graph::from_edges(4, &[(0, 1, 2.5), (1, 2, 0.25), (2, 3, 1.0)]).unwrap();
    let back: Graph<f64> = Graph::parse_edge_list(&weighted.to_edge_list(), None).unwrap();
    assert_eq!(back.adjacency(), weighted.adjacency());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vec_unvec_roundtrip(rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
        let mut rng = RngSeed::new(seed).rng();
        let m = Array2::from_shape_simple_fn((rows, cols), || rng.random::<f64>());
        let v = vec_col_major(&m);
        prop_assert_eq!(v[rows * (cols - 1)], m[[0, cols - 1]]);
        let back = unvec_col_major(&v, rows, cols).unwrap();
        prop_assert!(fro(&(&back - &m)) <= 1e-10 * fro(&m).max(1.0));
    }

    #[test]
    fn spectral_filter_is_linear_in_response(seed in any::<u64>()) {
        let (_, _, dec) = er_fixture(seed % 7);
        let mut rng = RngSeed::new(seed).rng();
        let x = gaussian_matrix(&mut rng, 20, 3);
        let a = FrequencyResponse(gaussian_vector(&mut rng, 20));
        let b = FrequencyResponse(gaussian_vector(&mut rng, 20));
        let sum = FrequencyResponse(a.values() + b.values());
        let lhs = apply_spectral_filter(dec.eigvecs(), &sum, &x).unwrap();
        let rhs = apply_spectral_filter(dec.eigvecs(), &a, &x).unwrap()
            + apply_spectral_filter(dec.eigvecs(), &b, &x).unwrap();
        prop_assert!(fro(&(lhs - &rhs)) <= 1e-10 * fro(&x) * (a.max_abs() + b.max_abs()));
    }

    #[test]
    fn graph_edges_roundtrip(n in 2usize..10, p in 0.2f64..1.0, seed in any::<u64>()) {
        let graph: Graph<f64> = gen_er_graph(n, p, &RngSeed::new(seed)).unwrap();
        prop_assert!(graph.is_connected());
        let rebuilt: Graph<f64> = Graph::from_edges(n, &graph.edges()).unwrap();
        prop_assert_eq!(rebuilt.adjacency(), graph.adjacency());
    }
}
