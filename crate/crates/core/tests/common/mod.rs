#![allow(dead_code)]

use gsdeconv::gsp::{build_gso, eig_sym, Graph, ShiftKind, ShiftOperator, SpectralDecomposition};
use gsdeconv::synth::{gen_er_graph, RngSeed};
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

/// ER(N=20, p=0.4) with normalized adjacency, the standard test fixture.
pub fn er_fixture(seed: u64) -> (Graph<f64>, ShiftOperator<f64>, SpectralDecomposition<f64>) {
    let graph: Graph<f64> = gen_er_graph(20, 0.4, &RngSeed::with_path(seed, vec![99])).unwrap();
    let shift = build_gso(&graph, ShiftKind::NormalizedAdjacency).unwrap();
    let dec = eig_sym(&shift).unwrap();
    (graph, shift, dec)
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng.sample(StandardNormal))
}

pub fn gaussian_vector(rng: &mut impl Rng, n: usize) -> Array1<f64> {
    Array1::from_shape_simple_fn(n, || rng.sample(StandardNormal))
}

pub fn fro(m: &Array2<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
#[allow(clippy::needless_range_loop)]
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(piv, col);
        b.swap(piv, col);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Brute-force minimum of `Σ w_i |a_iᵀ g|` over `rᵀ g = c`.
///
/// With `A` of full column rank the objective is a coercive piecewise-linear
/// function on the hyperplane, so its minimum is attained where `N-1`
/// independent kinks `a_iᵀ g = 0` meet the hyperplane. Every such vertex is
/// enumerated.
pub fn lp_vertex_oracle(a: &Array2<f64>, r: &Array1<f64>, c: f64, w: &Array1<f64>) -> f64 {
    let (m, n) = a.dim();
    let objective = |g: &[f64]| -> f64 {
        (0..m)
            .map(|i| w[i] * (0..n).map(|k| a[[i, k]] * g[k]).sum::<f64>().abs())
            .sum()
    };
    let mut best = f64::INFINITY;
    let mut subset: Vec<usize> = (0..n - 1).collect();
    loop {
        let mut rows: Vec<Vec<f64>> = subset.iter().map(|&i| a.row(i).to_vec()).collect();
        rows.push(r.to_vec());
        let mut rhs = vec![0.0; n - 1];
        rhs.push(c);
        if let Some(g) = solve_square(rows, rhs) {
            best = best.min(objective(&g));
        }
        // Next combination in lexicographic order.
        let k = n - 1;
        let mut i = k;
        while i > 0 && subset[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        subset[i - 1] += 1;
        for j in i..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}
