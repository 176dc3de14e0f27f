//! Seeded generators for the synthetic experiments: Erdős–Rényi graphs,
//! Bernoulli-Gaussian sources, perturbed inverse filters, perturbed filter
//! taps and additive Gaussian noise.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gsp::{FrequencyResponse, Graph, GraphFilter};
use crate::scalar::Real;

const MAX_CONNECTIVITY_ATTEMPTS: usize = 1000;

/// Identifies an independent random stream: a master seed plus a path such
/// as `[cell, realization, purpose]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub master_seed: u64,
    pub stream_path: Vec<u64>,
}

impl RngSeed {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            stream_path: Vec::new(),
        }
    }

    pub fn with_path(master_seed: u64, stream_path: impl Into<Vec<u64>>) -> Self {
        Self {
            master_seed,
            stream_path: stream_path.into(),
        }
    }

    /// The stream one level below this one.
    pub fn child(&self, index: u64) -> Self {
        let mut stream_path = self.stream_path.clone();
        stream_path.push(index);
        Self {
            master_seed: self.master_seed,
            stream_path,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = splitmix64(self.master_seed ^ 0x6a09_e667_f3bc_c908);
        for (depth, &step) in self.stream_path.iter().enumerate() {
            state = splitmix64(state ^ splitmix64(step.wrapping_add((depth as u64 + 1) << 56)));
        }
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn normal<T: Real>(rng: &mut impl Rng) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Sparse sources drawn from the Bernoulli-Gaussian model.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceMatrix<T> {
    pub values: Array2<T>,
    /// Nonzero positions `(node, signal)`, column-major order.
    pub support: Vec<(usize, usize)>,
    pub theta: T,
}

impl<T: Real> SourceMatrix<T> {
    pub fn support_fraction(&self) -> f64 {
        self.support.len() as f64 / self.values.len() as f64
    }
}

/// Erdős–Rényi `G(n, p)` with unit weights, redrawn until connected.
pub fn gen_er_graph<T: Real>(n: usize, p: f64, seed: &RngSeed) -> Result<Graph<T>> {
    if n < 2 {
        return Err(Error::Domain(format!("ER graph needs n >= 2, got {n}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("edge probability {p} outside (0, 1]")));
    }
    let mut rng = seed.rng();
    for _ in 0..MAX_CONNECTIVITY_ATTEMPTS {
        let mut adjacency = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    adjacency[[i, j]] = T::one();
                    adjacency[[j, i]] = T::one();
                }
            }
        }
        let graph = Graph::from_adjacency(adjacency)?;
        if graph.is_connected() {
            return Ok(graph);
        }
    }
    Err(Error::Generation(format!(
        "no connected G({n}, {p}) sample in {MAX_CONNECTIVITY_ATTEMPTS} attempts"
    )))
}

/// `X_ip = Ω_ip γ_ip / √θ` with `Ω ~ Bernoulli(θ)` and `γ ~ N(0, 1)`.
pub fn gen_bernoulli_gaussian<T: Real>(
    n: usize,
    n_signals: usize,
    theta: f64,
    seed: &RngSeed,
) -> Result<SourceMatrix<T>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("sparsity theta = {theta} outside (0, 1)")));
    }
    let mut rng = seed.rng();
    let scale = theta.sqrt().recip();
    let mut values = Array2::zeros((n, n_signals));
    let mut support = Vec::new();
    for p in 0..n_signals {
        for i in 0..n {
            let active = rng.random::<f64>() < theta;
            let gamma: f64 = rng.sample(StandardNormal);
            if active && gamma != 0.0 {
                values[[i, p]] = T::lit(gamma * scale);
                support.push((i, p));
            }
        }
    }
    Ok(SourceMatrix {
        values,
        support,
        theta: T::lit(theta),
    })
}

/// `g̃ = 1 + α P₁⊥ b` with `b ~ N(0, I)` rescaled so `‖P₁⊥ b‖₂ = N`.
pub fn gen_inverse_filter<T: Real>(n: usize, alpha: f64, seed: &RngSeed) -> Result<FrequencyResponse<T>> {
    if n < 2 {
        return Err(Error::Domain(format!("inverse filter needs n >= 2, got {n}")));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha = {alpha} must be a finite nonnegative number"
        )));
    }
    let mut rng = seed.rng();
    loop {
        let b: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mean = b.iter().sum::<f64>() / n as f64;
        let centered: Vec<f64> = b.iter().map(|x| x - mean).collect();
        let norm = centered.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            continue;
        }
        let step = alpha * n as f64 / norm;
        return Ok(FrequencyResponse(Array1::from_iter(
            centered.iter().map(|&c| T::lit(1.0 + step * c)),
        )));
    }
}

/// `h = e₁ + β [0, bᵀ]ᵀ`, `b ~ N(0, I_{L-1})`.
pub fn gen_filter_coeffs<T: Real>(taps: usize, beta: f64, seed: &RngSeed) -> Result<GraphFilter<T>> {
    if taps < 1 {
        return Err(Error::Domain("filter needs at least one tap".into()));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "beta = {beta} must be a finite nonnegative number"
        )));
    }
    let mut rng = seed.rng();
    let mut coeffs = Array1::zeros(taps);
    coeffs[0] = T::one();
    for c in coeffs.iter_mut().skip(1) {
        *c = T::lit(beta) * normal::<T>(&mut rng);
    }
    GraphFilter::new(coeffs)
}

/// `Y + η N` with `N` i.i.d. standard normal.
pub fn add_noise<T: Real>(y: &Array2<T>, eta: f64, seed: &RngSeed) -> Result<Array2<T>> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("noise level eta = {eta} must be nonnegative")));
    }
    if eta == 0.0 {
        return Ok(y.clone());
    }
    let mut rng = seed.rng();
    let eta = T::lit(eta);
    let (n, p) = y.dim();
    let mut out = y.clone();
    for col in 0..p {
        for row in 0..n {
            out[[row, col]] += eta * normal::<T>(&mut rng);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = RngSeed::with_path(7, vec![1, 2]);
        let b = RngSeed::new(7).child(1).child(2);
        assert_eq!(a, b);
        let x: u64 = a.rng().random();
        let y: u64 = b.rng().random();
        assert_eq!(x, y);
        let z: u64 = RngSeed::with_path(7, vec![2, 1]).rng().random();
        let w: u64 = RngSeed::with_path(8, vec![1, 2]).rng().random();
        assert_ne!(x, z);
        assert_ne!(x, w);
    }

    #[test]
    fn forced_single_edge() {
        for s in 0..10 {
            let g: Graph<f64> = gen_er_graph(2, 1.0, &RngSeed::new(s)).unwrap();
            assert_eq!(g.n_edges(), 1);
        }
    }

    #[test]
    fn sparse_er_fails_to_connect() {
        let err = gen_er_graph::<f64>(5, 1e-4, &RngSeed::new(3)).unwrap_err();
        assert!(matches!(err, Error::Generation(_)));
    }

    #[test]
    fn zero_alpha_gives_ones() {
        let g: FrequencyResponse<f64> = gen_inverse_filter(6, 0.0, &RngSeed::new(1)).unwrap();
        assert_eq!(g.values(), &Array1::<f64>::ones(6));
    }

    #[test]
    fn inverse_filter_perturbation_size() {
        for (s, alpha) in [(1u64, 0.02), (2, 0.5), (3, 3.0)] {
            let g: FrequencyResponse<f64> = gen_inverse_filter(20, alpha, &RngSeed::new(s)).unwrap();
            let centered = crate::linalg::project_out_mean(g.view());
            let norm = crate::linalg::l2_norm(centered.view());
            assert!((norm / 20.0 - alpha).abs() <= 1e-12 * alpha.max(1.0));
            assert!((g.values().sum() - 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_taps_shape() {
        let h: GraphFilter<f64> = gen_filter_coeffs(5, 0.0, &RngSeed::new(4)).unwrap();
        assert_eq!(h.coeffs().to_vec(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let h: GraphFilter<f64> = gen_filter_coeffs(1, 3.0, &RngSeed::new(4)).unwrap();
        assert_eq!(h.coeffs().to_vec(), vec![1.0]);
        let a: GraphFilter<f64> = gen_filter_coeffs(5, 0.5, &RngSeed::new(9)).unwrap();
        let b: GraphFilter<f64> = gen_filter_coeffs(5, 0.5, &RngSeed::new(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coeffs()[0], 1.0);
    }

    #[test]
    fn noise_is_deterministic_and_optional() {
        let y = Array2::<f64>::ones((3, 4));
        assert_eq!(add_noise(&y, 0.0, &RngSeed::new(1)).unwrap(), y);
        let a = add_noise(&y, 0.1, &RngSeed::new(1)).unwrap();
        let b = add_noise(&y, 0.1, &RngSeed::new(1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, y);
    }

    #[test]
    fn support_matches_nonzeros() {
        let x: SourceMatrix<f64> = gen_bernoulli_gaussian(10, 8, 0.3, &RngSeed::new(5)).unwrap();
        let nonzero: Vec<(usize, usize)> = (0..8)
            .flat_map(|p| (0..10).map(move |i| (i, p)))
            .filter(|&(i, p)| x.values[[i, p]] != 0.0)
            .collect();
        assert_eq!(nonzero, x.support);
        assert!(gen_bernoulli_gaussian::<f64>(3, 3, 0.0, &RngSeed::new(1)).is_err());
        assert!(gen_bernoulli_gaussian::<f64>(3, 3, 1.0, &RngSeed::new(1)).is_err());
    }
}
