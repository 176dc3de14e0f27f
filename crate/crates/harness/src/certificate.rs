//! Recovery certificate and noise stability report for a given graph and
//! inverse filter.

use gsdeconv::gsp::{build_gso, eig_sym, FrequencyResponse, Graph, ShiftKind};
use gsdeconv::guarantees::{
    check_exact_recovery, compute_d0, effective_offsupport_noise, sigma_max_u, stable_bound, SigmaParams,
};
use gsdeconv::synth::{add_noise, gen_bernoulli_gaussian, RngSeed};
use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::error::{HarnessError, Result};

/// Replacements for the default σ parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SigmaOverrides {
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    pub sigma3: Option<f64>,
    pub sigma4: Option<f64>,
    pub sigma5: Option<f64>,
    pub delta_prob: Option<f64>,
}

impl SigmaOverrides {
    pub fn resolve(&self, theta: f64) -> Result<SigmaParams<f64>> {
        let d = SigmaParams::defaults(theta).map_err(HarnessError::core("sigma parameters"))?;
        SigmaParams::new(
            self.sigma1.unwrap_or(d.sigma1),
            self.sigma2.unwrap_or(d.sigma2),
            self.sigma3.unwrap_or(d.sigma3),
            self.sigma4.unwrap_or(d.sigma4),
            self.sigma5.unwrap_or(d.sigma5),
            theta,
            self.delta_prob.unwrap_or(d.delta_prob),
        )
        .map_err(HarnessError::core("sigma parameters"))
    }
}

/// Noise draw used for the stability part of the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub eta: f64,
    pub n_signals: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRequest {
    pub graph: Graph<f64>,
    pub kind: ShiftKind,
    pub g0: FrequencyResponse<f64>,
    /// Defaults to the all-ones vector.
    pub r: Option<Array1<f64>>,
    /// Defaults to `rᵀ g₀`, which makes `g₀` feasible.
    pub c: Option<f64>,
    pub theta: f64,
    pub sigmas: SigmaOverrides,
    pub noise: Option<NoiseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilitySummary {
    pub eta: f64,
    pub n_signals: usize,
    pub q: f64,
    pub d_norm: f64,
    pub denominator: f64,
    pub denominator_positive: bool,
    pub error_bound_l1: Option<f64>,
    pub error_bound_l2: Option<f64>,
    pub noise_fro: f64,
    pub noise_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub n_nodes: usize,
    pub gso: String,
    pub theta: f64,
    pub c: f64,
    pub sigma_max_u: f64,
    pub d0: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub stability: Option<StabilitySummary>,
    /// Why the stability part is missing, if requested and not computable.
    pub stability_error: Option<String>,
}

pub fn check_certificate(req: &CertificateRequest) -> Result<CertificateReport> {
    let n = req.graph.n_nodes();
    if req.g0.len() != n {
        return Err(HarnessError::Data(format!(
            "response has {} entries, graph has {n} nodes",
            req.g0.len()
        )));
    }
    let shift = build_gso(&req.graph, req.kind).map_err(HarnessError::core("shift operator"))?;
    let dec = eig_sym(&shift).map_err(HarnessError::core("eigendecomposition"))?;
    let params = req.sigmas.resolve(req.theta)?;
    let smax = sigma_max_u(dec.eigvecs()).map_err(HarnessError::core("sigma_max"))?;
    let d0 = compute_d0(&params, smax);
    let r = req.r.clone().unwrap_or_else(|| Array1::ones(n));
    let c = req.c.unwrap_or_else(|| r.dot(req.g0.values()));
    let cert = check_exact_recovery(&req.g0, &r, c, d0).map_err(HarnessError::core("certificate"))?;

    let (stability, stability_error) = match req.noise {
        None => (None, None),
        Some(spec) => {
            let seed = RngSeed::new(spec.seed);
            let computed = gen_bernoulli_gaussian::<f64>(n, spec.n_signals, req.theta, &seed.child(0)).and_then(|x0| {
                let noise = add_noise(&Array2::zeros((n, spec.n_signals)), spec.eta, &seed.child(1))?;
                let off = effective_offsupport_noise(dec.eigvecs(), &req.g0, &noise, &x0.support)?;
                let report = stable_bound(&req.g0, &r, c, &off, dec.eigvecs(), &params, d0)?;
                let noise_fro = off.iter().map(|v| v * v).sum::<f64>().sqrt();
                Ok(StabilitySummary {
                    eta: spec.eta,
                    n_signals: spec.n_signals,
                    q: report.q,
                    d_norm: report.d_norm,
                    denominator: report.denominator,
                    denominator_positive: report.denominator_positive,
                    error_bound_l1: report.error_bound_l1,
                    error_bound_l2: report.error_bound_l2,
                    noise_fro,
                    noise_tolerance: report.noise_tolerance,
                })
            });
            match computed {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
    };

    Ok(CertificateReport {
        n_nodes: n,
        gso: req.kind.to_string(),
        theta: req.theta,
        c,
        sigma_max_u: smax,
        d0,
        lhs: cert.lhs,
        rhs: cert.rhs,
        satisfied: cert.satisfied,
        stability,
        stability_error,
    })
}
