//! Monte-Carlo phase-transition sweeps over a two-parameter grid.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gsdeconv::gsp::{
    apply_spectral_filter, build_gso, eig_sym, frequency_response, inverse_response, khatri_rao_design,
    FrequencyResponse, Graph, ShiftKind, SpectralDecomposition,
};
use gsdeconv::metrics::{rel_error, support_accuracy, SupportThreshold};
use gsdeconv::solver::{reweighted_l1, SolverConfig};
use gsdeconv::synth::{
    add_noise, gen_bernoulli_gaussian, gen_er_graph, gen_filter_coeffs, gen_inverse_filter, RngSeed,
};
use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Which two parameters span the grid, as `(axis1, axis2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// `(α, P)`
    AlphaVsP,
    /// `(α, θ)`
    AlphaVsTheta,
    /// `(θ, P)`
    ThetaVsP,
    /// `(η, α)`
    EtaVsAlpha,
    /// `(θ, L)` with polynomial filters `h = e₁ + β[0, bᵀ]ᵀ`.
    ThetaVsL,
}

impl Experiment {
    pub fn axis_names(self) -> (&'static str, &'static str) {
        match self {
            Experiment::AlphaVsP => ("alpha", "p"),
            Experiment::AlphaVsTheta => ("alpha", "theta"),
            Experiment::ThetaVsP => ("theta", "p"),
            Experiment::EtaVsAlpha => ("eta", "alpha"),
            Experiment::ThetaVsL => ("theta", "taps"),
        }
    }
}

/// Solver knobs as they appear in a sweep config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub tolerance: f64,
    pub max_inner_iterations: Option<usize>,
    pub delta: Option<f64>,
    pub epsilon: f64,
    pub max_outer_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverConfig::<f64>::default().into()
    }
}

impl From<SolverConfig<f64>> for SolverSettings {
    fn from(c: SolverConfig<f64>) -> Self {
        Self {
            tolerance: c.tolerance,
            max_inner_iterations: c.max_inner_iterations,
            delta: c.delta,
            epsilon: c.epsilon,
            max_outer_iterations: c.max_outer_iterations,
        }
    }
}

impl From<SolverSettings> for SolverConfig<f64> {
    fn from(s: SolverSettings) -> Self {
        SolverConfig {
            tolerance: s.tolerance,
            max_inner_iterations: s.max_inner_iterations,
            delta: s.delta,
            epsilon: s.epsilon,
            max_outer_iterations: s.max_outer_iterations,
        }
    }
}

/// A full sweep description. Parameters that an experiment puts on an axis
/// are ignored in the fixed block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    #[serde(default = "defaults::n_nodes")]
    pub n_nodes: usize,
    #[serde(default = "defaults::n_signals")]
    pub n_signals: usize,
    #[serde(default = "defaults::theta")]
    pub theta: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "defaults::beta")]
    pub beta: f64,
    #[serde(default = "defaults::taps")]
    pub taps: usize,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "defaults::p_edge")]
    pub p_edge: f64,
    #[serde(default = "defaults::realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "defaults::kappa")]
    pub kappa: f64,
    #[serde(default = "defaults::gso")]
    pub gso: String,
    /// Draw one graph for the whole sweep instead of one per realization.
    #[serde(default)]
    pub fixed_graph: bool,
    /// Edge-list file used as the fixed graph; implies `fixed_graph`.
    #[serde(default)]
    pub graph_file: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverSettings,
}

mod defaults {
    pub fn n_nodes() -> usize {
        20
    }
    pub fn n_signals() -> usize {
        20
    }
    pub fn theta() -> f64 {
        0.1
    }
    pub fn beta() -> f64 {
        0.1
    }
    pub fn taps() -> usize {
        3
    }
    pub fn p_edge() -> f64 {
        0.4
    }
    pub fn realizations() -> usize {
        20
    }
    pub fn kappa() -> f64 {
        0.1
    }
    pub fn gso() -> String {
        "norm-adj".into()
    }
}

/// Concrete parameters of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellParams {
    pub n_signals: usize,
    pub theta: f64,
    pub alpha: f64,
    pub taps: usize,
    pub eta: f64,
}

fn as_count(value: f64, name: &str) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value < 1e9 {
        Ok(value as usize)
    } else {
        Err(HarnessError::Data(format!(
            "{name} must be a positive integer, got {value}"
        )))
    }
}

impl SweepConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let config: SweepConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config {
            path: path.into(),
            message: e.to_string(),
        })?;
        config.validate().map_err(|e| HarnessError::Config {
            path: path.into(),
            message: e.to_string(),
        })?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn shift_kind(&self) -> Result<ShiftKind> {
        self.gso
            .parse()
            .map_err(|e: gsdeconv::Error| HarnessError::Data(e.to_string()))
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        self.solver.into()
    }

    pub fn uses_fixed_graph(&self) -> bool {
        self.fixed_graph || self.graph_file.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis1.is_empty() || self.axis2.is_empty() {
            return Err(HarnessError::Data("both axes need at least one value".into()));
        }
        if self.realizations == 0 {
            return Err(HarnessError::Data("realizations must be positive".into()));
        }
        if self.n_nodes < 2 {
            return Err(HarnessError::Data("n_nodes must be at least 2".into()));
        }
        if !(self.p_edge > 0.0 && self.p_edge <= 1.0) {
            return Err(HarnessError::Data(format!("p_edge = {} outside (0, 1]", self.p_edge)));
        }
        if !(self.kappa >= 0.0) {
            return Err(HarnessError::Data("kappa must be nonnegative".into()));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(HarnessError::Data("beta must be finite and nonnegative".into()));
        }
        self.shift_kind()?;
        self.solver_config()
            .validate()
            .map_err(|e| HarnessError::Data(e.to_string()))?;
        for &a in &self.axis1 {
            for &b in &self.axis2 {
                self.cell_params(a, b)?;
            }
        }
        Ok(())
    }

    /// Parameters of the cell at axis values `(a, b)`, validated.
    pub fn cell_params(&self, a: f64, b: f64) -> Result<CellParams> {
        let mut cell = CellParams {
            n_signals: self.n_signals,
            theta: self.theta,
            alpha: self.alpha,
            taps: self.taps,
            eta: self.eta,
        };
        match self.experiment {
            Experiment::AlphaVsP => {
                cell.alpha = a;
                cell.n_signals = as_count(b, "P")?;
            }
            Experiment::AlphaVsTheta => {
                cell.alpha = a;
                cell.theta = b;
            }
            Experiment::ThetaVsP => {
                cell.theta = a;
                cell.n_signals = as_count(b, "P")?;
            }
            Experiment::EtaVsAlpha => {
                cell.eta = a;
                cell.alpha = b;
            }
            Experiment::ThetaVsL => {
                cell.theta = a;
                cell.taps = as_count(b, "L")?;
            }
        }
        if cell.n_signals == 0 {
            return Err(HarnessError::Data("P must be positive".into()));
        }
        if !(cell.theta > 0.0 && cell.theta < 1.0) {
            return Err(HarnessError::Data(format!("theta = {} outside (0, 1)", cell.theta)));
        }
        if !(cell.alpha >= 0.0 && cell.alpha.is_finite()) {
            return Err(HarnessError::Data(format!(
                "alpha = {} must be finite and nonnegative",
                cell.alpha
            )));
        }
        if !(cell.eta >= 0.0 && cell.eta.is_finite()) {
            return Err(HarnessError::Data(format!(
                "eta = {} must be finite and nonnegative",
                cell.eta
            )));
        }
        if self.experiment == Experiment::ThetaVsL && (cell.taps == 0 || cell.taps > self.n_nodes) {
            return Err(HarnessError::Data(format!(
                "L = {} outside [1, {}]",
                cell.taps, self.n_nodes
            )));
        }
        Ok(cell)
    }
}

/// Metrics of one realization, or why it failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOutcome {
    pub cell: usize,
    pub realization: usize,
    pub result: std::result::Result<(f64, f64), String>,
}

/// Aggregated metrics of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub axis1: f64,
    pub axis2: f64,
    pub re_mean: f64,
    pub re_stderr: f64,
    pub acc_mean: f64,
    pub acc_stderr: f64,
    pub n_realizations: usize,
    pub n_failures: usize,
}

impl CellResult {
    pub fn n_ok(&self) -> usize {
        self.n_realizations - self.n_failures
    }
}

/// Everything a sweep produces.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub cells: Vec<CellResult>,
    pub realizations: Vec<RealizationOutcome>,
}

/// Sample mean and standard error of the mean; NaN for no samples and a
/// zero standard error for a single one.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn graph_seed(master_seed: u64) -> RngSeed {
    RngSeed::with_path(master_seed, vec![u64::MAX])
}

/// Stream of realization `realization` in grid cell `cell` (row-major over
/// `axis1 × axis2`). Children 0..4 draw the graph, filter, sources and noise.
pub fn realization_seed(master_seed: u64, cell: usize, realization: usize) -> RngSeed {
    RngSeed::with_path(master_seed, vec![cell as u64, realization as u64])
}

fn spectral_basis(graph: &Graph<f64>, kind: ShiftKind) -> gsdeconv::Result<SpectralDecomposition<f64>> {
    eig_sym(&build_gso(graph, kind)?)
}

/// Runs one realization: draw graph (unless `fixed` is given), filter,
/// sources and noise, solve, and score.
pub fn run_realization(
    config: &SweepConfig,
    cell: &CellParams,
    seed: &RngSeed,
    fixed: Option<&SpectralDecomposition<f64>>,
) -> std::result::Result<(f64, f64), String> {
    let kind = config.shift_kind().map_err(|e| e.to_string())?;
    let n = fixed.map_or(config.n_nodes, SpectralDecomposition::n);
    let owned;
    let dec = match fixed {
        Some(dec) => dec,
        None => {
            let graph = gen_er_graph(n, config.p_edge, &seed.child(0)).map_err(|e| e.to_string())?;
            owned = spectral_basis(&graph, kind).map_err(|e| e.to_string())?;
            &owned
        }
    };

    let (g0, h0) = if config.experiment == Experiment::ThetaVsL {
        let h = gen_filter_coeffs::<f64>(cell.taps, config.beta, &seed.child(1)).map_err(|e| e.to_string())?;
        let h_resp = frequency_response(&h, dec.eigvals().view()).map_err(|e| e.to_string())?;
        let g0 = inverse_response(&h_resp).map_err(|e| format!("filter not invertible: {e}"))?;
        (g0, h_resp)
    } else {
        let g0: FrequencyResponse<f64> =
            gen_inverse_filter(n, cell.alpha, &seed.child(1)).map_err(|e| e.to_string())?;
        let h0 = inverse_response(&g0).map_err(|e| format!("inverse filter not invertible: {e}"))?;
        (g0, h0)
    };

    let x0 = gen_bernoulli_gaussian::<f64>(n, cell.n_signals, cell.theta, &seed.child(2)).map_err(|e| e.to_string())?;
    let clean = apply_spectral_filter(dec.eigvecs(), &h0, &x0.values).map_err(|e| e.to_string())?;
    let y = add_noise(&clean, cell.eta, &seed.child(3)).map_err(|e| e.to_string())?;

    let design = khatri_rao_design(&y, dec.eigvecs()).map_err(|e| e.to_string())?;
    let r = Array1::ones(n);
    let c = g0.values().sum();
    let sol = reweighted_l1(design.matrix(), &r, c, &config.solver_config()).map_err(|e| e.to_string())?;
    if !sol.converged {
        return Err("interior-point iterations did not converge".into());
    }
    let re = rel_error(&sol.x_hat, &x0.values).map_err(|e| e.to_string())?;
    let threshold = SupportThreshold::new(config.kappa).map_err(|e| e.to_string())?;
    let acc = support_accuracy(&sol.x_hat, &x0.values, threshold).map_err(|e| e.to_string())?;
    Ok((re, acc))
}

/// Runs every (cell, realization) pair in parallel on the current rayon
/// pool. Results depend only on the config, never on scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let kind = config.shift_kind()?;
    let fixed = if config.uses_fixed_graph() {
        let graph = match &config.graph_file {
            Some(path) => Graph::read_edge_list(path, None).map_err(HarnessError::core("graph file"))?,
            None => gen_er_graph(config.n_nodes, config.p_edge, &graph_seed(config.master_seed))
                .map_err(HarnessError::core("fixed graph"))?,
        };
        Some(spectral_basis(&graph, kind).map_err(HarnessError::core("fixed graph"))?)
    } else {
        None
    };

    let mut cells = Vec::new();
    for &a in &config.axis1 {
        for &b in &config.axis2 {
            cells.push((a, b, config.cell_params(a, b)?));
        }
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.realizations).map(move |r| (c, r)))
        .collect();
    let realizations: Vec<RealizationOutcome> = jobs
        .par_iter()
        .map(|&(cell, realization)| {
            let seed = realization_seed(config.master_seed, cell, realization);
            let result = run_realization(config, &cells[cell].2, &seed, fixed.as_ref());
            if let Err(message) = &result {
                log::debug!("cell {cell} realization {realization} failed: {message}");
            }
            RealizationOutcome {
                cell,
                realization,
                result,
            }
        })
        .collect();

    let results = cells
        .iter()
        .enumerate()
        .map(|(idx, &(axis1, axis2, _))| {
            let outcomes = &realizations[idx * config.realizations..(idx + 1) * config.realizations];
            let ok: Vec<(f64, f64)> = outcomes.iter().filter_map(|o| o.result.clone().ok()).collect();
            let re: Vec<f64> = ok.iter().map(|m| m.0).collect();
            let acc: Vec<f64> = ok.iter().map(|m| m.1).collect();
            let (re_mean, re_stderr) = mean_stderr(&re);
            let (acc_mean, acc_stderr) = mean_stderr(&acc);
            CellResult {
                axis1,
                axis2,
                re_mean,
                re_stderr,
                acc_mean,
                acc_stderr,
                n_realizations: config.realizations,
                n_failures: config.realizations - ok.len(),
            }
        })
        .collect();
    Ok(SweepOutput {
        cells: results,
        realizations,
    })
}

/// Same as [`run_sweep`] on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(config: &SweepConfig, threads: usize) -> Result<SweepOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Usage(e.to_string()))?;
    pool.install(|| run_sweep(config))
}

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub const SWEEP_HEADER: &str = "axis1,axis2,re_mean,re_stderr,acc_mean,acc_stderr,n_ok,n_fail,seed";

pub fn cells_to_csv(cells: &[CellResult], master_seed: u64) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt17(c.axis1),
            fmt17(c.axis2),
            fmt17(c.re_mean),
            fmt17(c.re_stderr),
            fmt17(c.acc_mean),
            fmt17(c.acc_stderr),
            c.n_ok(),
            c.n_failures,
            master_seed
        );
    }
    out
}

pub const REALIZATION_HEADER: &str = "axis1,axis2,realization,ok,re,acc";

pub fn realizations_to_csv(cells: &[CellResult], realizations: &[RealizationOutcome]) -> String {
    let mut out = String::from(REALIZATION_HEADER);
    out.push('\n');
    for o in realizations {
        let cell = &cells[o.cell];
        let (ok, re, acc) = match o.result {
            Ok((re, acc)) => (1, re, acc),
            Err(_) => (0, f64::NAN, f64::NAN),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt17(cell.axis1),
            fmt17(cell.axis2),
            o.realization,
            ok,
            fmt17(re),
            fmt17(acc)
        );
    }
    out
}

/// Companion script that draws the grid CSV as two heat maps.
pub fn plot_script(config: &SweepConfig, csv_name: &str) -> String {
    let (x, y) = config.experiment.axis_names();
    format!(
        r#"#!/usr/bin/env python3
"""Heat maps of mean relative error and support accuracy from {csv_name}."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
rows = list(csv.DictReader(open(here / "{csv_name}")))
xs = sorted({{float(r["axis1"]) for r in rows}})
ys = sorted({{float(r["axis2"]) for r in rows}})
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, key, title in zip(axes, ["re_mean", "acc_mean"], ["mean RE", "mean ACC"]):
    grid = np.full((len(ys), len(xs)), np.nan)
    for r in rows:
        grid[ys.index(float(r["axis2"])), xs.index(float(r["axis1"]))] = float(r[key])
    im = ax.imshow(grid, origin="lower", aspect="auto", cmap="gray_r" if key == "re_mean" else "gray")
    ax.set_xticks(range(len(xs)), [f"{{v:g}}" for v in xs], rotation=90)
    ax.set_yticks(range(len(ys)), [f"{{v:g}}" for v in ys])
    ax.set_xlabel("{x}")
    ax.set_ylabel("{y}")
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else str(here / "{csv_name}").replace(".csv", ".png")
fig.savefig(out, dpi=150)
"#
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> Result<SweepConfig> {
        SweepConfig::from_json(json, Path::new("test.json"))
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = config(r#"{"experiment":"alpha_vs_p","axis1":[0.1],"axis2":[5],"bogus":1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let err = config(r#"{"experiment":"alpha_vs_p","axis1":[0.1],"axis2":[5],"solver":{"tol":1}}"#).unwrap_err();
        assert!(err.to_string().contains("tol"));
    }

    #[test]
    fn grid_ranges_are_checked() {
        assert!(config(r#"{"experiment":"alpha_vs_p","axis1":[0.1],"axis2":[2.5]}"#).is_err());
        assert!(config(r#"{"experiment":"theta_vs_p","axis1":[1.0],"axis2":[5]}"#).is_err());
        assert!(config(r#"{"experiment":"theta_vs_l","axis1":[0.1],"axis2":[30]}"#).is_err());
        assert!(config(r#"{"experiment":"eta_vs_alpha","axis1":[-0.1],"axis2":[0.1]}"#).is_err());
        assert!(config(r#"{"experiment":"alpha_vs_p","axis1":[],"axis2":[5]}"#).is_err());
        assert!(config(r#"{"experiment":"alpha_vs_p","axis1":[0.1],"axis2":[5],"gso":"weird"}"#).is_err());
        let ok = config(r#"{"experiment":"theta_vs_l","axis1":[0.1],"axis2":[1,3]}"#).unwrap();
        assert_eq!(ok.cell_params(0.1, 3.0).unwrap().taps, 3);
    }

    #[test]
    fn mean_and_stderr() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(mean_stderr(&[]).0.is_nan());
        assert_eq!(mean_stderr(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
