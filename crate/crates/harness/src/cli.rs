//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gsdeconv::gsp::{
    apply_spectral_filter, build_gso, eig_sym, frequency_response, inverse_response, khatri_rao_design,
    FrequencyResponse, Graph, ShiftKind,
};
use gsdeconv::solver::{reweighted_l1, SolverConfig};
use gsdeconv::synth::{
    add_noise, gen_bernoulli_gaussian, gen_er_graph, gen_filter_coeffs, gen_inverse_filter, RngSeed,
};
use ndarray::Array1;

use crate::certificate::{check_certificate, CertificateRequest, NoiseSpec, SigmaOverrides};
use crate::error::{HarnessError, Result};
use crate::localization::run_source_localization;
use crate::matrix_io::{matrix_to_csv, read_matrix, read_vector, vector_to_csv, write_text};
use crate::ratings::{ingest_ratings, sample_dense_core};
use crate::sweep::{cells_to_csv, plot_script, realizations_to_csv, run_sweep, run_sweep_with_threads, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "gsdeconv", version, about = "Blind deconvolution of diffused graph signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic graph, sources, inverse filter and observations.
    Gen(GenArgs),
    /// Deconvolve one observation matrix.
    Solve(SolveArgs),
    /// Run a Monte-Carlo sweep described by a JSON config.
    Sweep(SweepArgs),
    /// Report the exact-recovery certificate and noise stability bound.
    Check(CheckArgs),
    /// Source localization on trust + ratings files.
    Epinions(EpinionsArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 20)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.4)]
    pub p_edge: f64,
    #[arg(long, default_value_t = 20)]
    pub signals: usize,
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "norm-adj")]
    pub gso: ShiftKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Reweighting offset; defaults to 1e-3 max(1, max|x|) after the first solve.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 4)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long)]
    pub max_inner: Option<usize>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig<f64>> {
        let config = SolverConfig {
            tolerance: self.tolerance,
            max_inner_iterations: self.max_inner,
            delta: self.delta,
            epsilon: self.eps,
            max_outer_iterations: self.max_outer,
        };
        config.validate().map_err(|e| HarnessError::Usage(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Edge list `i j [w]`.
    #[arg(long)]
    pub graph: PathBuf,
    /// N x P CSV matrix.
    #[arg(long)]
    pub observations: PathBuf,
    #[arg(long, default_value = "norm-adj")]
    pub gso: ShiftKind,
    /// Constraint vector file; all ones when omitted.
    #[arg(long)]
    pub r: Option<PathBuf>,
    /// Constraint value; N when omitted.
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory for x_hat.csv, g_hat.csv and summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write one row per realization.
    #[arg(long)]
    pub log_realizations: bool,
    /// Worker threads; rayon's default when omitted.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Edge list; an ER graph is drawn when omitted.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.4)]
    pub p_edge: f64,
    #[arg(long, default_value = "norm-adj")]
    pub gso: ShiftKind,
    /// Inverse filter response file; overrides --alpha and --taps.
    #[arg(long)]
    pub g0: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Use a polynomial filter with this many taps instead of --alpha.
    #[arg(long)]
    pub taps: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long)]
    pub r: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    #[arg(long)]
    pub sigma1: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub sigma3: Option<f64>,
    #[arg(long)]
    pub sigma4: Option<f64>,
    #[arg(long)]
    pub sigma5: Option<f64>,
    #[arg(long)]
    pub delta_prob: Option<f64>,
    /// Noise level for the stability report; skipped when omitted.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub signals: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EpinionsArgs {
    #[arg(long)]
    pub trust: PathBuf,
    #[arg(long)]
    pub ratings: PathBuf,
    #[arg(long, default_value_t = 150)]
    pub n_min: usize,
    /// Minimum ratings per user; --n-min when omitted.
    #[arg(long)]
    pub n_min_users: Option<usize>,
    /// Minimum raters per item; --n-min when omitted.
    #[arg(long)]
    pub n_min_items: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.3")]
    pub theta_sr: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "norm-adj")]
    pub gso: ShiftKind,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(a) => gen(&a),
        Command::Solve(a) => solve(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Check(a) => check(&a),
        Command::Epinions(a) => epinions(&a),
    }
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

fn usage(e: gsdeconv::Error) -> HarnessError {
    HarnessError::Usage(e.to_string())
}

fn gen(a: &GenArgs) -> Result<()> {
    let seed = RngSeed::new(a.seed);
    let graph: Graph<f64> = gen_er_graph(a.nodes, a.p_edge, &seed.child(0)).map_err(usage)?;
    let dec = eig_sym(&build_gso(&graph, a.gso).map_err(HarnessError::core("shift operator"))?)
        .map_err(HarnessError::core("eigendecomposition"))?;
    let g0: FrequencyResponse<f64> = gen_inverse_filter(a.nodes, a.alpha, &seed.child(1)).map_err(usage)?;
    let h0 = inverse_response(&g0).map_err(HarnessError::core("inverse filter"))?;
    let x0 = gen_bernoulli_gaussian::<f64>(a.nodes, a.signals, a.theta, &seed.child(2)).map_err(usage)?;
    let clean = apply_spectral_filter(dec.eigvecs(), &h0, &x0.values).map_err(HarnessError::core("filtering"))?;
    let y = add_noise(&clean, a.eta, &seed.child(3)).map_err(usage)?;

    create_dir(&a.out)?;
    write_text(&a.out.join("graph.txt"), &graph.to_edge_list())?;
    write_text(&a.out.join("sources.csv"), &matrix_to_csv(&x0.values))?;
    write_text(&a.out.join("g0.csv"), &vector_to_csv(g0.values()))?;
    write_text(&a.out.join("observations.csv"), &matrix_to_csv(&y))?;
    println!(
        "wrote graph.txt, sources.csv, g0.csv, observations.csv to {}",
        a.out.display()
    );
    Ok(())
}

fn solve(a: &SolveArgs) -> Result<()> {
    let config = a.solver.config()?;
    let graph: Graph<f64> = Graph::read_edge_list(&a.graph, None).map_err(HarnessError::core("graph file"))?;
    let y = read_matrix(&a.observations)?;
    let n = graph.n_nodes();
    if y.nrows() != n {
        return Err(HarnessError::Data(format!(
            "observations have {} rows, graph has {n} nodes",
            y.nrows()
        )));
    }
    let r = match &a.r {
        Some(path) => read_vector(path)?,
        None => Array1::ones(n),
    };
    if r.len() != n {
        return Err(HarnessError::Data(format!(
            "r has {} entries, graph has {n} nodes",
            r.len()
        )));
    }
    let c = a.c.unwrap_or(n as f64);
    let dec = eig_sym(&build_gso(&graph, a.gso).map_err(HarnessError::core("shift operator"))?)
        .map_err(HarnessError::core("eigendecomposition"))?;
    let design = khatri_rao_design(&y, dec.eigvecs()).map_err(HarnessError::core("design matrix"))?;
    let sol = reweighted_l1(design.matrix(), &r, c, &config).map_err(HarnessError::core("solve"))?;

    let summary = serde_json::json!({
        "n_nodes": n,
        "n_signals": y.ncols(),
        "objective": sol.objective,
        "outer_iterations": sol.iterations,
        "converged": sol.converged,
        "objective_trace": sol.objective_trace,
    });
    let summary = serde_json::to_string_pretty(&summary).expect("plain JSON value") + "\n";
    if let Some(out) = &a.out {
        create_dir(out)?;
        write_text(&out.join("x_hat.csv"), &matrix_to_csv(&sol.x_hat))?;
        write_text(&out.join("g_hat.csv"), &vector_to_csv(sol.g_hat.values()))?;
        write_text(&out.join("summary.json"), &summary)?;
    }
    print!("{summary}");
    if !sol.converged {
        return Err(HarnessError::NonConvergence(
            "interior-point iterations hit their budget".into(),
        ));
    }
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let config = SweepConfig::read(&a.config)?;
    let output = match a.threads {
        Some(t) => run_sweep_with_threads(&config, t)?,
        None => run_sweep(&config)?,
    };
    let stem = a
        .config
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("sweep")
        .to_string();
    create_dir(&a.out)?;
    let csv_name = format!("{stem}.csv");
    write_text(&a.out.join(&csv_name), &cells_to_csv(&output.cells, config.master_seed))?;
    write_text(&a.out.join(format!("plot_{stem}.py")), &plot_script(&config, &csv_name))?;
    if a.log_realizations {
        write_text(
            &a.out.join(format!("{stem}_realizations.csv")),
            &realizations_to_csv(&output.cells, &output.realizations),
        )?;
    }
    let failures: usize = output.cells.iter().map(|c| c.n_failures).sum();
    println!(
        "{} cells x {} realizations written to {} ({failures} failed realizations)",
        output.cells.len(),
        config.realizations,
        a.out.join(&csv_name).display()
    );
    Ok(())
}

fn check(a: &CheckArgs) -> Result<()> {
    let seed = RngSeed::new(a.seed);
    let graph: Graph<f64> = match &a.graph {
        Some(path) => Graph::read_edge_list(path, None).map_err(HarnessError::core("graph file"))?,
        None => gen_er_graph(a.nodes, a.p_edge, &seed.child(0)).map_err(usage)?,
    };
    let n = graph.n_nodes();
    let g0 = if let Some(path) = &a.g0 {
        FrequencyResponse(read_vector(path)?)
    } else if let Some(taps) = a.taps {
        let dec = eig_sym(&build_gso(&graph, a.gso).map_err(HarnessError::core("shift operator"))?)
            .map_err(HarnessError::core("eigendecomposition"))?;
        let h = gen_filter_coeffs::<f64>(taps, a.beta, &seed.child(1)).map_err(usage)?;
        let resp = frequency_response(&h, dec.eigvals().view()).map_err(usage)?;
        inverse_response(&resp).map_err(HarnessError::core("filter"))?
    } else {
        gen_inverse_filter(n, a.alpha, &seed.child(1)).map_err(usage)?
    };
    let request = CertificateRequest {
        graph,
        kind: a.gso,
        g0,
        r: a.r.as_deref().map(read_vector).transpose()?,
        c: a.c,
        theta: a.theta,
        sigmas: SigmaOverrides {
            sigma1: a.sigma1,
            sigma2: a.sigma2,
            sigma3: a.sigma3,
            sigma4: a.sigma4,
            sigma5: a.sigma5,
            delta_prob: a.delta_prob,
        },
        noise: a.eta.map(|eta| NoiseSpec {
            eta,
            n_signals: a.signals,
            seed: a.seed.wrapping_add(1),
        }),
    };
    let report = check_certificate(&request)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| HarnessError::Data(e.to_string()))? + "\n";
    match &a.out {
        Some(path) => write_text(path, &json)?,
        None => print!("{json}"),
    }
    Ok(())
}

fn epinions(a: &EpinionsArgs) -> Result<()> {
    let config = a.solver.config()?;
    if a.theta_sr.is_empty() {
        return Err(HarnessError::Usage("--theta-sr needs at least one value".into()));
    }
    let data = ingest_ratings(&a.trust, &a.ratings)?;
    log::info!(
        "ingested {} users, {} items, {} ratings",
        data.n_users(),
        data.n_items(),
        data.ratings.len()
    );
    let core = sample_dense_core(
        &data,
        a.n_min_items.unwrap_or(a.n_min),
        a.n_min_users.unwrap_or(a.n_min),
        &RngSeed::new(a.seed),
    )?;
    create_dir(&a.out)?;
    let mut trace = String::from("iteration,items,users,component\n");
    for (i, it) in core.trace.iter().enumerate() {
        let _ = writeln!(trace, "{},{},{},{}", i + 1, it.items, it.users, it.component);
    }
    write_text(&a.out.join("core_trace.csv"), &trace)?;
    if core.dataset.n_users() < 2 || core.dataset.n_items() == 0 {
        return Err(HarnessError::Data(format!(
            "dense core has {} users and {} items after {} iterations",
            core.dataset.n_users(),
            core.dataset.n_items(),
            core.trace.len()
        )));
    }
    let report = run_source_localization(&core.dataset, a.gso, &config, &a.theta_sr)?;
    let mut table = String::from("theta_sr,auc,naive_auc\n");
    for row in &report.rows {
        let _ = writeln!(table, "{:?},{:?},{:?}", row.theta_sr, row.auc, row.naive_auc);
    }
    write_text(&a.out.join("auc.csv"), &table)?;
    write_text(&a.out.join("x_hat.csv"), &matrix_to_csv(&report.localization.x_hat))?;
    print!("{table}");
    Ok(())
}
