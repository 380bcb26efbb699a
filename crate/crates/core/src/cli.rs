//! Command-line front end.
//!
//! Precedence for every setting: command-line flag, then `--config` file, then the
//! built-in default. The resolved settings are written to `manifest.json` in the
//! output directory, and that file is itself accepted by `--config`.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::contagion::{Mode, RunConfig};
use crate::error::{Error, Result};
use crate::io::{self, ScatterPayload, StressResultJson};
use crate::manifest::{ConfigFile, ResolvedConfig, RunManifest};
use crate::model::{build_system, BankingSystem};
use crate::reconstruction::{reconstruct_ensemble, Ensemble, ReconstructionConfig, SampleInfo};
use crate::scenarios::{alpha_sweep, run_impact_vulnerability, uniform_results, UniformScenario};
use crate::spectral::{spectral_radius, StabilityReport, DEFAULT_MAX_ITER, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(name = "debtrank", version, about = "Interbank contagion stress testing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sample an ensemble of exposure matrices from balance-sheet totals.
    Reconstruct,
    /// Spectral radius and stability class of the leverage matrix.
    Stability,
    /// Uniform devaluation of external assets by --alpha.
    Uniform,
    /// One-bank-at-a-time shocks: impact and vulnerability rankings.
    Impact,
    /// Uniform scenario over the --alphas grid.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Reconstruct => "reconstruct",
            Command::Stability => "stability",
            Command::Uniform => "uniform",
            Command::Impact => "impact",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Balance-sheet CSV.
    #[arg(long, global = true)]
    pub balance: Option<PathBuf>,
    /// Exposure edge-list CSV; skips reconstruction when given.
    #[arg(long, global = true)]
    pub exposures: Option<PathBuf>,
    /// JSON config file or a previous run's manifest.json.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Comma-separated list of shock sizes.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub density: Option<f64>,
    #[arg(long, global = true)]
    pub ensemble: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "ras-tol", global = true)]
    pub ras_tol: Option<f64>,
    #[arg(long = "ras-max-iter", global = true)]
    pub ras_max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "max-steps", global = true)]
    pub max_steps: Option<usize>,
    /// generalized | debtrank
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// Include per-step loss vectors in results.json.
    #[arg(long, global = true)]
    pub trace: bool,
    #[arg(long, global = true, env = "DEBTRANK_THREADS")]
    pub threads: Option<usize>,
}

/// Shock sizes 0.5%, 1.0%, ..., 5.5%.
pub fn default_alphas() -> Vec<f64> {
    (1..=11).map(|k| k as f64 * 0.005).collect()
}

/// Merges flags over the config file over defaults.
pub fn resolve(flags: &Flags) -> Result<ResolvedConfig> {
    let file = match &flags.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let recon = ReconstructionConfig::<f64>::default();
    let balance = flags
        .balance
        .clone()
        .or(file.balance)
        .ok_or_else(|| Error::Config("--balance is required".into()))?;
    let cfg = ResolvedConfig {
        balance,
        exposures: flags.exposures.clone().or(file.exposures),
        alpha: flags.alpha.or(file.alpha).unwrap_or(0.01),
        alphas: flags.alphas.clone().or(file.alphas).unwrap_or_else(default_alphas),
        density: flags.density.or(file.density).unwrap_or(recon.target_density),
        ensemble: flags.ensemble.or(file.ensemble).unwrap_or(recon.ensemble_size),
        seed: flags.seed.or(file.seed).unwrap_or(recon.seed),
        ras_tol: flags.ras_tol.or(file.ras_tol).unwrap_or(recon.ras_tol),
        ras_max_iter: flags.ras_max_iter.or(file.ras_max_iter).unwrap_or(recon.ras_max_iter),
        tol: flags.tol.or(file.tol).unwrap_or(RunConfig::<f64>::default().tol),
        max_steps: flags.max_steps.or(file.max_steps),
        mode: flags.mode.or(file.mode).unwrap_or_default(),
        trace: flags.trace || file.trace.unwrap_or(false),
        spectral_tol: file.spectral_tol.unwrap_or(DEFAULT_TOL),
        spectral_max_iter: file.spectral_max_iter.unwrap_or(DEFAULT_MAX_ITER),
    };
    if cfg.alpha < 0.0 || cfg.alphas.iter().any(|&a| a < 0.0) {
        return Err(Error::NegativeAlpha(
            cfg.alpha.min(cfg.alphas.iter().copied().fold(0.0, f64::min)),
        ));
    }
    Ok(cfg)
}

impl ResolvedConfig {
    pub fn run_config(&self) -> RunConfig<f64> {
        RunConfig {
            tol: self.tol,
            max_steps: self.max_steps,
            mode: self.mode,
            record_trajectory: self.trace,
        }
    }

    pub fn reconstruction(&self) -> ReconstructionConfig<f64> {
        ReconstructionConfig {
            target_density: self.density,
            ensemble_size: self.ensemble,
            ras_tol: self.ras_tol,
            ras_max_iter: self.ras_max_iter,
            seed: self.seed,
            ..ReconstructionConfig::default()
        }
    }
}

type Loaded = (Vec<BankingSystem<f64>>, Option<Ensemble<f64>>);

/// Systems to run on: the given exposure matrix, or a reconstructed ensemble.
fn load_systems(cfg: &ResolvedConfig) -> Result<Loaded> {
    let inputs = io::load_inputs::<f64>(&cfg.balance, cfg.exposures.as_deref())?;
    match inputs.exposures {
        Some(a) => Ok((vec![build_system(inputs.records, a)?], None)),
        None => {
            let ens = reconstruct_ensemble(&inputs.records, &cfg.reconstruction())?;
            Ok((ens.systems.clone(), Some(ens)))
        }
    }
}

struct Output<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl Output<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<()> {
        let p = self.path(name);
        io::write_json(&p, value)
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }
}

#[derive(Serialize)]
struct EnsembleManifest<'a> {
    z: f64,
    density: f64,
    ensemble: usize,
    seed: u64,
    ras_tol: f64,
    ras_max_iter: usize,
    samples: &'a [SampleInfo],
    mean_realized_density: f64,
}

fn sample_name(index: usize, total: usize) -> String {
    let width = total.saturating_sub(1).to_string().len().max(3);
    format!("sample_{index:0width$}.csv")
}

fn write_ensemble(out: &mut Output, cfg: &ResolvedConfig, ens: &Ensemble<f64>) -> Result<()> {
    for (k, sys) in ens.systems.iter().enumerate() {
        let name = sample_name(k, ens.systems.len());
        io::write_edge_list(out.file(&name)?, sys)?;
    }
    io::write_balance_sheets(out.file("balance_rescaled.csv")?, &ens.records)?;
    let mean = ens.samples.iter().map(|s| s.realized_density).sum::<f64>() / ens.samples.len() as f64;
    out.json(
        "ensemble.json",
        &EnsembleManifest {
            z: ens.z,
            density: cfg.density,
            ensemble: cfg.ensemble,
            seed: cfg.seed,
            ras_tol: cfg.ras_tol,
            ras_max_iter: cfg.ras_max_iter,
            samples: &ens.samples,
            mean_realized_density: mean,
        },
    )
}

#[derive(Serialize)]
struct SweepRow {
    alpha: f64,
    direct_mean: f64,
    direct_min: f64,
    direct_max: f64,
    final_mean: f64,
    final_min: f64,
    final_max: f64,
    amplification_mean: f64,
    amplification_min: f64,
    amplification_max: f64,
    all_converged: bool,
}

impl From<&UniformScenario<f64>> for SweepRow {
    fn from(s: &UniformScenario<f64>) -> Self {
        Self {
            alpha: s.alpha,
            direct_mean: s.direct.mean,
            direct_min: s.direct.min,
            direct_max: s.direct.max,
            final_mean: s.final_.mean,
            final_min: s.final_.min,
            final_max: s.final_.max,
            amplification_mean: s.amplification.mean,
            amplification_min: s.amplification.min,
            amplification_max: s.amplification.max,
            all_converged: s.all_converged,
        }
    }
}

/// Runs one subcommand and writes its artifacts under `out`. Returns a short JSON summary.
pub fn dispatch(
    command: Command,
    cfg: &ResolvedConfig,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<serde_json::Value> {
    fs::create_dir_all(out_dir)?;
    let mut out = Output {
        dir: out_dir,
        written: Vec::new(),
    };
    let mut manifest = RunManifest::new(command.name(), cfg.clone(), threads)?;
    let run_cfg = cfg.run_config();
    run_cfg.validate()?;

    let summary = match command {
        Command::Reconstruct => {
            let inputs = io::load_inputs::<f64>(&cfg.balance, None)?;
            let ens = reconstruct_ensemble(&inputs.records, &cfg.reconstruction())?;
            write_ensemble(&mut out, cfg, &ens)?;
            json!({ "z": ens.z, "samples": ens.systems.len() })
        }
        Command::Stability => {
            let (systems, ens) = load_systems(cfg)?;
            if let Some(ens) = &ens {
                write_ensemble(&mut out, cfg, ens)?;
            }
            let reports: Vec<StabilityReport<f64>> = systems
                .iter()
                .map(|s| spectral_radius(s.lambda(), cfg.spectral_tol, cfg.spectral_max_iter))
                .collect();
            if reports.len() == 1 {
                out.json("stability.json", &reports[0])?;
                serde_json::to_value(&reports[0])?
            } else {
                out.json("stability.json", &reports)?;
                let max = reports.iter().map(|r| r.spectral_radius).fold(0.0, f64::max);
                json!({ "samples": reports.len(), "max_spectral_radius": max })
            }
        }
        Command::Uniform => {
            let (systems, ens) = load_systems(cfg)?;
            if let Some(ens) = &ens {
                write_ensemble(&mut out, cfg, ens)?;
            }
            let results = uniform_results(&systems, cfg.alpha, &run_cfg)?;
            let scenario = UniformScenario::from_results(cfg.alpha, &results);
            let wire: Vec<StressResultJson<f64>> = results
                .iter()
                .zip(&systems)
                .map(|(r, s)| StressResultJson::new(r, s, cfg.trace))
                .collect();
            out.json("results.json", &wire)?;
            out.json("uniform.json", &scenario)?;
            json!({
                "alpha": cfg.alpha,
                "direct_loss": scenario.direct.mean,
                "final_loss": scenario.final_.mean,
                "amplification": scenario.amplification.mean,
                "all_converged": scenario.all_converged,
            })
        }
        Command::Impact => {
            let (systems, ens) = load_systems(cfg)?;
            if let Some(ens) = &ens {
                write_ensemble(&mut out, cfg, ens)?;
            }
            let iv = run_impact_vulnerability(&systems, cfg.alpha, &run_cfg)?;
            io::write_rankings(out.file("rankings.csv")?, &iv)?;
            out.json("scatter.json", &ScatterPayload::new(&iv))?;
            out.json("impact.json", &iv)?;
            json!({ "banks": iv.bank_ids.len(), "systems": systems.len(), "all_converged": iv.all_converged })
        }
        Command::Sweep => {
            let (systems, ens) = load_systems(cfg)?;
            if let Some(ens) = &ens {
                write_ensemble(&mut out, cfg, ens)?;
            }
            let rows = alpha_sweep(&systems, &cfg.alphas, &run_cfg)?;
            let mut w = csv::Writer::from_writer(out.file("sweep.csv")?);
            for row in &rows {
                w.serialize(SweepRow::from(row))
                    .map_err(|e| Error::Config(e.to_string()))?;
            }
            w.flush()?;
            out.json("sweep.json", &rows)?;
            json!({ "alphas": cfg.alphas.len(), "systems": systems.len() })
        }
    };
    manifest.outputs = out.written.clone();
    io::write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(summary)
}

fn report_error(err: &Error, out_dir: Option<&Path>) {
    let payload = json!({ "error": { "kind": err.kind(), "message": err.to_string() } });
    eprintln!("{payload}");
    if let Some(dir) = out_dir {
        if dir.is_dir() {
            let _ = io::write_json(&dir.join("error.json"), &payload);
        }
    }
}

fn run_cli(cli: &Cli) -> Result<serde_json::Value> {
    let cfg = resolve(&cli.flags)?;
    let threads = cli.flags.threads.filter(|&t| t > 0);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command, &cfg, &cli.flags.out, threads))
}

/// Entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            report_error(&e, Some(&cli.flags.out));
            1
        }
    }
}
