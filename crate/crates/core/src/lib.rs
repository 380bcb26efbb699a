//! Stress testing of interbank networks with the generalized DebtRank dynamics.
//!
//! - [`model`]: balance sheets, exposures and leverage matrices.
//! - [`contagion`]: loss dynamics (generalized, equity-space, original DebtRank).
//! - [`spectral`]: spectral-radius stability and the linear fixed point.
//! - [`reconstruction`]: fitness-model topology sampling and RAS balancing.
//! - [`scenarios`]: uniform shocks, alpha sweeps, impact/vulnerability rankings.
//! - [`io`], [`manifest`], [`cli`]: file formats and the command-line front end.
//!
//! The numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix it to `f64`, which is what the CLI uses.

pub mod cli;
pub mod contagion;
pub mod error;
pub mod io;
pub mod manifest;
pub mod matrix;
pub mod model;
pub mod reconstruction;
pub mod scalar;
pub mod scenarios;
pub mod spectral;
pub mod synthetic;

pub use contagion::{
    build_shock, run, run_contagion, run_original_debtrank, simulate_equity, step_generalized, ContagionState,
    DefaultEvent, Mode, RunConfig, ShockSpec, StressResult,
};
pub use error::{Error, MarginSide, Result};
pub use matrix::DenseMatrix;
pub use model::{
    active_set, build_system, reduce_leverage, ActiveSet, BankRecord, BankingSystem, ExposureMatrix, LeverageMatrices,
};
pub use reconstruction::{
    calibrate_z, link_probabilities, ras_balance, reconstruct_ensemble, rescale_liabilities, sample_topology,
    Adjacency, Ensemble, FitnessVectors, ReconstructionConfig,
};
pub use scalar::Scalar;
pub use scenarios::{
    alpha_sweep, run_impact_vulnerability, run_uniform_scenario, ImpactVulnerability, SystemLossSeries, UniformScenario,
};
pub use spectral::{linear_fixed_point, spectral_radius, stability_after_defaults, Classification, StabilityReport};

pub type Matrix = DenseMatrix<f64>;
pub type Record = BankRecord<f64>;
pub type Exposures = ExposureMatrix<f64>;
pub type System = BankingSystem<f64>;
pub type Config = RunConfig<f64>;
pub type Stress = StressResult<f64>;
pub type Report = StabilityReport<f64>;
pub type Reconstruction = ReconstructionConfig<f64>;
pub type Rankings = ImpactVulnerability<f64>;

pub type Matrix32 = DenseMatrix<f32>;
pub type System32 = BankingSystem<f32>;
pub type Config32 = RunConfig<f32>;
