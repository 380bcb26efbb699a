//! Stress scenarios over ensembles of banking systems: a uniform devaluation of
//! external assets, a sweep over its size, and one-bank-at-a-time shocks giving
//! impact and vulnerability rankings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contagion::{build_shock, run, RunConfig, ShockSpec, StressResult};
use crate::error::{Error, Result};
use crate::model::BankingSystem;
use crate::scalar::Scalar;

/// `H(t)` of one run with its summary ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemLossSeries<T> {
    pub series: Vec<T>,
    /// `H(1)`.
    pub direct_loss: T,
    /// `H` at convergence.
    pub final_loss: T,
    /// `final_loss / direct_loss`, taken as 1 when there is no direct loss.
    pub amplification: T,
    pub converged: bool,
}

impl<T: Scalar> SystemLossSeries<T> {
    pub fn from_result(result: &StressResult<T>) -> Self {
        let direct_loss = result.direct_loss();
        let final_loss = result.final_loss();
        let amplification = if direct_loss > T::zero() {
            final_loss / direct_loss
        } else {
            T::one()
        };
        Self {
            series: result.aggregate_series.clone(),
            direct_loss,
            final_loss,
            amplification,
            converged: result.converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary<T> {
    pub mean: T,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> Summary<T> {
    /// Summary of a nonempty sample, accumulated in order.
    pub fn of(values: impl IntoIterator<Item = T>) -> Self {
        let mut count = 0usize;
        let mut sum = T::zero();
        let mut min = T::infinity();
        let mut max = T::neg_infinity();
        for v in values {
            count += 1;
            sum = sum + v;
            min = min.min(v);
            max = max.max(v);
        }
        assert!(count > 0, "summary of an empty sample");
        Self {
            mean: sum / T::from_count(count),
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformScenario<T> {
    pub alpha: T,
    pub per_system: Vec<SystemLossSeries<T>>,
    pub direct: Summary<T>,
    #[serde(rename = "final")]
    pub final_: Summary<T>,
    pub amplification: Summary<T>,
    pub all_converged: bool,
}

fn check_ensemble<T: Scalar>(systems: &[BankingSystem<T>]) -> Result<usize> {
    let first = systems.first().ok_or(Error::EmptySystem)?;
    let n = first.n();
    if let Some(s) = systems.iter().find(|s| s.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: s.n(),
        });
    }
    Ok(n)
}

/// Devalues every bank's external assets by `alpha` in each system and runs contagion.
pub fn run_uniform_scenario<T: Scalar>(
    systems: &[BankingSystem<T>],
    alpha: T,
    config: &RunConfig<T>,
) -> Result<UniformScenario<T>> {
    let results = uniform_results(systems, alpha, config)?;
    Ok(UniformScenario::from_results(alpha, &results))
}

/// Full per-system results of the uniform shock, in ensemble order.
pub fn uniform_results<T: Scalar>(
    systems: &[BankingSystem<T>],
    alpha: T,
    config: &RunConfig<T>,
) -> Result<Vec<StressResult<T>>> {
    check_ensemble(systems)?;
    systems
        .par_iter()
        .map(|sys| {
            let h1 = build_shock(&ShockSpec::Uniform(alpha), sys)?;
            run(sys, &h1, config)
        })
        .collect()
}

impl<T: Scalar> UniformScenario<T> {
    pub fn from_results(alpha: T, results: &[StressResult<T>]) -> Self {
        let per_system: Vec<SystemLossSeries<T>> = results.iter().map(SystemLossSeries::from_result).collect();
        Self {
            alpha,
            direct: Summary::of(per_system.iter().map(|s| s.direct_loss)),
            final_: Summary::of(per_system.iter().map(|s| s.final_loss)),
            amplification: Summary::of(per_system.iter().map(|s| s.amplification)),
            all_converged: per_system.iter().all(|s| s.converged),
            per_system,
        }
    }
}

/// [`run_uniform_scenario`] for each `alpha`, in order.
pub fn alpha_sweep<T: Scalar>(
    systems: &[BankingSystem<T>],
    alphas: &[T],
    config: &RunConfig<T>,
) -> Result<Vec<UniformScenario<T>>> {
    if alphas.is_empty() {
        return Err(Error::Config("alpha sweep needs at least one alpha".into()));
    }
    alphas
        .iter()
        .map(|&a| {
            let config = RunConfig {
                record_trajectory: false,
                ..config.clone()
            };
            run_uniform_scenario(systems, a, &config)
        })
        .collect()
}

/// Ensemble-averaged impact and vulnerability with descending ranks (1 = largest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactVulnerability<T> {
    pub bank_ids: Vec<String>,
    pub names: Vec<String>,
    pub total_assets: Vec<T>,
    /// Final `H` when only that bank is shocked.
    pub impact: Vec<T>,
    /// Mean final `h_i` over all single-bank experiments, the bank's own included.
    pub vulnerability: Vec<T>,
    pub impact_rank: Vec<usize>,
    pub vulnerability_rank: Vec<usize>,
    pub all_converged: bool,
}

/// Shocks one bank at a time in every system, averages over the ensemble, then ranks.
pub fn run_impact_vulnerability<T: Scalar>(
    systems: &[BankingSystem<T>],
    alpha: T,
    config: &RunConfig<T>,
) -> Result<ImpactVulnerability<T>> {
    let n = check_ensemble(systems)?;
    if n < 2 {
        return Err(Error::Config("impact/vulnerability needs at least two banks".into()));
    }
    let config = RunConfig {
        record_trajectory: false,
        ..config.clone()
    };
    let grid: Vec<(T, Vec<T>, bool)> = (0..systems.len() * n)
        .into_par_iter()
        .map(|cell| {
            let (sys, bank) = (&systems[cell / n], cell % n);
            let h1 = build_shock(&ShockSpec::Single { bank, alpha }, sys)?;
            let res = run(sys, &h1, &config)?;
            Ok((res.final_loss(), res.h_final, res.converged))
        })
        .collect::<Result<_>>()?;

    let mut impact = vec![T::zero(); n];
    let mut vulnerability = vec![T::zero(); n];
    let count = T::from_count(systems.len());
    let banks = T::from_count(n);
    for per_system in grid.chunks(n) {
        let mut vuln = vec![T::zero(); n];
        for (b, (loss, h_final, _)) in per_system.iter().enumerate() {
            impact[b] = impact[b] + *loss / count;
            for (v, &h) in vuln.iter_mut().zip(h_final) {
                *v = *v + h;
            }
        }
        for (acc, v) in vulnerability.iter_mut().zip(vuln) {
            *acc = *acc + v / banks / count;
        }
    }

    let records = systems[0].records();
    let bank_ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
    Ok(ImpactVulnerability {
        names: records.iter().map(|r| r.name.clone()).collect(),
        total_assets: records.iter().map(|r| r.total_assets).collect(),
        impact_rank: descending_ranks(&impact, &bank_ids),
        vulnerability_rank: descending_ranks(&vulnerability, &bank_ids),
        bank_ids,
        impact,
        vulnerability,
        all_converged: grid.iter().all(|(_, _, c)| *c),
    })
}

/// Rank 1 for the largest value; ties go to the smaller key.
pub fn descending_ranks<T: Scalar, K: Ord>(values: &[T], keys: &[K]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| keys[a].cmp(&keys[b]))
    });
    let mut ranks = vec![0; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    ranks
}
