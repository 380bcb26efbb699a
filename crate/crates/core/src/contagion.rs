//! Contagion dynamics on a [`BankingSystem`].
//!
//! Three routes share the same inputs:
//!
//! - [`run_contagion`]: the generalized dynamics on relative equity losses `h`.
//!   Every bank keeps passing on increments of its own loss until it defaults.
//! - [`simulate_equity`]: the same dynamics written on equities `E` with `Λ̃`.
//!   Used as an independent check of `run_contagion`.
//! - [`run_original_debtrank`]: the original DebtRank rule, where a bank propagates
//!   its loss once, on the step after it is first hit, with weights `min(1, Λ)`.
//!
//! Timing follows `h(0) = 0`, `h(1) = shock`. Exposures first react at `t = 2`, and
//! a default at time `t` removes the bank from the leverage matrix from `t + 1` on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::model::{active_set, reduce_leverage, ActiveSet, BankingSystem};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Generalized,
    #[serde(alias = "original_debtrank")]
    Debtrank,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "generalized" => Ok(Mode::Generalized),
            "debtrank" | "original" | "original_debtrank" => Ok(Mode::Debtrank),
            other => Err(format!("unknown mode {other:?}, expected generalized|debtrank")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig<T> {
    /// Stop once `max_i |Δh_i| < tol`.
    pub tol: T,
    /// Cap on the time index. `None` resolves to `10 N + 1000`.
    pub max_steps: Option<usize>,
    pub mode: Mode,
    /// Keep the per-step `h` vectors in the result.
    pub record_trajectory: bool,
}

impl<T: Scalar> Default for RunConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(T::CONTAGION_TOL),
            max_steps: None,
            mode: Mode::Generalized,
            record_trajectory: true,
        }
    }
}

impl<T: Scalar> RunConfig<T> {
    pub fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn max_steps_for(&self, n: usize) -> usize {
        self.max_steps.unwrap_or(10 * n + 1000)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.tol.is_positive() {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_steps == Some(0) {
            return Err(Error::Config("max_steps must be >= 1".into()));
        }
        Ok(())
    }
}

/// State of the generalized dynamics at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContagionState<T> {
    pub t: usize,
    /// `h(t)`.
    pub h: Vec<T>,
    /// `h(t - 1)`.
    pub h_prev: Vec<T>,
    /// `𝒜(t - 1)`.
    pub active_prev: ActiveSet,
}

impl<T: Scalar> ContagionState<T> {
    /// State at `t = 1` right after the shock, with `h(0) = 0`.
    pub fn after_shock(h1: &[T]) -> Self {
        let h = h1.iter().map(|&v| clip_loss(v)).collect();
        Self {
            t: 1,
            h,
            h_prev: vec![T::zero(); h1.len()],
            active_prev: ActiveSet::all(h1.len()),
        }
    }

    /// `max_i |h_i(t) - h_i(t-1)|`.
    pub fn max_delta(&self) -> T {
        self.h
            .iter()
            .zip(&self.h_prev)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

/// Clamps into `[0, 1]` and snaps values within `DEFAULT_EPS` of 1 onto 1.
fn clip_loss<T: Scalar>(v: T) -> T {
    let v = v.max(T::zero()).min(T::one());
    if v >= T::one() - T::lit(T::DEFAULT_EPS) {
        T::one()
    } else {
        v
    }
}

/// One step of the generalized dynamics:
/// `h_i(t+1) = min(1, h_i(t) + Σ_j Λ_ij(t) (h_j(t) - h_j(t-1)))`, with `Λ(t)` reduced by `𝒜(t-1)`.
pub fn step_generalized<T: Scalar>(state: &ContagionState<T>, system: &BankingSystem<T>) -> ContagionState<T> {
    let n = system.n();
    let mut acc = vec![T::zero(); n];
    for j in state.active_prev.iter() {
        let dh = state.h[j] - state.h_prev[j];
        if dh == T::zero() {
            continue;
        }
        for &(i, lambda_ij) in system.lenders_of(j) {
            if state.active_prev.contains(i) {
                acc[i] = acc[i] + lambda_ij * dh;
            }
        }
    }
    let h_next: Vec<T> = state.h.iter().zip(&acc).map(|(&h, &a)| clip_loss(h + a)).collect();
    ContagionState {
        t: state.t + 1,
        active_prev: active_set(&state.h),
        h_prev: state.h.clone(),
        h: h_next,
    }
}

/// Default of `bank` first observed at time `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefaultEvent {
    pub bank: usize,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressResult<T> {
    pub h_final: Vec<T>,
    /// `h(1), h(2), ...`; empty when trajectories are not recorded.
    pub trajectory: Vec<Vec<T>>,
    pub defaults: Vec<DefaultEvent>,
    /// Final time index.
    pub steps: usize,
    pub converged: bool,
    /// `H(t)` for `t = 1..=steps`.
    pub aggregate_series: Vec<T>,
}

impl<T: Scalar> StressResult<T> {
    /// `H(1)`.
    pub fn direct_loss(&self) -> T {
        self.aggregate_series.first().copied().unwrap_or_else(T::zero)
    }

    /// `H` at the last step.
    pub fn final_loss(&self) -> T {
        self.aggregate_series.last().copied().unwrap_or_else(T::zero)
    }

    pub fn defaulted(&self) -> impl Iterator<Item = usize> + '_ {
        self.defaults.iter().map(|d| d.bank)
    }
}

/// `H = Σ_i h_i E_i(0) / Σ_j E_j(0)`.
pub fn system_loss<T: Scalar>(h: &[T], equity0: &[T]) -> T {
    let total: T = equity0.iter().copied().sum();
    let lost = h.iter().zip(equity0).fold(T::zero(), |acc, (&hi, &e)| acc + hi * e);
    lost / total
}

struct Recorder<'a, T> {
    equity0: &'a [T],
    keep_trajectory: bool,
    trajectory: Vec<Vec<T>>,
    series: Vec<T>,
    defaults: Vec<DefaultEvent>,
    defaulted: Vec<bool>,
}

impl<'a, T: Scalar> Recorder<'a, T> {
    fn new(equity0: &'a [T], keep_trajectory: bool) -> Self {
        Self {
            equity0,
            keep_trajectory,
            trajectory: Vec::new(),
            series: Vec::new(),
            defaults: Vec::new(),
            defaulted: vec![false; equity0.len()],
        }
    }

    fn record(&mut self, t: usize, h: &[T]) {
        for (i, &v) in h.iter().enumerate() {
            if v >= T::one() && !self.defaulted[i] {
                self.defaulted[i] = true;
                self.defaults.push(DefaultEvent { bank: i, step: t });
            }
        }
        self.series.push(system_loss(h, self.equity0));
        if self.keep_trajectory {
            self.trajectory.push(h.to_vec());
        }
    }

    fn finish(self, h_final: Vec<T>, steps: usize, converged: bool) -> StressResult<T> {
        StressResult {
            h_final,
            trajectory: self.trajectory,
            defaults: self.defaults,
            steps,
            converged,
            aggregate_series: self.series,
        }
    }
}

fn check_shock<T: Scalar>(system: &BankingSystem<T>, h1: &[T]) -> Result<()> {
    if h1.len() != system.n() {
        return Err(Error::ShockLength {
            expected: system.n(),
            actual: h1.len(),
        });
    }
    if h1.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("shock vector has non-finite entries".into()));
    }
    Ok(())
}

/// Runs the dynamics selected by `config.mode`.
pub fn run<T: Scalar>(system: &BankingSystem<T>, h1: &[T], config: &RunConfig<T>) -> Result<StressResult<T>> {
    match config.mode {
        Mode::Generalized => run_contagion(system, h1, config),
        Mode::Debtrank => run_original_debtrank(system, h1, config),
    }
}

/// Iterates [`step_generalized`] from `h(1) = h1` until `max |Δh| < tol` or the step cap.
///
/// Hitting the cap is reported as `converged = false`, not as an error.
pub fn run_contagion<T: Scalar>(system: &BankingSystem<T>, h1: &[T], config: &RunConfig<T>) -> Result<StressResult<T>> {
    config.validate()?;
    check_shock(system, h1)?;
    let max_steps = config.max_steps_for(system.n());
    let mut recorder = Recorder::new(system.equity0(), config.record_trajectory);
    let mut state = ContagionState::after_shock(h1);
    recorder.record(state.t, &state.h);
    let converged = loop {
        if state.max_delta() < config.tol {
            break true;
        }
        if state.t >= max_steps {
            break false;
        }
        state = step_generalized(&state, system);
        recorder.record(state.t, &state.h);
    };
    Ok(recorder.finish(state.h, state.t, converged))
}

/// Original DebtRank:
/// `h_i(t+1) = min(1, h_i(t) + Σ_{j ∈ 𝒜'(t)} W_ij h_j(t))` with `W = min(1, Λ)` and
/// `𝒜'(t) = { j : h_j(t) > 0, h_j(t-1) = 0 }`. Stops once `𝒜'(t)` is empty.
pub fn run_original_debtrank<T: Scalar>(
    system: &BankingSystem<T>,
    h1: &[T],
    config: &RunConfig<T>,
) -> Result<StressResult<T>> {
    config.validate()?;
    check_shock(system, h1)?;
    let n = system.n();
    let max_steps = config.max_steps_for(n);
    let mut recorder = Recorder::new(system.equity0(), config.record_trajectory);
    let mut h: Vec<T> = h1.iter().map(|&v| clip_loss(v)).collect();
    let mut h_prev = vec![T::zero(); n];
    let mut t = 1;
    recorder.record(t, &h);
    let converged = loop {
        let fresh: Vec<usize> = (0..n).filter(|&j| h[j] > T::zero() && h_prev[j] == T::zero()).collect();
        if fresh.is_empty() {
            break true;
        }
        if t >= max_steps {
            break false;
        }
        let mut acc = vec![T::zero(); n];
        for &j in &fresh {
            for &(i, lambda_ij) in system.lenders_of(j) {
                acc[i] = acc[i] + lambda_ij.min(T::one()) * h[j];
            }
        }
        let next: Vec<T> = h.iter().zip(&acc).map(|(&v, &a)| clip_loss(v + a)).collect();
        h_prev = std::mem::replace(&mut h, next);
        t += 1;
        recorder.record(t, &h);
    };
    Ok(recorder.finish(h, t, converged))
}

/// Equity path `E(0), E(1), ...` under the equity-space form of the generalized dynamics:
/// `E_i(t+1) = max(0, E_i(t) + Σ_j Λ̃_ij(t) (E_j(t) - E_j(t-1)))`, `E(1) = E(0) (1 - h1)`.
///
/// Uses dense `Λ̃` rebuilt with [`reduce_leverage`] whenever the active set changes, and
/// stops under the same criterion as [`run_contagion`], expressed as
/// `max_i |ΔE_i| / E_i(0) < tol`.
pub fn simulate_equity<T: Scalar>(system: &BankingSystem<T>, h1: &[T], config: &RunConfig<T>) -> Result<Vec<Vec<T>>> {
    config.validate()?;
    check_shock(system, h1)?;
    let n = system.n();
    let e0 = system.equity0();
    let max_steps = config.max_steps_for(n);
    let eps = T::lit(T::DEFAULT_EPS);
    let floor = |e: T, i: usize| {
        let e = e.max(T::zero());
        if e <= eps * e0[i] {
            T::zero()
        } else {
            e
        }
    };
    let e1: Vec<T> = (0..n)
        .map(|i| {
            let h = h1[i].max(T::zero()).min(T::one());
            floor(e0[i] - e0[i] * h, i)
        })
        .collect();
    let mut path = vec![e0.to_vec(), e1];
    let mut active = ActiveSet::all(n);
    let mut reduced: DenseMatrix<T> = reduce_leverage(&system.leverage().lambda_tilde, &active);
    loop {
        let t = path.len() - 1;
        let (cur, prev) = (&path[t], &path[t - 1]);
        let rel_change = (0..n).fold(T::zero(), |m, i| m.max((cur[i] - prev[i]).abs() / e0[i]));
        if rel_change < config.tol || t >= max_steps {
            break;
        }
        // Λ̃(t) is reduced by 𝒜(t-1) = { j : E_j(t-1) > 0 }.
        let active_prev = ActiveSet::from_mask(prev.iter().map(|&e| e > T::zero()).collect());
        if active_prev != active {
            active = active_prev;
            reduced = reduce_leverage(&system.leverage().lambda_tilde, &active);
        }
        let delta: Vec<T> = cur.iter().zip(prev).map(|(&a, &b)| a - b).collect();
        let flow = reduced.matvec(&delta);
        let next: Vec<T> = (0..n).map(|i| floor(cur[i] + flow[i], i)).collect();
        path.push(next);
    }
    Ok(path)
}

/// Converts an equity path into relative losses `h(t) = (E(0) - E(t)) / E(0)`.
pub fn losses_from_equity<T: Scalar>(path: &[Vec<T>], equity0: &[T]) -> Vec<Vec<T>> {
    path.iter()
        .map(|e| e.iter().zip(equity0).map(|(&ei, &e0)| (e0 - ei) / e0).collect())
        .collect()
}

/// Initial shock specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockSpec<T> {
    /// Devalue every bank's external assets by `alpha`.
    Uniform(T),
    /// Devalue only `bank`'s external assets.
    Single { bank: usize, alpha: T },
    /// Explicit `h(1)`, clipped into `[0, 1]`.
    Custom(Vec<T>),
}

/// `h1_i = min(1, α A^E_i / E_i(0))` for the shocked banks.
pub fn build_shock<T: Scalar>(shock: &ShockSpec<T>, system: &BankingSystem<T>) -> Result<Vec<T>> {
    let devalue = |alpha: T, i: usize| {
        let r = &system.records()[i];
        (alpha * r.external_assets / r.equity0).min(T::one())
    };
    let check_alpha = |alpha: T| {
        if alpha < T::zero() || !alpha.is_finite() {
            Err(Error::NegativeAlpha(alpha.as_f64()))
        } else {
            Ok(())
        }
    };
    let n = system.n();
    match shock {
        ShockSpec::Uniform(alpha) => {
            check_alpha(*alpha)?;
            Ok((0..n).map(|i| devalue(*alpha, i)).collect())
        }
        ShockSpec::Single { bank, alpha } => {
            if *bank >= n {
                return Err(Error::UnknownBank(format!("#{bank}")));
            }
            check_alpha(*alpha)?;
            let mut h1 = vec![T::zero(); n];
            h1[*bank] = devalue(*alpha, *bank);
            Ok(h1)
        }
        ShockSpec::Custom(v) => {
            if v.len() != n {
                return Err(Error::ShockLength {
                    expected: n,
                    actual: v.len(),
                });
            }
            if v.iter().any(|x| x.is_nan()) {
                return Err(Error::Config("custom shock contains NaN".into()));
            }
            Ok(v.iter().map(|&x| x.max(T::zero()).min(T::one())).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_system, BankRecord, ExposureMatrix};
    use approx::assert_abs_diff_eq;

    fn system_from_lambda(lambda: &[Vec<f64>], equity: &[f64]) -> BankingSystem<f64> {
        let n = equity.len();
        let a = DenseMatrix::from_fn(n, |i, j| lambda[i][j] * equity[i]);
        let records = equity
            .iter()
            .enumerate()
            .map(|(i, &e)| BankRecord::new(format!("b{i}"), "", e, 10.0 * e, 0.0, 0.0, 0.0, None).unwrap())
            .collect();
        build_system(records, ExposureMatrix::new(a)).unwrap()
    }

    fn chain() -> BankingSystem<f64> {
        system_from_lambda(
            &[vec![0.0, 0.5, 0.0], vec![0.0, 0.0, 0.4], vec![0.0; 3]],
            &[1.0, 1.0, 1.0],
        )
    }

    #[test]
    fn zero_increment_is_a_fixed_point() {
        let sys = chain();
        let mut state = ContagionState::after_shock(&[0.0, 0.0, 0.0]);
        state.t = 4;
        let next = step_generalized(&state, &sys);
        assert_eq!(next.t, 5);
        assert_eq!(next.h, state.h);
    }

    #[test]
    fn chain_step_by_hand() {
        let sys = chain();
        let s1 = ContagionState::after_shock(&[0.0, 0.0, 0.1]);
        let s2 = step_generalized(&s1, &sys);
        assert_abs_diff_eq!(s2.h[0], 0.0);
        assert_abs_diff_eq!(s2.h[1], 0.04, epsilon = 1e-15);
        assert_abs_diff_eq!(s2.h[2], 0.1);
    }

    #[test]
    fn mutual_step_clips_and_defaults() {
        let sys = system_from_lambda(&[vec![0.0, 0.5], vec![0.5, 0.0]], &[1.0, 1.0]);
        let s1 = ContagionState::after_shock(&[0.9, 0.9]);
        let s2 = step_generalized(&s1, &sys);
        assert_eq!(s2.h, vec![1.0, 1.0]);
        let res = run_contagion(&sys, &[0.9, 0.9], &RunConfig::default()).unwrap();
        assert_eq!(res.defaults.len(), 2);
        assert!(res.defaults.iter().all(|d| d.step == 2));
    }

    #[test]
    fn zero_shock_converges_immediately() {
        let sys = chain();
        let res = run_contagion(&sys, &[0.0; 3], &RunConfig::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.steps, 1);
        assert_eq!(res.h_final, vec![0.0; 3]);
        let res = run_original_debtrank(&sys, &[0.0; 3], &RunConfig::default()).unwrap();
        assert_eq!(res.h_final, vec![0.0; 3]);
    }

    #[test]
    fn two_bank_fixed_point() {
        let sys = system_from_lambda(&[vec![0.0, 0.5], vec![0.2, 0.0]], &[10.0, 20.0]);
        let cfg = RunConfig {
            tol: 1e-12,
            ..RunConfig::default()
        };
        let res = run_contagion(&sys, &[0.1, 0.025], &cfg).unwrap();
        assert!(res.converged);
        assert_abs_diff_eq!(res.h_final[0], 0.125, epsilon = 1e-11);
        assert_abs_diff_eq!(res.h_final[1], 0.05, epsilon = 1e-11);

        let path = simulate_equity(&sys, &[0.1, 0.025], &cfg).unwrap();
        let last = path.last().unwrap();
        assert_abs_diff_eq!(last[0], 8.75, epsilon = 1e-9);
        assert_abs_diff_eq!(last[1], 19.0, epsilon = 1e-9);
    }

    #[test]
    fn unstable_pair_defaults() {
        let sys = system_from_lambda(&[vec![0.0, 1.5], vec![1.5, 0.0]], &[1.0, 1.0]);
        let res = run_contagion(&sys, &[1e-4, 0.0], &RunConfig::default()).unwrap();
        assert!(!res.defaults.is_empty());
        assert!(res.converged);
    }

    #[test]
    fn original_debtrank_examples() {
        let cfg = RunConfig::default();
        let res = run_original_debtrank(&chain(), &[0.0, 0.0, 0.1], &cfg).unwrap();
        assert_abs_diff_eq!(res.h_final[0], 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(res.h_final[1], 0.04, epsilon = 1e-15);
        assert_abs_diff_eq!(res.h_final[2], 0.1);
        let gen = run_contagion(&chain(), &[0.0, 0.0, 0.1], &cfg).unwrap();
        for (a, b) in res.h_final.iter().zip(&gen.h_final) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }

        let mutual = system_from_lambda(&[vec![0.0, 0.5], vec![0.5, 0.0]], &[1.0, 1.0]);
        let orig = run_original_debtrank(&mutual, &[0.1, 0.0], &cfg).unwrap();
        assert_abs_diff_eq!(orig.h_final[0], 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(orig.h_final[1], 0.05, epsilon = 1e-15);
        assert!(orig.converged);
        let gen = run_contagion(&mutual, &[0.1, 0.0], &cfg).unwrap();
        assert_abs_diff_eq!(gen.h_final[0], 0.4 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(gen.h_final[1], 0.2 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn weights_are_capped_at_one() {
        let sys = system_from_lambda(&[vec![0.0, 3.0], vec![0.0, 0.0]], &[1.0, 1.0]);
        let orig = run_original_debtrank(&sys, &[0.0, 0.2], &RunConfig::default()).unwrap();
        assert_abs_diff_eq!(orig.h_final[0], 0.2);
        let gen = run_contagion(&sys, &[0.0, 0.2], &RunConfig::default()).unwrap();
        assert_abs_diff_eq!(gen.h_final[0], 0.6, epsilon = 1e-15);
    }

    #[test]
    fn isolated_bank_equity_is_frozen() {
        let sys = system_from_lambda(&[vec![0.0]], &[5.0]);
        let path = simulate_equity(&sys, &[0.3], &RunConfig::default()).unwrap();
        assert_eq!(path[0], vec![5.0]);
        for e in &path[1..] {
            assert_abs_diff_eq!(e[0], 3.5, epsilon = 1e-15);
        }
        let path = simulate_equity(&sys, &[0.0], &RunConfig::default()).unwrap();
        assert!(path.iter().all(|e| e == &vec![5.0]));
    }

    #[test]
    fn step_cap_reports_not_converged() {
        let sys = system_from_lambda(&[vec![0.0, 0.99], vec![0.99, 0.0]], &[1.0, 1.0]);
        let cfg = RunConfig {
            max_steps: Some(5),
            ..RunConfig::default()
        };
        let res = run_contagion(&sys, &[1e-3, 0.0], &cfg).unwrap();
        assert!(!res.converged);
        assert_eq!(res.steps, 5);
        assert_eq!(res.trajectory.len(), 5);
    }

    #[test]
    fn config_and_shock_validation() {
        let sys = chain();
        let bad = RunConfig {
            tol: 0.0,
            ..RunConfig::default()
        };
        assert!(run_contagion(&sys, &[0.0; 3], &bad).is_err());
        assert!(matches!(
            run_contagion(&sys, &[0.0; 2], &RunConfig::default()),
            Err(Error::ShockLength { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn shock_construction() {
        let rec = |id: &str, e: f64, ae: f64| BankRecord::new(id, id, e, ae, 0.0, 0.0, 0.0, None).unwrap();
        let sys = build_system(
            vec![rec("a", 10.0, 100.0), rec("b", 10.0, 50.0)],
            ExposureMatrix::zeros(2),
        )
        .unwrap();
        assert_eq!(build_shock(&ShockSpec::Uniform(0.0), &sys).unwrap(), vec![0.0, 0.0]);
        let h = build_shock(&ShockSpec::Uniform(0.01), &sys).unwrap();
        assert_abs_diff_eq!(h[0], 0.1, epsilon = 1e-15);
        assert_eq!(build_shock(&ShockSpec::Uniform(0.2), &sys).unwrap()[0], 1.0);
        let h = build_shock(&ShockSpec::Single { bank: 1, alpha: 0.1 }, &sys).unwrap();
        assert_eq!(h[0], 0.0);
        assert_abs_diff_eq!(h[1], 0.5, epsilon = 1e-15);
        assert!(matches!(
            build_shock(&ShockSpec::Single { bank: 2, alpha: 0.1 }, &sys),
            Err(Error::UnknownBank(_))
        ));
        assert!(matches!(
            build_shock(&ShockSpec::Uniform(-0.1), &sys),
            Err(Error::NegativeAlpha(_))
        ));
        assert_eq!(
            build_shock(&ShockSpec::Custom(vec![-1.0, 2.0]), &sys).unwrap(),
            vec![0.0, 1.0]
        );
    }
}
