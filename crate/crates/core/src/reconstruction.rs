//! Reconstruction of exposure matrices from interbank totals.
//!
//! Pipeline: rescale liabilities so both aggregate totals agree, compute directed
//! fitnesses, calibrate `z` so the expected density hits the target, then per sample
//! draw a topology from `p_ij = z x_i^out x_j^in / (1 + z x_i^out x_j^in)` and fill in
//! weights with RAS.
//!
//! Random streams: sample `k` uses `ChaCha8Rng::seed_from_u64(seed)` with stream `k`.
//! Each topology draw consumes one standard `f64` uniform per off-diagonal pair in
//! row-major order; redraws of a slot continue on the same stream. Outputs therefore do
//! not depend on how samples are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, MarginSide, Result};
use crate::matrix::DenseMatrix;
use crate::model::{build_system, BankRecord, BankingSystem, ExposureMatrix};
use crate::scalar::Scalar;

/// Draw attempts per ensemble slot before giving up.
pub const MAX_REDRAWS: usize = 100;

/// Guards relative margin residuals against zero margins.
const MARGIN_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionConfig<T> {
    pub target_density: T,
    pub ensemble_size: usize,
    pub ras_tol: T,
    pub ras_max_iter: usize,
    pub seed: u64,
    /// Starting bracket for the bisection on `z`; the upper end is doubled until it
    /// brackets the target.
    pub z_bracket: (T, T),
}

impl<T: Scalar> Default for ReconstructionConfig<T> {
    fn default() -> Self {
        Self {
            target_density: T::lit(0.05),
            ensemble_size: 100,
            ras_tol: T::lit(1e-8),
            ras_max_iter: 10_000,
            seed: 0,
            z_bracket: (T::zero(), T::one()),
        }
    }
}

impl<T: Scalar> ReconstructionConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_density > T::zero() && self.target_density <= T::one()) {
            return Err(Error::Config(format!(
                "target density must lie in (0, 1], got {}",
                self.target_density
            )));
        }
        if self.ensemble_size == 0 {
            return Err(Error::Config("ensemble size must be >= 1".into()));
        }
        if !self.ras_tol.is_positive() || self.ras_max_iter == 0 {
            return Err(Error::Config("RAS tolerance and iteration cap must be positive".into()));
        }
        let (lo, hi) = self.z_bracket;
        if !(lo >= T::zero() && hi > lo && hi.is_finite()) {
            return Err(Error::Config(format!("invalid z bracket ({lo}, {hi})")));
        }
        Ok(())
    }
}

/// Normalized interbank totals: `x_out ∝ Ã`, `x_in ∝ L̃`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessVectors<T> {
    pub x_out: Vec<T>,
    pub x_in: Vec<T>,
}

impl<T: Scalar> FitnessVectors<T> {
    pub fn from_records(records: &[BankRecord<T>]) -> Result<Self> {
        let assets: Vec<T> = records.iter().map(|r| r.interbank_assets_total).collect();
        let liabilities: Vec<T> = records.iter().map(|r| r.interbank_liabilities_total).collect();
        Ok(Self {
            x_out: normalize(&assets, MarginSide::Assets)?,
            x_in: normalize(&liabilities, MarginSide::Liabilities)?,
        })
    }

    pub fn n(&self) -> usize {
        self.x_out.len()
    }
}

fn normalize<T: Scalar>(v: &[T], side: MarginSide) -> Result<Vec<T>> {
    let total: T = v.iter().copied().sum();
    if !total.is_positive() {
        return Err(Error::ZeroTotal(side));
    }
    Ok(v.iter().map(|&x| x / total).collect())
}

/// Scales every `L̃_i` by `ΣÃ / ΣL̃` so both aggregates agree.
pub fn rescale_liabilities<T: Scalar>(records: &[BankRecord<T>]) -> Result<Vec<BankRecord<T>>> {
    let assets: T = records.iter().map(|r| r.interbank_assets_total).sum();
    let liabilities: T = records.iter().map(|r| r.interbank_liabilities_total).sum();
    if !assets.is_positive() {
        return Err(Error::ZeroTotal(MarginSide::Assets));
    }
    if !liabilities.is_positive() {
        return Err(Error::ZeroTotal(MarginSide::Liabilities));
    }
    if assets == liabilities {
        return Ok(records.to_vec());
    }
    let ratio = assets / liabilities;
    Ok(records
        .iter()
        .map(|r| BankRecord {
            interbank_liabilities_total: r.interbank_liabilities_total * ratio,
            ..r.clone()
        })
        .collect())
}

/// Fitness-model link probabilities, zero on the diagonal.
pub fn link_probabilities<T: Scalar>(f: &FitnessVectors<T>, z: T) -> Result<DenseMatrix<T>> {
    if z < T::zero() || z.is_nan() {
        return Err(Error::NegativeZ(z.as_f64()));
    }
    Ok(DenseMatrix::from_fn(f.n(), |i, j| {
        if i == j {
            T::zero()
        } else {
            link_probability(z, f.x_out[i], f.x_in[j])
        }
    }))
}

fn link_probability<T: Scalar>(z: T, x_out: T, x_in: T) -> T {
    let w = z * x_out * x_in;
    if w.is_infinite() {
        T::one()
    } else {
        w / (T::one() + w)
    }
}

fn expected_links<T: Scalar>(f: &FitnessVectors<T>, z: T) -> T {
    let n = f.n();
    let mut total = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total = total + link_probability(z, f.x_out[i], f.x_in[j]);
            }
        }
    }
    total
}

/// Finds `z` with `Σ_{i≠j} p_ij(z) = target_density · N (N − 1)` by bisection.
pub fn calibrate_z<T: Scalar>(f: &FitnessVectors<T>, target_density: T) -> Result<T> {
    calibrate_z_from(f, target_density, (T::zero(), T::one()))
}

/// [`calibrate_z`] with an explicit starting bracket.
pub fn calibrate_z_from<T: Scalar>(f: &FitnessVectors<T>, target_density: T, bracket: (T, T)) -> Result<T> {
    let n = f.n();
    if !(target_density > T::zero() && target_density <= T::one()) {
        return Err(Error::Config(format!(
            "target density must lie in (0, 1], got {target_density}"
        )));
    }
    let pairs = n * n.saturating_sub(1);
    let required = target_density * T::from_count(pairs);
    let max_links = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && f.x_out[i] * f.x_in[j] > T::zero())
        .count();
    // p < 1 for finite z, so the supremum max_links itself is never attained.
    if pairs == 0 || required >= T::from_count(max_links) {
        return Err(Error::Unachievable {
            target: target_density.as_f64(),
            max_links,
            required: required.as_f64(),
        });
    }
    let (mut lo, mut hi) = bracket;
    while expected_links(f, lo) > required && lo > T::zero() {
        hi = lo;
        lo = lo / T::lit(2.0);
        if lo < T::min_positive_value() {
            lo = T::zero();
        }
    }
    while expected_links(f, hi) < required {
        lo = hi;
        hi = hi * T::lit(2.0);
        if !hi.is_finite() {
            return Err(Error::Unachievable {
                target: target_density.as_f64(),
                max_links,
                required: required.as_f64(),
            });
        }
    }
    let rel = T::lit(1e-10);
    for _ in 0..400 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let links = expected_links(f, mid);
        if links < required {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= T::epsilon() * T::lit(4.0) * hi {
            break;
        }
    }
    let z = lo + (hi - lo) / T::lit(2.0);
    let miss = (expected_links(f, z) - required).abs();
    debug_assert!(miss <= rel * required.max(T::one()), "density miss {miss}");
    Ok(z)
}

/// Binary directed adjacency without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjacency {
    n: usize,
    links: Vec<bool>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            links: vec![false; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = Self::empty(n);
        for (i, j) in edges {
            if i != j {
                adj.links[i * n + j] = true;
            }
        }
        adj
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.links[i * self.n + j]
    }

    pub fn link_count(&self) -> usize {
        self.links.iter().filter(|&&l| l).count()
    }

    /// Links over possible links `N (N − 1)`.
    pub fn density(&self) -> f64 {
        let pairs = self.n * self.n.saturating_sub(1);
        if pairs == 0 {
            0.0
        } else {
            self.link_count() as f64 / pairs as f64
        }
    }

    pub fn out_degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.has(i, j)).count()
    }

    pub fn in_degree(&self, j: usize) -> usize {
        (0..self.n).filter(|&i| self.has(i, j)).count()
    }
}

/// Draws each off-diagonal link independently with probability `p_ij`.
pub fn sample_topology<T: Scalar, R: Rng + ?Sized>(p: &DenseMatrix<T>, rng: &mut R) -> Adjacency {
    let n = p.n();
    let mut adj = Adjacency::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let u: f64 = rng.random();
            if u < p[(i, j)].as_f64() {
                adj.links[i * n + j] = true;
            }
        }
    }
    adj
}

/// Output of [`ras_balance`].
#[derive(Debug, Clone, PartialEq)]
pub struct Balanced<T> {
    pub exposures: ExposureMatrix<T>,
    /// Row-then-column sweeps performed.
    pub sweeps: usize,
    /// Largest relative margin residual at exit.
    pub residual: T,
}

/// Fits unit weights on `adjacency` to row sums `row_margins` and column sums
/// `col_margins` by alternate row and column scaling.
pub fn ras_balance<T: Scalar>(
    adjacency: &Adjacency,
    row_margins: &[T],
    col_margins: &[T],
    tol: T,
    max_iter: usize,
) -> Result<Balanced<T>> {
    let n = adjacency.n();
    if row_margins.len() != n || col_margins.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: row_margins.len().min(col_margins.len()),
        });
    }
    if let Some(i) = (0..n).find(|&i| row_margins[i] > T::zero() && adjacency.out_degree(i) == 0) {
        return Err(Error::UnsupportedMargin {
            bank: i,
            side: MarginSide::Assets,
        });
    }
    if let Some(j) = (0..n).find(|&j| col_margins[j] > T::zero() && adjacency.in_degree(j) == 0) {
        return Err(Error::UnsupportedMargin {
            bank: j,
            side: MarginSide::Liabilities,
        });
    }

    let mut a = DenseMatrix::from_fn(n, |i, j| if adjacency.has(i, j) { T::one() } else { T::zero() });
    let mut sweeps = 0;
    loop {
        let residual = margin_residual(&a, row_margins, col_margins);
        if residual <= tol {
            return Ok(Balanced {
                exposures: ExposureMatrix::new(a),
                sweeps,
                residual,
            });
        }
        if sweeps >= max_iter {
            return Err(Error::RasNotConverged {
                iterations: sweeps,
                residual: residual.as_f64(),
            });
        }
        sweeps += 1;
        for (i, sum) in a.row_sums().into_iter().enumerate() {
            let target = row_margins[i];
            if sum > T::zero() {
                let f = target / sum;
                a.row_mut(i).iter_mut().for_each(|v| *v = *v * f);
            } else if target > T::zero() {
                return Err(Error::UnsupportedMargin {
                    bank: i,
                    side: MarginSide::Assets,
                });
            }
        }
        let col_sums = a.col_sums();
        let factors: Vec<T> = col_sums
            .iter()
            .zip(col_margins)
            .map(|(&s, &t)| if s > T::zero() { t / s } else { T::zero() })
            .collect();
        if let Some(j) = (0..n).find(|&j| !col_sums[j].is_positive() && col_margins[j] > T::zero()) {
            return Err(Error::UnsupportedMargin {
                bank: j,
                side: MarginSide::Liabilities,
            });
        }
        for i in 0..n {
            for (v, &f) in a.row_mut(i).iter_mut().zip(&factors) {
                *v = *v * f;
            }
        }
    }
}

/// `max |Σ_j A_ij − Ã_i| / max(Ã_i, ε)` over rows, and likewise for columns.
pub fn margin_residual<T: Scalar>(a: &DenseMatrix<T>, row_margins: &[T], col_margins: &[T]) -> T {
    let floor = T::lit(MARGIN_FLOOR);
    let rel = |s: T, t: T| (s - t).abs() / t.max(floor);
    let rows = a
        .row_sums()
        .into_iter()
        .zip(row_margins)
        .fold(T::zero(), |m, (s, &t)| m.max(rel(s, t)));
    let cols = a
        .col_sums()
        .into_iter()
        .zip(col_margins)
        .fold(T::zero(), |m, (s, &t)| m.max(rel(s, t)));
    rows.max(cols)
}

/// Per-sample bookkeeping of a reconstructed ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub index: usize,
    pub links: usize,
    pub realized_density: f64,
    /// Topology draws used, including rejected ones.
    pub draws: usize,
    pub ras_sweeps: usize,
    pub ras_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Ensemble<T> {
    pub z: T,
    /// Records after liability rescaling; shared by every sample.
    pub records: Vec<BankRecord<T>>,
    pub systems: Vec<BankingSystem<T>>,
    pub samples: Vec<SampleInfo>,
}

/// RNG for ensemble slot `index`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs the full reconstruction pipeline. Samples are built in parallel on the current
/// rayon pool; results are identical for any pool size.
pub fn reconstruct_ensemble<T: Scalar>(
    records: &[BankRecord<T>],
    config: &ReconstructionConfig<T>,
) -> Result<Ensemble<T>> {
    config.validate()?;
    let rescaled = rescale_liabilities(records)?;
    let fitness = FitnessVectors::from_records(&rescaled)?;
    let z = calibrate_z_from(&fitness, config.target_density, config.z_bracket)?;
    let p = link_probabilities(&fitness, z)?;
    let row_margins: Vec<T> = rescaled.iter().map(|r| r.interbank_assets_total).collect();
    let col_margins: Vec<T> = rescaled.iter().map(|r| r.interbank_liabilities_total).collect();

    let built: Vec<(BankingSystem<T>, SampleInfo)> = (0..config.ensemble_size)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(config.seed, index);
            for draw in 1..=MAX_REDRAWS {
                let adj = sample_topology(&p, &mut rng);
                match ras_balance(&adj, &row_margins, &col_margins, config.ras_tol, config.ras_max_iter) {
                    Ok(balanced) => {
                        let info = SampleInfo {
                            index,
                            links: adj.link_count(),
                            realized_density: adj.density(),
                            draws: draw,
                            ras_sweeps: balanced.sweeps,
                            ras_residual: balanced.residual.as_f64(),
                        };
                        let system = build_system(rescaled.clone(), balanced.exposures)?;
                        return Ok((system, info));
                    }
                    Err(Error::UnsupportedMargin { .. } | Error::RasNotConverged { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::ExhaustedRedraws {
                slot: index,
                attempts: MAX_REDRAWS,
            })
        })
        .collect::<Result<_>>()?;

    let (systems, samples) = built.into_iter().unzip();
    Ok(Ensemble {
        z,
        records: rescaled,
        systems,
        samples,
    })
}
