//! Seeded synthetic banking data for experiments and tests.
//!
//! Real balance-sheet panels are proprietary; these generators produce inputs with
//! the same shape: heterogeneous bank sizes, thin equity, and interbank totals that
//! are a fraction of total assets.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::matrix::DenseMatrix;
use crate::model::{build_system, BankRecord, BankingSystem, ExposureMatrix};
use crate::spectral::{spectral_radius, DEFAULT_MAX_ITER, DEFAULT_TOL};

/// Shape of a synthetic balance-sheet panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelParams {
    /// Log-scale spread of total assets.
    pub size_sigma: f64,
    /// Range of equity / total assets.
    pub equity_ratio: (f64, f64),
    /// Range of interbank assets / total assets.
    pub interbank_share: (f64, f64),
    /// Log-scale spread of the interbank liability total around the asset total.
    pub liability_sigma: f64,
}

impl Default for PanelParams {
    fn default() -> Self {
        Self {
            size_sigma: 0.4,
            equity_ratio: (0.04, 0.10),
            interbank_share: (0.08, 0.15),
            liability_sigma: 0.25,
        }
    }
}

/// `n` banks with ids `B000`, `B001`, ...
pub fn balance_panel(n: usize, params: &PanelParams, seed: u64) -> Vec<BankRecord<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = LogNormal::new(0.0, params.size_sigma).expect("valid sigma");
    let liab = LogNormal::new(0.0, params.liability_sigma).expect("valid sigma");
    let width = (n.max(1) - 1).to_string().len().max(3);
    (0..n)
        .map(|i| {
            let total = 1000.0 * size.sample(&mut rng);
            let equity = total * rng.random_range(params.equity_ratio.0..=params.equity_ratio.1);
            let interbank = total * rng.random_range(params.interbank_share.0..=params.interbank_share.1);
            let external = total - interbank;
            let interbank_liab = interbank * liab.sample(&mut rng);
            let external_liab = (total - equity - interbank_liab).max(0.0);
            BankRecord::new(
                format!("B{i:0width$}"),
                format!("Synthetic bank {i}"),
                equity,
                external,
                external_liab,
                interbank,
                interbank_liab,
                None,
            )
            .expect("synthetic record is valid")
        })
        .collect()
}

/// Random system of `n` banks whose leverage matrix has spectral radius `radius`.
///
/// Links appear with probability `link_prob`; if the draw has no cycle the radius is 0
/// regardless of scaling and a ring is added first.
pub fn random_system<R: Rng>(n: usize, radius: f64, link_prob: f64, rng: &mut R) -> BankingSystem<f64> {
    let equity: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..10.0)).collect();
    let mut a = DenseMatrix::from_fn(n, |i, j| {
        if i != j && rng.random_bool(link_prob) {
            rng.random_range(0.1..1.0)
        } else {
            0.0
        }
    });
    let lambda = |a: &DenseMatrix<f64>| DenseMatrix::from_fn(n, |i, j| a[(i, j)] / equity[i]);
    let mut rho = spectral_radius(&lambda(&a), DEFAULT_TOL, DEFAULT_MAX_ITER).spectral_radius;
    if rho < 1e-9 && n >= 2 {
        for i in 0..n {
            let j = (i + 1) % n;
            a[(i, j)] += rng.random_range(0.1..1.0);
        }
        rho = spectral_radius(&lambda(&a), DEFAULT_TOL, DEFAULT_MAX_ITER).spectral_radius;
    }
    let scale = if rho > 0.0 { radius / rho } else { 1.0 };
    let a = DenseMatrix::from_fn(n, |i, j| a[(i, j)] * scale);
    system_from_exposures(a, equity, rng)
}

/// Random directed tree: each non-root node gets one edge to an earlier node, oriented
/// at random, with leverage entries in `(0, max_leverage]`.
pub fn random_tree<R: Rng>(n: usize, max_leverage: f64, rng: &mut R) -> BankingSystem<f64> {
    let equity: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..10.0)).collect();
    let mut a = DenseMatrix::zeros(n);
    for child in 1..n {
        let parent = rng.random_range(0..child);
        let (lender, borrower) = if rng.random_bool(0.5) {
            (child, parent)
        } else {
            (parent, child)
        };
        let lev = rng.random_range(0.05..=max_leverage);
        a[(lender, borrower)] = lev * equity[lender];
    }
    system_from_exposures(a, equity, rng)
}

fn system_from_exposures<R: Rng>(a: DenseMatrix<f64>, equity: Vec<f64>, rng: &mut R) -> BankingSystem<f64> {
    let n = equity.len();
    let assets = a.row_sums();
    let liabilities = a.col_sums();
    let records = (0..n)
        .map(|i| {
            let external = equity[i] * rng.random_range(5.0..20.0);
            BankRecord::new(
                format!("R{i}"),
                format!("Random bank {i}"),
                equity[i],
                external,
                (external + assets[i] - liabilities[i] - equity[i]).max(0.0),
                assets[i],
                liabilities[i],
                None,
            )
            .expect("random record is valid")
        })
        .collect();
    build_system(records, ExposureMatrix::new(a)).expect("random system is valid")
}
