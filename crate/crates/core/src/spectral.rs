//! Spectral stability of the interbank leverage matrix.
//!
//! Losses are damped when the spectral radius of the (reduced) leverage matrix is
//! below one and amplified until defaults occur when it is above one. The radius
//! is found by power iteration from the all-ones vector. When that stalls
//! (periodic or nilpotent structure, e.g. DAG networks) the matrix is split into
//! strongly connected blocks and each irreducible block's spectrum comes from a dense
//! Schur decomposition.

use nalgebra::DMatrix;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::model::{ActiveSet, BankingSystem};
use crate::scalar::Scalar;

/// Consecutive non-improving power iterations before switching to the dense solver.
const STALL_LIMIT: usize = 50;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Stable,
    Unstable,
    Critical,
}

impl Classification {
    /// `CRITICAL` within `band` of 1, otherwise by which side of 1 `rho` falls.
    pub fn from_radius(rho: f64, band: f64) -> Self {
        if (rho - 1.0).abs() <= band {
            Classification::Critical
        } else if rho < 1.0 {
            Classification::Stable
        } else {
            Classification::Unstable
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMethod {
    PowerIteration,
    DenseEigen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport<T> {
    pub spectral_radius: T,
    pub classification: Classification,
    /// Power iterations performed (also when the dense fallback produced the value).
    pub iterations: usize,
    /// `‖M x − ρ x‖₁` for the power-iteration estimate (`‖x‖₁ = 1`), or the relative
    /// reconstruction error of the Schur factorization for the dense fallback.
    pub residual: T,
    /// False when neither route reached its tolerance; the radius is then the best estimate.
    pub converged: bool,
    pub method: RadiusMethod,
}

impl<T: Scalar> StabilityReport<T> {
    fn new(rho: T, iterations: usize, residual: T, converged: bool, method: RadiusMethod) -> Self {
        Self {
            spectral_radius: rho,
            classification: Classification::from_radius(rho.as_f64(), T::CRITICAL_BAND),
            iterations,
            residual,
            converged,
            method,
        }
    }
}

/// Spectral radius of a nonnegative square matrix.
///
/// Never fails: running out of iterations yields `converged = false` with the best estimate.
pub fn spectral_radius<T: Scalar>(m: &DenseMatrix<T>, tol: T, max_iter: usize) -> StabilityReport<T> {
    let n = m.n();
    if n == 0 {
        return StabilityReport::new(T::zero(), 0, T::zero(), true, RadiusMethod::PowerIteration);
    }
    let mut x = vec![T::one() / T::from_count(n); n];
    let mut best: Option<(T, T)> = None;
    let mut stalled = 0;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let y = m.matvec(&x);
        let rho: T = y.iter().copied().sum();
        if !rho.is_positive() {
            // M^k 1 = 0 for a nonnegative matrix means M is nilpotent.
            break;
        }
        let residual = y
            .iter()
            .zip(&x)
            .fold(T::zero(), |acc, (&yi, &xi)| acc + (yi - rho * xi).abs());
        if residual <= tol * rho {
            return StabilityReport::new(rho, iterations, residual, true, RadiusMethod::PowerIteration);
        }
        match best {
            Some((_, r)) if residual >= r => {
                stalled += 1;
                if stalled >= STALL_LIMIT {
                    break;
                }
            }
            _ => {
                best = Some((rho, residual));
                stalled = 0;
            }
        }
        x = y.into_iter().map(|v| v / rho).collect();
    }
    match dense_radius(m) {
        Some((rho, err)) => StabilityReport::new(T::lit(rho), iterations, T::lit(err), true, RadiusMethod::DenseEigen),
        None => {
            let (rho, residual) = best.unwrap_or((T::zero(), T::zero()));
            StabilityReport::new(rho, iterations, residual, false, RadiusMethod::PowerIteration)
        }
    }
}

/// Largest eigenvalue modulus and the worst relative Schur reconstruction error.
///
/// The spectrum of a nonnegative matrix is the union of the spectra of its strongly
/// connected blocks, so acyclic parts contribute exactly zero and only irreducible
/// blocks go through the dense Schur decomposition.
fn dense_radius<T: Scalar>(m: &DenseMatrix<T>) -> Option<(f64, f64)> {
    let n = m.n();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, m.count_nonzero());
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for (j, v) in m.row(i).iter().enumerate() {
            if *v != T::zero() {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut rho = 0.0f64;
    let mut worst = 0.0f64;
    for mut component in tarjan_scc(&graph) {
        let trivial = component.len() == 1 && {
            let i = component[0].index();
            m[(i, i)] == T::zero()
        };
        if trivial {
            continue;
        }
        component.sort_unstable();
        let idx: Vec<usize> = component.iter().map(|c| c.index()).collect();
        let k = idx.len();
        let block = DMatrix::<f64>::from_fn(k, k, |r, c| m[(idx[r], idx[c])].as_f64());
        let (block_rho, err) = schur_radius(block)?;
        rho = rho.max(block_rho);
        worst = worst.max(err);
    }
    Some((rho, worst))
}

fn schur_radius(a: DMatrix<f64>) -> Option<(f64, f64)> {
    let n = a.nrows();
    let norm = a.norm();
    if norm == 0.0 {
        return Some((0.0, 0.0));
    }
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 100 * n.max(10))?;
    let (q, t) = schur.clone().unpack();
    let err = (&q * &t * q.transpose() - &a).norm() / norm;
    let rho = schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    Some((rho, err))
}

/// Solves `(I − Λ) h = h1` by Gaussian elimination with partial pivoting.
///
/// Only meaningful as a prediction of the dynamics when `ρ(Λ) < 1` and no bank reaches
/// a full loss.
pub fn linear_fixed_point<T: Scalar>(lambda: &DenseMatrix<T>, h1: &[T]) -> Result<Vec<T>> {
    let n = lambda.n();
    if h1.len() != n {
        return Err(Error::ShockLength {
            expected: n,
            actual: h1.len(),
        });
    }
    let mut a = DenseMatrix::from_fn(n, |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        id - lambda[(i, j)]
    });
    let mut b = h1.to_vec();
    let scale = a.max_abs().max(T::one());
    let threshold = T::epsilon() * scale * T::from_count(n.max(1)) * T::lit(16.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| {
                a[(p, col)]
                    .abs()
                    .partial_cmp(&a[(q, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot range");
        if a[(pivot, col)].abs().partial_cmp(&threshold) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::SingularSystem);
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            b.swap(col, pivot);
        }
        let p = a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] / p;
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                a[(r, j)] = a[(r, j)] - f * a[(col, j)];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(b[i], |acc, j| acc - a[(i, j)] * x[j]);
        x[i] = s / a[(i, i)];
    }
    Ok(x)
}

/// Stability of the leverage matrix restricted to the banks still active.
pub fn stability_after_defaults<T: Scalar>(
    system: &BankingSystem<T>,
    active: &ActiveSet,
    tol: T,
    max_iter: usize,
) -> Result<StabilityReport<T>> {
    if active.universe() != system.n() {
        return Err(Error::DimensionMismatch {
            expected: system.n(),
            actual: active.universe(),
        });
    }
    Ok(spectral_radius(&system.leverage().reduced(active), tol, max_iter))
}
