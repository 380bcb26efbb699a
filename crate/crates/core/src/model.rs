//! Balance sheets, the interbank exposure matrix and the leverage matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Relative tolerance for the `total_assets` consistency check.
const TOTAL_ASSETS_RTOL: f64 = 1e-6;

/// Aggregate balance sheet of one bank at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankRecord<T> {
    pub id: String,
    pub name: String,
    /// Initial equity `E_i(0)`.
    pub equity0: T,
    pub external_assets: T,
    pub external_liabilities: T,
    /// Total interbank lending.
    pub interbank_assets_total: T,
    /// Total interbank borrowing.
    pub interbank_liabilities_total: T,
    pub total_assets: T,
}

impl<T: Scalar> BankRecord<T> {
    /// Builds a record, deriving `total_assets` when it is not given and checking it
    /// against `external_assets + interbank_assets_total` when it is.
    ///
    /// Equity is not checked here; `build_system` refuses non-positive equity.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        equity0: T,
        external_assets: T,
        external_liabilities: T,
        interbank_assets_total: T,
        interbank_liabilities_total: T,
        total_assets: Option<T>,
    ) -> Result<Self> {
        let id = id.into();
        let derived = external_assets + interbank_assets_total;
        let invalid = |reason: String| Error::InvalidRecord {
            bank: id.clone(),
            reason,
        };
        for (field, v) in [
            ("external_assets", external_assets),
            ("external_liabilities", external_liabilities),
            ("interbank_assets", interbank_assets_total),
            ("interbank_liabilities", interbank_liabilities_total),
        ] {
            if !v.is_finite() || v < T::zero() {
                return Err(invalid(format!("{field} must be finite and >= 0, got {v}")));
            }
        }
        if !equity0.is_finite() {
            return Err(invalid("equity must be finite".into()));
        }
        let total_assets = match total_assets {
            Some(ta) => {
                if !ta.is_finite() || ta < T::zero() {
                    return Err(invalid(format!("total_assets must be finite and >= 0, got {ta}")));
                }
                let scale = ta.abs().max(derived.abs());
                if scale > T::zero() && (ta - derived).abs() > T::lit(TOTAL_ASSETS_RTOL) * scale {
                    return Err(invalid(format!(
                        "total_assets {ta} differs from external + interbank assets {derived}"
                    )));
                }
                ta
            }
            None => derived,
        };
        Ok(Self {
            id,
            name: name.into(),
            equity0,
            external_assets,
            external_liabilities,
            interbank_assets_total,
            interbank_liabilities_total,
            total_assets,
        })
    }
}

/// Interbank exposures: entry `(i, j)` is the loan from lender `i` to borrower `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureMatrix<T> {
    a: DenseMatrix<T>,
}

impl<T: Scalar> ExposureMatrix<T> {
    /// Wraps a dense matrix. Validation happens in [`build_system`].
    pub fn new(a: DenseMatrix<T>) -> Self {
        Self { a }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(DenseMatrix::zeros(n))
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.a
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.a
    }

    /// Checks zero diagonal and nonnegative finite entries.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                let v = self.a[(i, j)];
                if !v.is_finite() || v < T::zero() {
                    return Err(Error::NegativeExposure(i, j));
                }
                if i == j && v != T::zero() {
                    return Err(Error::SelfLoop(i));
                }
            }
        }
        Ok(())
    }

    /// Nonzero entries as `(lender, borrower, exposure)`, row-major.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            (0..n).filter_map(move |j| {
                let v = self.a[(i, j)];
                (v != T::zero()).then_some((i, j, v))
            })
        })
    }
}

/// `lambda[i][j] = A_ij / E_i(0)` and `lambda_tilde[i][j] = A_ij / E_j(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeverageMatrices<T> {
    pub lambda: DenseMatrix<T>,
    pub lambda_tilde: DenseMatrix<T>,
}

impl<T: Scalar> LeverageMatrices<T> {
    pub fn from_exposures(exposures: &ExposureMatrix<T>, equity0: &[T]) -> Self {
        let a = exposures.matrix();
        let n = a.n();
        Self {
            lambda: DenseMatrix::from_fn(n, |i, j| a[(i, j)] / equity0[i]),
            lambda_tilde: DenseMatrix::from_fn(n, |i, j| a[(i, j)] / equity0[j]),
        }
    }

    /// `Λ` restricted to the active banks.
    pub fn reduced(&self, active: &ActiveSet) -> DenseMatrix<T> {
        reduce_leverage(&self.lambda, active)
    }
}

/// Banks that have not defaulted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActiveSet {
    mask: Vec<bool>,
}

impl ActiveSet {
    pub fn all(n: usize) -> Self {
        Self { mask: vec![true; n] }
    }

    pub fn none(n: usize) -> Self {
        Self { mask: vec![false; n] }
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::none(n);
        for i in indices {
            set.mask[i] = true;
        }
        set
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    /// Size of the universe, not the number of active banks.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&a| a).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter_map(|(i, &a)| a.then_some(i))
    }

    pub fn is_subset(&self, other: &ActiveSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn remove(&mut self, i: usize) {
        self.mask[i] = false;
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// `{ j : h_j < 1 }`.
pub fn active_set<T: Scalar>(h: &[T]) -> ActiveSet {
    ActiveSet::from_mask(h.iter().map(|&v| v < T::one()).collect())
}

/// Zeroes the rows and columns of every inactive bank.
pub fn reduce_leverage<T: Scalar>(m: &DenseMatrix<T>, active: &ActiveSet) -> DenseMatrix<T> {
    DenseMatrix::from_fn(m.n(), |i, j| {
        if active.contains(i) && active.contains(j) {
            m[(i, j)]
        } else {
            T::zero()
        }
    })
}

/// N banks with their exposures and leverage. Immutable once built.
#[derive(Debug, Clone)]
pub struct BankingSystem<T> {
    records: Vec<BankRecord<T>>,
    exposures: ExposureMatrix<T>,
    leverage: LeverageMatrices<T>,
    equity0: Vec<T>,
    // For each borrower j: (lender i, Λ_ij) over the nonzero entries of column j.
    lenders: Vec<Vec<(usize, T)>>,
}

/// Validates the inputs and derives both leverage matrices.
pub fn build_system<T: Scalar>(records: Vec<BankRecord<T>>, exposures: ExposureMatrix<T>) -> Result<BankingSystem<T>> {
    if records.is_empty() {
        return Err(Error::EmptySystem);
    }
    if exposures.n() != records.len() {
        return Err(Error::DimensionMismatch {
            expected: records.len(),
            actual: exposures.n(),
        });
    }
    if let Some(r) = records
        .iter()
        .find(|r| !r.equity0.is_positive() || !r.equity0.is_finite())
    {
        return Err(Error::NonPositiveEquity(r.id.clone()));
    }
    exposures.validate()?;

    let equity0: Vec<T> = records.iter().map(|r| r.equity0).collect();
    let leverage = LeverageMatrices::from_exposures(&exposures, &equity0);
    let n = records.len();
    let mut lenders = vec![Vec::new(); n];
    for i in 0..n {
        for (j, &v) in leverage.lambda.row(i).iter().enumerate() {
            if v != T::zero() {
                lenders[j].push((i, v));
            }
        }
    }
    Ok(BankingSystem {
        records,
        exposures,
        leverage,
        equity0,
        lenders,
    })
}

impl<T: Scalar> BankingSystem<T> {
    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn records(&self) -> &[BankRecord<T>] {
        &self.records
    }

    pub fn exposures(&self) -> &ExposureMatrix<T> {
        &self.exposures
    }

    pub fn leverage(&self) -> &LeverageMatrices<T> {
        &self.leverage
    }

    /// `Λ`.
    pub fn lambda(&self) -> &DenseMatrix<T> {
        &self.leverage.lambda
    }

    pub fn equity0(&self) -> &[T] {
        &self.equity0
    }

    pub fn total_equity0(&self) -> T {
        self.equity0.iter().copied().sum()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.records.iter().position(|r| r.id == id)
    }

    /// Nonzero `(lender, Λ_lender,borrower)` pairs for one borrower, lenders ascending.
    pub(crate) fn lenders_of(&self, borrower: usize) -> &[(usize, T)] {
        &self.lenders[borrower]
    }

    /// Same balance sheets with a different exposure matrix.
    pub fn with_exposures(&self, exposures: ExposureMatrix<T>) -> Result<Self> {
        build_system(self.records.clone(), exposures)
    }
}
