use thiserror::Error;

/// Side of a bank's interbank balance sheet that a reconstructed link set must support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginSide {
    /// Interbank assets: needs at least one outgoing (lending) link.
    Assets,
    /// Interbank liabilities: needs at least one incoming (borrowing) link.
    Liabilities,
}

impl std::fmt::Display for MarginSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MarginSide::Assets => f.write_str("assets"),
            MarginSide::Liabilities => f.write_str("liabilities"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("bank {0} has non-positive initial equity")]
    NonPositiveEquity(String),
    #[error("negative exposure at ({0}, {1})")]
    NegativeExposure(usize, usize),
    #[error("self-loop exposure on bank {0}")]
    SelfLoop(usize),
    #[error("empty banking system")]
    EmptySystem,
    #[error("invalid balance sheet for bank {bank}: {reason}")]
    InvalidRecord { bank: String, reason: String },

    #[error("unknown bank {0}")]
    UnknownBank(String),
    #[error("negative shock amplitude {0}")]
    NegativeAlpha(f64),
    #[error("shock vector has length {actual}, expected {expected}")]
    ShockLength { expected: usize, actual: usize },

    #[error("I - Λ is numerically singular")]
    SingularSystem,

    #[error("aggregate interbank {0} is zero")]
    ZeroTotal(MarginSide),
    #[error("negative fitness parameter z = {0}")]
    NegativeZ(f64),
    #[error("target density {target} unachievable: at most {max_links} links possible of {required} required")]
    Unachievable {
        target: f64,
        max_links: usize,
        required: f64,
    },
    #[error("bank {bank} has positive interbank {side} but no link to carry them")]
    UnsupportedMargin { bank: usize, side: MarginSide },
    #[error("RAS did not converge after {iterations} iterations (residual {residual:e})")]
    RasNotConverged { iterations: usize, residual: f64 },
    #[error("ensemble slot {slot}: no feasible topology after {attempts} draws")]
    ExhaustedRedraws { slot: usize, attempts: usize },

    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse { line: u64, column: String, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NonPositiveEquity(_) => "non_positive_equity",
            Error::NegativeExposure(..) => "negative_exposure",
            Error::SelfLoop(_) => "self_loop",
            Error::EmptySystem => "empty_system",
            Error::InvalidRecord { .. } => "invalid_record",
            Error::UnknownBank(_) => "unknown_bank",
            Error::NegativeAlpha(_) => "negative_alpha",
            Error::ShockLength { .. } => "shock_length",
            Error::SingularSystem => "singular_system",
            Error::ZeroTotal(_) => "zero_total",
            Error::NegativeZ(_) => "negative_z",
            Error::Unachievable { .. } => "unachievable",
            Error::UnsupportedMargin { .. } => "unsupported_margin",
            Error::RasNotConverged { .. } => "ras_not_converged",
            Error::ExhaustedRedraws { .. } => "exhausted_redraws",
            Error::Parse { .. } => "parse_error",
            Error::Config(_) => "config_error",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }

    /// True for errors raised while validating a banking system.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::NonPositiveEquity(_)
                | Error::NegativeExposure(..)
                | Error::SelfLoop(_)
                | Error::EmptySystem
                | Error::InvalidRecord { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
