use std::fmt;

/// Which end of an interval a failure refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The left end (towards zero).
    Lower,
    /// The right end (towards infinity).
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Lower => f.write_str("lower"),
            Side::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("divergent-integral at the {side} end of ({s}, {t})")]
    DivergentIntegral { side: Side, s: f64, t: f64 },

    #[error("quadrature did not converge on ({s}, {t}): {reason}")]
    QuadratureFailure { s: f64, t: f64, reason: String },

    #[error("window-unsolvable at t = {t}: mass runs out at the {endpoint} endpoint")]
    WindowUnsolvable { t: f64, endpoint: Side },

    #[error("endpoint divergence condition not satisfied: {0}")]
    DivergenceConditionUnmet(String),

    #[error("derivative-required: {0} has no derivative and numeric differentiation is disabled")]
    DerivativeRequired(String),

    #[error("block-budget-exceeded: {needed} blocks needed, limit is {limit}")]
    BlockBudgetExceeded { needed: f64, limit: usize },

    #[error("unit weights required, got v0 = {v0}, v1 = {v1}")]
    NonUnitWeights { v0: String, v1: String },

    #[error("grid under-coverage: grid spans [{grid_lo}, {grid_hi}] but [{need_lo}, {need_hi}] is required")]
    GridUnderCoverage {
        grid_lo: f64,
        grid_hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    #[error("segment {index} rejected: min |f| on [{lo}, {hi}] is zero")]
    SegmentRejected { index: usize, lo: f64, hi: f64 },

    #[error("no-witness-segment: f vanishes on every probed segment")]
    NoWitnessSegment,

    #[error("empty test family")]
    EmptyFamily,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
