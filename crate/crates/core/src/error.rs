//! One error type for the whole crate.
//!
//! Construction, evaluation, transformation, and training all fail in ways the
//! caller may want to branch on (a singular cover is recoverable, a malformed
//! partition is a caller bug), so every failure carries a dedicated variant
//! rather than a stringly-typed message.

use crate::activation::ActivationKind;
use thiserror::Error;

/// Everything this crate can refuse to do, and why.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("empty interval: lower bound {lo} is not below upper bound {hi}")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("need at least two knots, got {0}")]
    TooFewKnots(usize),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("knots must be finite and strictly increasing (violated at index {index})")]
    KnotOrder { index: usize },

    #[error("sample value at x = {x} is not finite")]
    NonFiniteSample { x: f64 },

    #[error("input is not finite")]
    NonFiniteInput,

    #[error("parameter is not finite")]
    NonFiniteParam,

    #[error("inner slope k1 must be nonzero")]
    ZeroInnerSlope,

    #[error("{kind} units have no finite center")]
    NoCenter { kind: ActivationKind },

    #[error("cannot convert a unit into the {kind} family")]
    UnsupportedTarget { kind: ActivationKind },

    #[error("expected a {expected} unit, got {got}")]
    KindMismatch {
        expected: ActivationKind,
        got: ActivationKind,
    },

    #[error("unit has zero outer scale, so no center constraint can be matched")]
    DegenerateUnit,

    #[error("stage {stage} domain [{lo}, {hi}] does not cover the upstream output range [{need_lo}, {need_hi}]")]
    StageDomain {
        stage: usize,
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    #[error("grid extents must be nonempty positive integers")]
    BadExtents,

    #[error("grid samples incomplete: {missing} points of the declared grid are absent")]
    IncompleteGrid { missing: usize },

    #[error("sample key {detail} lies outside the declared grid")]
    GridMismatch { detail: String },

    #[error("linearizer collision: two grid points share the code {code}")]
    LinearizerCollision { code: f64 },

    #[error("network is malformed: {0}")]
    Network(String),

    #[error("expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("non-finite value produced by layer {layer}")]
    NonFinite { layer: usize },

    #[error("layer {layer} cannot be permuted; only a hidden activated layer with a dense or linear successor can")]
    NotPermutable { layer: usize },

    #[error("index permutation is not a bijection on the layer's units")]
    BadPermutation,

    #[error("layer {layer} has no unit {unit}")]
    UnitOutOfRange { layer: usize, unit: usize },

    #[error("split needs at least two parts")]
    SplitTooFew,

    #[error("only hard-linear units can be split; layer holds {kind} units")]
    UnsupportedSplit { kind: ActivationKind },

    #[error("cover assignment is invalid: {detail}")]
    BadCover { detail: String },

    #[error("cover incidence matrix is singular (rank {rank} of {size})")]
    SingularCover { rank: usize, size: usize },

    #[error("network cannot be inverted: {0}")]
    NotInvertible(String),

    #[error("resolution must be at least two points, got {0}")]
    BadResolution(usize),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("bad training configuration: {0}")]
    BadConfig(String),

    #[error("training diverged: loss became non-finite at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
