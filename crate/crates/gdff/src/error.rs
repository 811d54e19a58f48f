//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("breakpoints and values have different lengths ({breakpoints} vs {values})")]
    LengthMismatch { breakpoints: usize, values: usize },

    #[error("breakpoints must be strictly increasing")]
    BreakpointsNotSorted,

    #[error("a function with no breakpoints needs equal tail slopes")]
    InconsistentLinearTails,

    #[error("affine combination needs equally many coefficients and functions, at least one each")]
    CombineArity,

    #[error("interpolation window must satisfy lo < 0 < 1 < hi with lo, hi on the grid")]
    BadWindow,

    #[error("breakpoint {0} lies outside the interpolation window")]
    WindowTooSmall(String),

    #[error("tail slopes differ ({left} vs {right}); the vertex certificate needs equal tails")]
    UnequalTailSlopes { left: String, right: String },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("lambda must satisfy 0 < lambda < 1")]
    LambdaOutOfRange,

    #[error("lambda {lambda} is at or above the admissible threshold {threshold}")]
    LambdaNotAdmissible { lambda: String, threshold: String },

    #[error("conversion needs a nonlinear cut-generating function")]
    LinearCgf,

    #[error("input is not a certified restricted minimal cut-generating function")]
    NotRestrictedMinimal,

    #[error("function is not certified maximal: {0}")]
    NotMaximal(String),

    #[error("function is not restricted maximal: {0}")]
    NotRestrictedMaximal(String),

    #[error("epsilon must be positive")]
    NonPositiveEpsilon,

    #[error("fill-in needs a linear piece of maximal slope immediately left of 0")]
    MissingSteepPiece,

    #[error("symmetrization mismatch at 1/2: f(1/2) = {0}")]
    JunctionMismatch(String),

    #[error("enumeration box {box_bound} too small: variable {index} can reach {needed}")]
    BoxTooSmall {
        box_bound: u64,
        index: usize,
        needed: String,
    },

    #[error("row coefficients must be positive for exhaustive verification")]
    NonPositiveCoefficient,

    #[error("row must have at least one variable")]
    EmptyRow,

    #[error("parse error: {0}")]
    Parse(String),
}
