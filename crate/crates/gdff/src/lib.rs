//! Exact-arithmetic toolkit for general dual feasible functions (gDFFs):
//! piecewise-linear functions ℝ→ℝ that produce valid inequalities for
//! knapsack-type sets.
//!
//! The crate constructs the classical parametric families, decides the
//! maximality ladder (valid → maximal → restricted maximal → strongly
//! maximal → extreme two-slope) with exact certificates, converts between
//! gDFFs and cut-generating functions for the single-row model, applies
//! functions to integer-program rows, and approximates any continuous
//! restricted maximal function by an extreme two-slope one with a verified
//! error certificate. All arithmetic is exact rational; nothing is rounded.

pub mod approx;
pub mod classify;
pub mod complex;
pub mod convert;
pub mod cuts;
pub mod error;
pub mod families;
pub mod rational;

pub mod pwl;

pub use classify::{
    check_extreme_two_slope, check_maximal, check_restricted_maximal, check_strongly_maximal,
    classify, falsify_validity, symmetry_gap, CheckOutcome, Classification, GapReport,
    Validity, Witness,
};
pub use complex::{
    delta_slack, enumerate_vertices, is_superadditive, min_slack_outside, ComplexVertex,
    ExclusionRegion, SlackReport, SuperadditivityVerdict, VertexProvenance,
};
pub use error::{Error, Result};
pub use pwl::{
    affine_combine, restrict_and_interpolate, sup_norm_distance, sup_norm_on_window,
    PwlFunction, SupNorm,
};
pub use rational::{format_rational, parse_rational, Rational};
