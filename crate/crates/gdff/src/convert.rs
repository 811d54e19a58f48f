//! Exact conversions between gDFFs and cut-generating functions for the
//! single-row model `Σ r·y(r) = 1`, `y` integral with finite support, plus
//! minimality certification on the cut-generating side.
//!
//! The two directions are the affine exchanges
//!
//! ```text
//! π_λ(x) = (x − (1−λ)·φ(x)) / λ        φ_λ(x) = (x − λ·π(x)) / (1−λ)
//! ```
//!
//! which are mutually inverse for the same `λ` and transport each rung of
//! the maximality ladder to the corresponding minimality rung.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::classify::check_strongly_maximal;
use crate::complex::{is_superadditive, SuperadditivityVerdict};
use crate::error::{Error, Result};
use crate::pwl::{affine_combine, PwlFunction};
use crate::rational::{format_rational, Rational};

/// Verdict of the bounded minimality certification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinimalityVerdict {
    Certified,
    Falsified(String),
    Unknown(String),
}

impl MinimalityVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, MinimalityVerdict::Certified)
    }
}

fn require_unit_interval(lambda: &Rational) -> Result<()> {
    if lambda <= &Rational::zero() || lambda >= &Rational::one() {
        return Err(Error::LambdaOutOfRange);
    }
    Ok(())
}

/// `π_λ = (id − (1−λ)·φ)/λ`, exact.
pub fn to_cut_generating(phi: &PwlFunction, lambda: &Rational) -> Result<PwlFunction> {
    require_unit_interval(lambda)?;
    let one = Rational::one();
    let id = PwlFunction::identity();
    affine_combine(
        &[&one / lambda, -(&one - lambda) / lambda],
        &[&id, phi],
    )
}

/// Largest `λ` for which `φ_λ` keeps a nonnegative start at the origin:
/// `1/s` where `s` is the slope of `π` just right of 0, when `s > 1`;
/// otherwise 1.
pub fn max_admissible_lambda(pi: &PwlFunction) -> Rational {
    let s = pi.slope_right_of(&Rational::zero());
    if s > Rational::one() {
        Rational::one() / s
    } else {
        Rational::one()
    }
}

/// `φ_λ = (id − λ·π)/(1−λ)`, exact.
///
/// `λ` must lie in `(0, 1)` and not exceed [`max_admissible_lambda`]; at the
/// threshold itself the result starts with slope exactly 0 right of the
/// origin, which is still admissible. The nonnegative start is re-checked on
/// the result.
pub fn to_gdff(pi: &PwlFunction, lambda: &Rational) -> Result<PwlFunction> {
    require_unit_interval(lambda)?;
    let threshold = max_admissible_lambda(pi);
    if lambda > &threshold {
        return Err(Error::LambdaNotAdmissible {
            lambda: format_rational(lambda),
            threshold: format_rational(&threshold),
        });
    }
    let one = Rational::one();
    let id = PwlFunction::identity();
    let phi = affine_combine(
        &[&one / (&one - lambda), -lambda.clone() / (&one - lambda)],
        &[&id, pi],
    )?;
    let zero = Rational::zero();
    if phi.eval(&zero) < zero || phi.slope_right_of(&zero) < zero {
        return Err(Error::LambdaNotAdmissible {
            lambda: format_rational(lambda),
            threshold: format_rational(&threshold),
        });
    }
    Ok(phi)
}

/// Converts a nonlinear restricted minimal cut-generating function into a
/// strongly maximal gDFF by taking `λ = 1/s` with `s` the slope of `π` just
/// right of 0.
pub fn strongly_maximal_from_cgf(pi: &PwlFunction) -> Result<PwlFunction> {
    if pi.as_affine().is_some() {
        return Err(Error::LinearCgf);
    }
    if !check_restricted_minimal_cgf(pi, 12)?.is_certified() {
        return Err(Error::NotRestrictedMinimal);
    }
    let s = pi.slope_right_of(&Rational::zero());
    if s <= Rational::one() {
        return Err(Error::ParameterOutOfRange(
            "nonlinear restricted minimal functions start with slope > 1".into(),
        ));
    }
    let lambda = Rational::one() / s;
    let phi = to_gdff(pi, &lambda)?;
    if !check_strongly_maximal(&phi)? {
        return Err(Error::ParameterOutOfRange(
            "conversion did not produce a strongly maximal function".into(),
        ));
    }
    Ok(phi)
}

/// Above this bound the exact quotient scan gives up and reports `Unknown`.
const SCAN_CAP: u64 = 1_000_000;

/// Exact supremum of `(1 − π(1 − k·r))/k` over all positive integers `k`.
///
/// Once the argument `1 − k·r` leaves the breakpoint range the quotient is
/// `t·r + A/k` on the relevant tail, so the finite scan extends to that point
/// and the remaining supremum is known in closed form: the limit `t·r`
/// (approached but not attained) when `A ≤ 0`, otherwise attained within the
/// scan.
fn quotient_supremum(pi: &PwlFunction, r: &Rational, k_min: u32) -> Option<Rational> {
    let one = Rational::one();
    let t = pi.right_tail_slope().clone();
    if r.is_zero() {
        // All quotients are (1 − π(1))/k: supremum at k = 1 if positive,
        // else the unattained limit 0.
        let first = &one - pi.eval(&one);
        return Some(if first > Rational::zero() {
            first
        } else {
            Rational::zero()
        });
    }
    let b = pi.breakpoints();
    let (edge_x, edge_v) = if *r > Rational::zero() {
        (b[0].clone(), pi.values()[0].clone())
    } else {
        (
            b[b.len() - 1].clone(),
            pi.values()[pi.values().len() - 1].clone(),
        )
    };
    // Smallest k with 1 − k·r beyond the edge breakpoint.
    let k_tail_exact = (&one - &edge_x) / r;
    let k_tail = if k_tail_exact <= Rational::zero() {
        BigInt::one()
    } else {
        k_tail_exact.ceil().to_integer() + 1
    };
    let k_end = match u64::try_from(&k_tail) {
        Ok(k) => k.max(u64::from(k_min)),
        Err(_) => return None,
    };
    if k_end > SCAN_CAP {
        return None;
    }
    let mut sup: Option<Rational> = None;
    for k in 1..=k_end {
        let kr = Rational::from_integer(BigInt::from(k)) * r;
        let q = (&one - pi.eval(&(&one - kr))) / Rational::from_integer(BigInt::from(k));
        if sup.as_ref().map_or(true, |s| q > *s) {
            sup = Some(q);
        }
    }
    let mut sup = sup.expect("k_end >= 1");
    // Tail regime: quotient_k = t·r + A/k with A fixed by the tail line.
    let a = &one - &edge_v - &t * (&one - &edge_x);
    if a <= Rational::zero() {
        let limit = &t * r;
        if limit > sup {
            sup = limit;
        }
    }
    Some(sup)
}

/// Certifies minimality of a cut-generating function: value 0 at the
/// origin, subadditivity (superadditivity of `−π` on the vertex complex),
/// and the supremum form of the generalized symmetry condition at every
/// breakpoint, each supremum evaluated exactly.
///
/// `k_min` forces the quotient scan to cover at least `k = 1..=k_min`.
pub fn check_minimal_cgf(pi: &PwlFunction, k_min: u32) -> Result<MinimalityVerdict> {
    let zero = Rational::zero();
    let at_zero = pi.eval(&zero);
    if !at_zero.is_zero() {
        return Ok(MinimalityVerdict::Falsified(format!(
            "pi(0) = {}",
            format_rational(&at_zero)
        )));
    }
    let negated = pi.scale(&-Rational::one());
    match is_superadditive(&negated)? {
        SuperadditivityVerdict::Superadditive => {}
        SuperadditivityVerdict::Violated(report) => {
            return Ok(MinimalityVerdict::Falsified(format!(
                "subadditivity fails by {} at ({}, {})",
                format_rational(&-&report.slack),
                format_rational(&report.vertex.x),
                format_rational(&report.vertex.y)
            )));
        }
    }
    for r in pi.breakpoints() {
        match quotient_supremum(pi, r, k_min) {
            Some(sup) => {
                let value = pi.eval(r);
                if sup != value {
                    return Ok(MinimalityVerdict::Falsified(format!(
                        "symmetry supremum at r = {} is {} but pi(r) = {}",
                        format_rational(r),
                        format_rational(&sup),
                        format_rational(&value)
                    )));
                }
            }
            None => {
                return Ok(MinimalityVerdict::Unknown(format!(
                    "quotient scan at r = {} exceeds the k budget",
                    format_rational(r)
                )));
            }
        }
    }
    Ok(MinimalityVerdict::Certified)
}

/// Restricted minimality: minimal and `π(1) = 1` exactly.
pub fn check_restricted_minimal_cgf(pi: &PwlFunction, k_min: u32) -> Result<MinimalityVerdict> {
    let at_one = pi.eval(&Rational::one());
    if at_one != Rational::one() {
        return Ok(MinimalityVerdict::Falsified(format!(
            "pi(1) = {}",
            format_rational(&at_one)
        )));
    }
    check_minimal_cgf(pi, k_min)
}
