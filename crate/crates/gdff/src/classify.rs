//! The maximality ladder: valid → maximal → restricted maximal → strongly
//! maximal → extreme two-slope, decided exactly, plus a seeded randomized
//! falsifier for plain validity.
//!
//! Maximality is decided through the finite characterization: value 0 at the
//! origin, superadditivity (certified on the vertex complex), nonnegativity
//! on the positive axis, and either the symmetry identity
//! `f(x) + f(1−x) = 1` or the linear escape `f = a·x` with `0 ≤ a < 1`.
//! Validity itself is certified only through maximality; for functions that
//! fail the ladder a sampling falsifier can still produce a counterexample
//! multiset, and otherwise validity stays `unknown`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{is_superadditive, SuperadditivityVerdict};
use crate::error::{Error, Result};
use crate::pwl::PwlFunction;
use crate::rational::{format_rational, Rational};

/// Validity verdict: certification comes only from the maximality ladder,
/// falsification from the sampling oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Certified,
    Falsified,
    Unknown,
}

/// A failed property together with a human-readable counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub property: String,
    pub detail: String,
}

impl Witness {
    fn new(property: &str, detail: String) -> Self {
        Witness {
            property: property.to_string(),
            detail,
        }
    }
}

/// Outcome of a single ladder check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
}

impl CheckOutcome {
    fn ok() -> Self {
        CheckOutcome {
            holds: true,
            witnesses: Vec::new(),
        }
    }

    fn failed(witnesses: Vec<Witness>) -> Self {
        CheckOutcome {
            holds: false,
            witnesses,
        }
    }
}

/// Full ladder verdict for one function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub validity: Validity,
    pub maximal: bool,
    pub restricted_maximal: bool,
    pub strongly_maximal: bool,
    pub extreme_two_slope: bool,
    /// Set when the two-slope criterion cannot decide extremality (strongly
    /// maximal with three or more slope values).
    pub extremality_undecided: bool,
    pub witnesses: Vec<Witness>,
}

impl Classification {
    /// Flat `key: value` text block for CLI consumption.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let validity = match self.validity {
            Validity::Certified => "certified",
            Validity::Falsified => "falsified",
            Validity::Unknown => "unknown",
        };
        out.push_str(&format!("valid: {validity}\n"));
        out.push_str(&format!("maximal: {}\n", self.maximal));
        out.push_str(&format!("restricted_maximal: {}\n", self.restricted_maximal));
        out.push_str(&format!("strongly_maximal: {}\n", self.strongly_maximal));
        out.push_str(&format!("extreme_2slope: {}\n", self.extreme_two_slope));
        if self.extremality_undecided {
            out.push_str("extremality: unknown (three or more slope values)\n");
        }
        for w in &self.witnesses {
            out.push_str(&format!("witness.{}: {}\n", w.property, w.detail));
        }
        out
    }
}

fn require_equal_tails(f: &PwlFunction) -> Result<()> {
    if !f.has_equal_tails() {
        return Err(Error::UnequalTailSlopes {
            left: format_rational(f.left_tail_slope()),
            right: format_rational(f.right_tail_slope()),
        });
    }
    Ok(())
}

/// Conditions shared by every rung: f(0) = 0, superadditive, nonnegative on
/// the positive axis.
fn core_conditions(f: &PwlFunction) -> Result<CheckOutcome> {
    let mut witnesses = Vec::new();
    let zero = Rational::zero();
    let at_zero = f.eval(&zero);
    if !at_zero.is_zero() {
        witnesses.push(Witness::new(
            "value_at_zero",
            format!("f(0) = {}", format_rational(&at_zero)),
        ));
    }
    match is_superadditive(f)? {
        SuperadditivityVerdict::Superadditive => {}
        SuperadditivityVerdict::Violated(report) => {
            witnesses.push(Witness::new(
                "superadditivity",
                format!(
                    "slack {} at ({}, {})",
                    format_rational(&report.slack),
                    format_rational(&report.vertex.x),
                    format_rational(&report.vertex.y)
                ),
            ));
        }
    }
    // Nonnegativity on the positive axis: by continuity and piecewise
    // linearity it suffices to look at 0, the positive breakpoints, the
    // slope just right of 0 and the right tail.
    if at_zero < zero {
        witnesses.push(Witness::new(
            "nonnegative",
            format!("f(0) = {}", format_rational(&at_zero)),
        ));
    }
    for (b, v) in f.breakpoints().iter().zip(f.values()) {
        if b > &zero && v < &zero {
            witnesses.push(Witness::new(
                "nonnegative",
                format!("f({}) = {}", format_rational(b), format_rational(v)),
            ));
            break;
        }
    }
    if f.right_tail_slope() < &zero {
        witnesses.push(Witness::new(
            "nonnegative",
            format!(
                "right tail slope {}",
                format_rational(f.right_tail_slope())
            ),
        ));
    }
    // A negative slope right of 0 sends the function below 0 immediately.
    let slope_at_origin = f.slope_right_of(&zero);
    if at_zero.is_zero() && slope_at_origin < zero {
        witnesses.push(Witness::new(
            "nonnegative",
            format!("slope {} right of 0", format_rational(&slope_at_origin)),
        ));
    }
    if witnesses.is_empty() {
        Ok(CheckOutcome::ok())
    } else {
        Ok(CheckOutcome::failed(witnesses))
    }
}

/// Exact test of the symmetry identity `f(x) + f(1−x) = 1` as a piecewise
/// linear identity, with a witness point when it fails.
fn symmetry_outcome(f: &PwlFunction) -> CheckOutcome {
    let sum = f.add(&f.reflect(&Rational::one()));
    let target = PwlFunction::affine(&Rational::zero(), &Rational::one());
    if sum == target {
        return CheckOutcome::ok();
    }
    // Find a concrete witness: a breakpoint of the sum with value != 1, or a
    // point on a sloped tail.
    let one = Rational::one();
    for (b, v) in sum.breakpoints().iter().zip(sum.values()) {
        if v != &one {
            return CheckOutcome::failed(vec![Witness::new(
                "symmetry",
                format!(
                    "f({x}) + f(1-{x}) = {}",
                    format_rational(v),
                    x = format_rational(b)
                ),
            )]);
        }
    }
    let far = f
        .breakpoints()
        .last()
        .expect("canonical function has a breakpoint")
        + Rational::one();
    let value = sum.eval(&far);
    CheckOutcome::failed(vec![Witness::new(
        "symmetry",
        format!(
            "f({x}) + f(1-{x}) = {}",
            format_rational(&value),
            x = format_rational(&far)
        ),
    )])
}

/// Maximality via the finite characterization: core conditions plus either
/// the symmetry identity or the linear escape `f = a·x`, `0 ≤ a < 1`.
pub fn check_maximal(f: &PwlFunction) -> Result<CheckOutcome> {
    require_equal_tails(f)?;
    if let Some((slope, intercept)) = f.as_affine() {
        if intercept.is_zero() && slope >= Rational::zero() && slope < Rational::one() {
            return Ok(CheckOutcome::ok());
        }
    }
    let mut outcome = core_conditions(f)?;
    let symmetry = symmetry_outcome(f);
    if !symmetry.holds {
        outcome.witnesses.extend(symmetry.witnesses);
        outcome.holds = false;
    }
    Ok(outcome)
}

/// Restricted maximality: core conditions plus the symmetry identity, with
/// no linear escape.
pub fn check_restricted_maximal(f: &PwlFunction) -> Result<CheckOutcome> {
    require_equal_tails(f)?;
    let mut outcome = core_conditions(f)?;
    let symmetry = symmetry_outcome(f);
    if !symmetry.holds {
        outcome.witnesses.extend(symmetry.witnesses);
        outcome.holds = false;
    }
    Ok(outcome)
}

/// Strong maximality: restricted maximal with vanishing slope just right
/// of 0.
pub fn check_strongly_maximal(f: &PwlFunction) -> Result<bool> {
    Ok(check_restricted_maximal(f)?.holds && f.slope_right_of(&Rational::zero()).is_zero())
}

/// The two-slope extremality certificate: the identity, or a strongly
/// maximal function with exactly two slope values (one of them necessarily
/// 0). Functions with three or more slopes are simply not certified here.
pub fn check_extreme_two_slope(f: &PwlFunction) -> Result<bool> {
    if f.is_identity() {
        return Ok(true);
    }
    Ok(check_strongly_maximal(f)? && f.slopes().len() == 2)
}

/// Randomized search for a validity counterexample: a finite multiset with
/// `Σ xᵢ ≤ 1` but `Σ f(xᵢ) > 1`.
///
/// Sampling is deterministic in `seed`. Values are drawn from the rational
/// grid with denominators up to 64 inside `[−2, 2]`; the last draw of each
/// multiset is capped so the sum constraint holds exactly.
pub fn falsify_validity(
    f: &PwlFunction,
    trials: u32,
    max_multiset: u32,
    seed: u64,
) -> Option<Vec<Rational>> {
    assert!(trials > 0, "need at least one trial");
    let max_multiset = max_multiset.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Rational::one();
    for _ in 0..trials {
        let m = rng.gen_range(1..=max_multiset);
        let mut xs: Vec<Rational> = Vec::with_capacity(m as usize);
        let mut sum = Rational::zero();
        for i in 0..m {
            let d = rng.gen_range(1..=64i64);
            let lo = -2 * d;
            let mut hi = 2 * d;
            if i == m - 1 {
                // Cap the final draw so the multiset stays feasible.
                let room = (&one - &sum) * Rational::from_integer(d.into());
                let cap = room.floor().to_integer();
                hi = match i64::try_from(&cap) {
                    Ok(c) => hi.min(c),
                    Err(_) => hi,
                };
            }
            let x = if hi < lo {
                // No grid point fits; close the multiset exactly at sum 1.
                &one - &sum
            } else {
                Rational::new(rng.gen_range(lo..=hi).into(), d.into())
            };
            sum += &x;
            xs.push(x);
        }
        debug_assert!(sum <= one);
        let total: Rational = xs.iter().map(|x| f.eval(x)).sum();
        if total > one {
            xs.sort();
            return Some(xs);
        }
    }
    None
}

/// Bounded diagnostic for the generalized symmetry condition at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    /// `min_{1 ≤ k ≤ K} (1 − f(1 − k·r))/k − f(r)`; nonnegative for valid
    /// functions, zero when the infimum form of the symmetry condition is
    /// attained within the scanned range.
    pub gap: Rational,
    /// The `k` attaining the minimum.
    pub achieved_at: u32,
    /// Whether the slope envelope of a maximal function proves that no
    /// `k > K` could lower the minimum.
    pub envelope_rules_out_larger_k: bool,
}

/// Scans `k = 1..=k_max` of the generalized symmetry quotient at `r`.
///
/// The envelope certificate uses `f(x) ≤ t·x` (checked on the breakpoints)
/// to bound every unscanned quotient from below by `t·r − (t−1)/k` for
/// `t ≥ 1`, respectively `t·r + (1−t)/k` for `t < 1`.
pub fn symmetry_gap(f: &PwlFunction, r: &Rational, k_max: u32) -> Result<GapReport> {
    require_equal_tails(f)?;
    assert!(k_max >= 1, "need at least one quotient");
    let one = Rational::one();
    let mut best: Option<(Rational, u32)> = None;
    for k in 1..=k_max {
        let kr = Rational::from_integer(k.into()) * r;
        let candidate = (&one - f.eval(&(&one - kr))) / Rational::from_integer(k.into());
        if best.as_ref().map_or(true, |(b, _)| candidate < *b) {
            best = Some((candidate, k));
        }
    }
    let (min_candidate, achieved_at) = best.expect("k_max >= 1");
    let t = f.right_tail_slope().clone();
    let upper_envelope_holds = f
        .breakpoints()
        .iter()
        .zip(f.values())
        .all(|(b, v)| *v <= &t * b);
    let envelope_rules_out_larger_k = if !upper_envelope_holds {
        false
    } else if t >= one {
        // Quotients for k > K are at least t·r − (t−1)/(K+1).
        let bound = &t * r - (&t - &one) / Rational::from_integer((k_max + 1).into());
        min_candidate <= bound
    } else {
        // Quotients approach t·r from above as k grows.
        min_candidate <= &t * r
    };
    Ok(GapReport {
        gap: min_candidate - f.eval(r),
        achieved_at,
        envelope_rules_out_larger_k,
    })
}

/// Runs the whole ladder plus the validity falsifier.
///
/// Functions with unequal tail slopes are never maximal (the limiting
/// behavior pins both tails for maximal functions), so instead of erroring
/// the classification reports the failure with a witness.
pub fn classify(f: &PwlFunction, trials: u32, seed: u64) -> Classification {
    if !f.has_equal_tails() {
        let witness = Witness::new(
            "tail_slopes",
            format!(
                "left {} != right {}",
                format_rational(f.left_tail_slope()),
                format_rational(f.right_tail_slope())
            ),
        );
        let mut witnesses = vec![witness];
        let validity = match falsify_validity(f, trials, 6, seed) {
            Some(xs) => {
                witnesses.push(Witness::new(
                    "validity",
                    format!(
                        "multiset {{{}}} sums to <= 1 but images sum above 1",
                        xs.iter()
                            .map(format_rational)
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                ));
                Validity::Falsified
            }
            None => Validity::Unknown,
        };
        return Classification {
            validity,
            maximal: false,
            restricted_maximal: false,
            strongly_maximal: false,
            extreme_two_slope: false,
            extremality_undecided: false,
            witnesses,
        };
    }
    let maximal = check_maximal(f).expect("tails checked");
    let restricted = check_restricted_maximal(f).expect("tails checked");
    let strongly = check_strongly_maximal(f).expect("tails checked");
    let extreme = check_extreme_two_slope(f).expect("tails checked");
    let mut witnesses = maximal.witnesses.clone();
    for w in restricted.witnesses {
        if !witnesses.contains(&w) {
            witnesses.push(w);
        }
    }
    let validity = if maximal.holds {
        Validity::Certified
    } else {
        match falsify_validity(f, trials, 6, seed) {
            Some(xs) => {
                witnesses.push(Witness::new(
                    "validity",
                    format!(
                        "multiset {{{}}} sums to <= 1 but images sum above 1",
                        xs.iter()
                            .map(format_rational)
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                ));
                Validity::Falsified
            }
            None => Validity::Unknown,
        }
    };
    Classification {
        validity,
        maximal: maximal.holds,
        restricted_maximal: restricted.holds,
        strongly_maximal: strongly,
        extreme_two_slope: extreme,
        extremality_undecided: strongly && !extreme,
        witnesses,
    }
}
