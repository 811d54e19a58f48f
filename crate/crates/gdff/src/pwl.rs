//! Continuous piecewise-linear functions on the whole real line with affine
//! tails, represented exactly.
//!
//! A [`PwlFunction`] stores finitely many breakpoints with their values plus
//! the two tail slopes. The function is the linear interpolation of the
//! stored points, extended affinely beyond the first and last breakpoint.
//! Construction canonicalizes: collinear interior points are pruned, and a
//! globally affine function collapses to a single anchor point at `x = 0`, so
//! structural equality coincides with pointwise equality of functions.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, format_rational, parse_rational, Rational};

/// Continuous piecewise-linear function with affine tails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PwlFunctionDto", into = "PwlFunctionDto")]
pub struct PwlFunction {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
    left_tail_slope: Rational,
    right_tail_slope: Rational,
}

impl PwlFunction {
    /// Builds a function from breakpoints, values and tail slopes.
    ///
    /// Breakpoints must be strictly increasing and match `values` in length.
    /// An empty breakpoint list is accepted only with equal tail slopes and
    /// denotes the linear function through the origin. The result is
    /// canonical: redundant (collinear) breakpoints are pruned.
    pub fn new(
        breakpoints: Vec<Rational>,
        values: Vec<Rational>,
        left_tail_slope: Rational,
        right_tail_slope: Rational,
    ) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BreakpointsNotSorted);
        }
        if breakpoints.is_empty() {
            if left_tail_slope != right_tail_slope {
                return Err(Error::InconsistentLinearTails);
            }
            return Ok(Self::affine(&left_tail_slope, &Rational::zero()));
        }
        Ok(Self::canonicalize(
            breakpoints,
            values,
            left_tail_slope,
            right_tail_slope,
        ))
    }

    /// The affine function `x ↦ slope·x + value_at_zero`.
    pub fn affine(slope: &Rational, value_at_zero: &Rational) -> Self {
        PwlFunction {
            breakpoints: vec![Rational::zero()],
            values: vec![value_at_zero.clone()],
            left_tail_slope: slope.clone(),
            right_tail_slope: slope.clone(),
        }
    }

    /// The linear function `x ↦ slope·x`.
    pub fn linear(slope: &Rational) -> Self {
        Self::affine(slope, &Rational::zero())
    }

    /// The identity function.
    pub fn identity() -> Self {
        Self::linear(&Rational::one())
    }

    fn canonicalize(
        breakpoints: Vec<Rational>,
        values: Vec<Rational>,
        left_tail_slope: Rational,
        right_tail_slope: Rational,
    ) -> Self {
        let n = breakpoints.len();
        // slope_left[i] is the slope immediately left of breakpoint i,
        // slope_right[i] immediately right.
        let mut keep = Vec::with_capacity(n);
        let mut prev_slope = left_tail_slope.clone();
        for i in 0..n {
            let next_slope = if i + 1 < n {
                (&values[i + 1] - &values[i]) / (&breakpoints[i + 1] - &breakpoints[i])
            } else {
                right_tail_slope.clone()
            };
            keep.push(prev_slope != next_slope);
            prev_slope = next_slope;
        }
        if keep.iter().any(|&k| k) {
            let mut bs = Vec::new();
            let mut vs = Vec::new();
            for (i, k) in keep.into_iter().enumerate() {
                if k {
                    bs.push(breakpoints[i].clone());
                    vs.push(values[i].clone());
                }
            }
            PwlFunction {
                breakpoints: bs,
                values: vs,
                left_tail_slope,
                right_tail_slope,
            }
        } else {
            // Globally affine: collapse to an anchor at 0.
            let value_at_zero = &values[0] - &breakpoints[0] * &left_tail_slope;
            Self::affine(&left_tail_slope, &value_at_zero)
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn left_tail_slope(&self) -> &Rational {
        &self.left_tail_slope
    }

    pub fn right_tail_slope(&self) -> &Rational {
        &self.right_tail_slope
    }

    pub fn has_equal_tails(&self) -> bool {
        self.left_tail_slope == self.right_tail_slope
    }

    /// `Some((slope, value_at_zero))` when the function is globally affine.
    pub fn as_affine(&self) -> Option<(Rational, Rational)> {
        if self.breakpoints.len() == 1 && self.left_tail_slope == self.right_tail_slope {
            let value_at_zero =
                &self.values[0] - &self.breakpoints[0] * &self.left_tail_slope;
            Some((self.left_tail_slope.clone(), value_at_zero))
        } else {
            None
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.as_affine(), Some((s, v)) if s == Rational::one() && v.is_zero())
    }

    /// Exact evaluation at `x`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let n = self.breakpoints.len();
        let idx = self.breakpoints.partition_point(|b| b <= x);
        if idx == 0 {
            return &self.values[0] + (x - &self.breakpoints[0]) * &self.left_tail_slope;
        }
        let i = idx - 1;
        if &self.breakpoints[i] == x {
            return self.values[i].clone();
        }
        if i + 1 == n {
            return &self.values[i] + (x - &self.breakpoints[i]) * &self.right_tail_slope;
        }
        let slope = (&self.values[i + 1] - &self.values[i])
            / (&self.breakpoints[i + 1] - &self.breakpoints[i]);
        &self.values[i] + (x - &self.breakpoints[i]) * slope
    }

    /// Evaluates at an ascending list of points in one pass.
    pub fn eval_sorted(&self, xs: &[Rational]) -> Vec<Rational> {
        debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        let n = self.breakpoints.len();
        let mut out = Vec::with_capacity(xs.len());
        let mut i = 0usize; // number of breakpoints <= current x
        let mut slope_cache: Option<(usize, Rational)> = None;
        for x in xs {
            while i < n && &self.breakpoints[i] <= x {
                i += 1;
            }
            let v = if i == 0 {
                &self.values[0] + (x - &self.breakpoints[0]) * &self.left_tail_slope
            } else {
                let j = i - 1;
                if &self.breakpoints[j] == x {
                    self.values[j].clone()
                } else if j + 1 == n {
                    &self.values[j] + (x - &self.breakpoints[j]) * &self.right_tail_slope
                } else {
                    let slope = match &slope_cache {
                        Some((cached_j, s)) if *cached_j == j => s.clone(),
                        _ => {
                            let s = (&self.values[j + 1] - &self.values[j])
                                / (&self.breakpoints[j + 1] - &self.breakpoints[j]);
                            slope_cache = Some((j, s.clone()));
                            s
                        }
                    };
                    &self.values[j] + (x - &self.breakpoints[j]) * slope
                }
            };
            out.push(v);
        }
        out
    }

    /// Slopes of the `n + 1` affine pieces from left tail to right tail.
    pub fn piece_slopes(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.breakpoints.len() + 1);
        out.push(self.left_tail_slope.clone());
        for w in 0..self.breakpoints.len().saturating_sub(1) {
            out.push(
                (&self.values[w + 1] - &self.values[w])
                    / (&self.breakpoints[w + 1] - &self.breakpoints[w]),
            );
        }
        out.push(self.right_tail_slope.clone());
        out
    }

    /// The set of distinct slope values, tails included.
    pub fn slopes(&self) -> BTreeSet<Rational> {
        self.piece_slopes().into_iter().collect()
    }

    pub fn min_slope(&self) -> Rational {
        self.piece_slopes().into_iter().min().expect("nonempty")
    }

    pub fn max_slope(&self) -> Rational {
        self.piece_slopes().into_iter().max().expect("nonempty")
    }

    /// Slope of the piece immediately right of `x`.
    pub fn slope_right_of(&self, x: &Rational) -> Rational {
        let idx = self.breakpoints.partition_point(|b| b <= x);
        if idx == 0 {
            self.left_tail_slope.clone()
        } else if idx == self.breakpoints.len() {
            self.right_tail_slope.clone()
        } else {
            (&self.values[idx] - &self.values[idx - 1])
                / (&self.breakpoints[idx] - &self.breakpoints[idx - 1])
        }
    }

    /// Slope of the piece immediately left of `x`.
    pub fn slope_left_of(&self, x: &Rational) -> Rational {
        let idx = self.breakpoints.partition_point(|b| b < x);
        if idx == 0 {
            self.left_tail_slope.clone()
        } else if idx == self.breakpoints.len() {
            self.right_tail_slope.clone()
        } else {
            (&self.values[idx] - &self.values[idx - 1])
                / (&self.breakpoints[idx] - &self.breakpoints[idx - 1])
        }
    }

    /// The reflected function `x ↦ f(c − x)`.
    pub fn reflect(&self, c: &Rational) -> PwlFunction {
        let breakpoints: Vec<Rational> =
            self.breakpoints.iter().rev().map(|b| c - b).collect();
        let values: Vec<Rational> = self.values.iter().rev().cloned().collect();
        PwlFunction::canonicalize(
            breakpoints,
            values,
            -self.right_tail_slope.clone(),
            -self.left_tail_slope.clone(),
        )
    }

    /// Pointwise scaling `x ↦ c·f(x)`.
    pub fn scale(&self, c: &Rational) -> PwlFunction {
        affine_combine(&[c.clone()], &[self]).expect("arity is static")
    }

    /// Pointwise sum.
    pub fn add(&self, other: &PwlFunction) -> PwlFunction {
        affine_combine(&[Rational::one(), Rational::one()], &[self, other])
            .expect("arity is static")
    }

    /// Pointwise difference `self − other`.
    pub fn sub(&self, other: &PwlFunction) -> PwlFunction {
        affine_combine(&[Rational::one(), -Rational::one()], &[self, other])
            .expect("arity is static")
    }

    /// Least common denominator of the breakpoints (1 for an affine function
    /// anchored at 0).
    pub fn breakpoint_denominator(&self) -> BigInt {
        common_denominator(self.breakpoints.iter())
    }

    /// Serializes to the textual function format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization is infallible")
    }

    /// Parses the textual function format.
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Exact pointwise linear combination `Σ coeffs[k]·fns[k]`.
///
/// The breakpoint set of the result is the merged union before pruning; tail
/// slopes combine coefficient-wise.
pub fn affine_combine(coeffs: &[Rational], fns: &[&PwlFunction]) -> Result<PwlFunction> {
    if coeffs.is_empty() || coeffs.len() != fns.len() {
        return Err(Error::CombineArity);
    }
    let mut merged: BTreeSet<Rational> = BTreeSet::new();
    for f in fns {
        merged.extend(f.breakpoints.iter().cloned());
    }
    let xs: Vec<Rational> = merged.into_iter().collect();
    let mut values = vec![Rational::zero(); xs.len()];
    let mut left = Rational::zero();
    let mut right = Rational::zero();
    for (c, f) in coeffs.iter().zip(fns) {
        if c.is_zero() {
            continue;
        }
        let vs = f.eval_sorted(&xs);
        for (acc, v) in values.iter_mut().zip(vs) {
            *acc += c * v;
        }
        left += c * &f.left_tail_slope;
        right += c * &f.right_tail_slope;
    }
    if xs.is_empty() {
        // All inputs were affine anchors is impossible (anchors always carry
        // one breakpoint), so this only happens for an empty merge of
        // zero-coefficient terms.
        return Ok(PwlFunction::linear(&left));
    }
    Ok(PwlFunction::canonicalize(xs, values, left, right))
}

/// Result of a sup-norm computation between two functions on all of ℝ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupNorm {
    Finite(Rational),
    Unbounded,
}

impl SupNorm {
    pub fn finite(self) -> Option<Rational> {
        match self {
            SupNorm::Finite(r) => Some(r),
            SupNorm::Unbounded => None,
        }
    }
}

/// Exact `sup |f − g|` over ℝ.
///
/// If the tail slopes differ on either side the difference grows without
/// bound and `Unbounded` is returned. Otherwise the difference has constant
/// tails and the maximum is attained at one of its breakpoints.
pub fn sup_norm_distance(f: &PwlFunction, g: &PwlFunction) -> SupNorm {
    if f.left_tail_slope != g.left_tail_slope || f.right_tail_slope != g.right_tail_slope {
        return SupNorm::Unbounded;
    }
    let h = f.sub(g);
    let max = h
        .values
        .iter()
        .map(|v| v.abs())
        .max()
        .expect("canonical functions have a breakpoint");
    SupNorm::Finite(max)
}

/// Exact `max |f − g|` over the closed window `[lo, hi]`.
pub fn sup_norm_on_window(
    f: &PwlFunction,
    g: &PwlFunction,
    lo: &Rational,
    hi: &Rational,
) -> Rational {
    assert!(lo <= hi, "window must be ordered");
    let mut pts: BTreeSet<Rational> = BTreeSet::new();
    pts.insert(lo.clone());
    pts.insert(hi.clone());
    for b in f.breakpoints.iter().chain(g.breakpoints.iter()) {
        if b > lo && b < hi {
            pts.insert(b.clone());
        }
    }
    let xs: Vec<Rational> = pts.into_iter().collect();
    let fv = f.eval_sorted(&xs);
    let gv = g.eval_sorted(&xs);
    fv.into_iter()
        .zip(gv)
        .map(|(a, b)| (a - b).abs())
        .max()
        .expect("window contains its endpoints")
}

/// Piecewise-linear interpolation of `f` through the grid `(1/q)ℤ` inside
/// `[lo, hi]`, with `f`'s tail slopes kept.
///
/// Requires `lo < 0 < 1 < hi`, both window ends on the grid, and every
/// breakpoint of `f` inside the window; then the result agrees with `f` on
/// the grid, and equals `f` exactly when all breakpoints of `f` already lie
/// on the grid.
pub fn restrict_and_interpolate(
    f: &PwlFunction,
    q: u64,
    lo: &Rational,
    hi: &Rational,
) -> Result<PwlFunction> {
    if q == 0 {
        return Err(Error::ParameterOutOfRange("grid density q must be >= 1".into()));
    }
    let qr = Rational::from_integer(BigInt::from(q));
    let zero = Rational::zero();
    let one = Rational::one();
    if !(lo < &zero && one < *hi) {
        return Err(Error::BadWindow);
    }
    let lo_scaled = lo * &qr;
    let hi_scaled = hi * &qr;
    if !lo_scaled.is_integer() || !hi_scaled.is_integer() {
        return Err(Error::BadWindow);
    }
    for b in &f.breakpoints {
        if b < lo || b > hi {
            return Err(Error::WindowTooSmall(format_rational(b)));
        }
    }
    let k_lo = lo_scaled.to_integer();
    let k_hi = hi_scaled.to_integer();
    let mut xs = Vec::new();
    let mut k = k_lo;
    while k <= k_hi {
        xs.push(Rational::new(k.clone(), BigInt::from(q)));
        k += 1;
    }
    let vs = f.eval_sorted(&xs);
    PwlFunction::new(xs, vs, f.left_tail_slope.clone(), f.right_tail_slope.clone())
}

#[derive(Serialize, Deserialize)]
struct PwlFunctionDto {
    breakpoints: Vec<String>,
    values: Vec<String>,
    left_tail_slope: String,
    right_tail_slope: String,
}

impl TryFrom<PwlFunctionDto> for PwlFunction {
    type Error = Error;

    fn try_from(dto: PwlFunctionDto) -> Result<Self> {
        let breakpoints = dto
            .breakpoints
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        let values = dto
            .values
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        PwlFunction::new(
            breakpoints,
            values,
            parse_rational(&dto.left_tail_slope)?,
            parse_rational(&dto.right_tail_slope)?,
        )
    }
}

impl From<PwlFunction> for PwlFunctionDto {
    fn from(f: PwlFunction) -> Self {
        PwlFunctionDto {
            breakpoints: f.breakpoints.iter().map(format_rational).collect(),
            values: f.values.iter().map(format_rational).collect(),
            left_tail_slope: format_rational(&f.left_tail_slope),
            right_tail_slope: format_rational(&f.right_tail_slope),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn simple_vee() -> PwlFunction {
        // |x| shaped: slope -1 then +1 with the kink at 0.
        PwlFunction::new(vec![int(0)], vec![int(0)], int(-1), int(1)).unwrap()
    }

    #[test]
    fn eval_interpolates_and_extends() {
        let f = PwlFunction::new(
            vec![int(0), int(1)],
            vec![int(0), int(2)],
            int(0),
            int(1),
        )
        .unwrap();
        assert_eq!(f.eval(&rat(1, 2)), int(1));
        assert_eq!(f.eval(&int(0)), int(0));
        assert_eq!(f.eval(&int(1)), int(2));
        assert_eq!(f.eval(&int(-3)), int(0));
        assert_eq!(f.eval(&int(3)), int(4));
    }

    #[test]
    fn canonicalization_prunes_collinear_points() {
        let f = PwlFunction::new(
            vec![int(0), int(1), int(2), int(3)],
            vec![int(0), int(1), int(2), int(4)],
            int(1),
            int(2),
        )
        .unwrap();
        // 1 and 2 are interior to straight pieces except x=2 where slope
        // changes from 1 to 2.
        assert_eq!(f.breakpoints(), &[int(2)]);
        let g = PwlFunction::new(vec![int(5)], vec![int(10)], int(2), int(2)).unwrap();
        assert_eq!(g, PwlFunction::linear(&int(2)));
        assert_eq!(g.breakpoints(), &[int(0)]);
    }

    #[test]
    fn empty_breakpoints_mean_linear_through_origin() {
        let f = PwlFunction::new(vec![], vec![], rat(1, 2), rat(1, 2)).unwrap();
        assert_eq!(f, PwlFunction::linear(&rat(1, 2)));
        assert!(PwlFunction::new(vec![], vec![], int(0), int(1)).is_err());
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(
            PwlFunction::new(vec![int(0)], vec![], int(0), int(0)),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            PwlFunction::new(vec![int(1), int(0)], vec![int(0), int(0)], int(0), int(0)),
            Err(Error::BreakpointsNotSorted)
        ));
    }

    #[test]
    fn affine_combine_identity_cases() {
        let v = simple_vee();
        let same = affine_combine(&[int(1)], &[&v]).unwrap();
        assert_eq!(same, v);
        let id = PwlFunction::identity();
        let avg = affine_combine(&[rat(1, 2), rat(1, 2)], &[&id, &id]).unwrap();
        assert_eq!(avg, id);
        assert!(affine_combine(&[], &[]).is_err());
        assert!(affine_combine(&[int(1)], &[&v, &v]).is_err());
    }

    #[test]
    fn sup_norm_basics() {
        let v = simple_vee();
        assert_eq!(sup_norm_distance(&v, &v), SupNorm::Finite(int(0)));
        let shifted = PwlFunction::new(vec![int(0)], vec![rat(1, 7)], int(-1), int(1)).unwrap();
        assert_eq!(sup_norm_distance(&v, &shifted), SupNorm::Finite(rat(1, 7)));
        assert_eq!(
            sup_norm_distance(&v, &PwlFunction::identity()),
            SupNorm::Unbounded
        );
    }

    #[test]
    fn windowed_sup_norm_sees_interior_kinks() {
        let v = simple_vee();
        let zero = PwlFunction::linear(&int(0));
        assert_eq!(sup_norm_on_window(&v, &zero, &int(-2), &int(3)), int(3));
        assert_eq!(sup_norm_on_window(&v, &zero, &rat(-1, 2), &rat(1, 4)), rat(1, 2));
    }

    #[test]
    fn interpolation_fixes_grid_functions() {
        let f = PwlFunction::new(
            vec![int(0), rat(1, 3), rat(2, 3), int(1)],
            vec![int(0), int(0), int(1), int(1)],
            int(3),
            int(3),
        )
        .unwrap();
        let g = restrict_and_interpolate(&f, 3, &int(-1), &int(2)).unwrap();
        assert_eq!(g, f);
        let id = PwlFunction::identity();
        let gi = restrict_and_interpolate(&id, 7, &int(-1), &int(2)).unwrap();
        assert_eq!(gi, id);
    }

    #[test]
    fn interpolation_window_errors() {
        let f = simple_vee();
        assert!(matches!(
            restrict_and_interpolate(&f, 2, &rat(-1, 3), &int(2)),
            Err(Error::BadWindow)
        ));
        let wide = PwlFunction::new(vec![int(-5)], vec![int(0)], int(0), int(1)).unwrap();
        assert!(matches!(
            restrict_and_interpolate(&wide, 2, &int(-1), &int(2)),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn reflection_is_exact() {
        let f = PwlFunction::new(
            vec![int(0), rat(1, 3), rat(2, 3), int(1)],
            vec![int(0), int(0), int(1), int(1)],
            int(3),
            int(3),
        )
        .unwrap();
        let r = f.reflect(&int(1));
        for x in [int(-1), int(0), rat(1, 4), rat(1, 2), int(1), int(2)] {
            assert_eq!(r.eval(&x), f.eval(&(int(1) - &x)));
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = PwlFunction::new(
            vec![rat(-1, 6), int(0), rat(22, 7)],
            vec![rat(3, 5), int(0), rat(-9, 11)],
            rat(19, 8),
            rat(19, 8),
        )
        .unwrap();
        let back = PwlFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }
}
