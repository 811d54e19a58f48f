//! Constructors for the named parametric families.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pwl::PwlFunction;
use crate::rational::Rational;

/// The linear family `x ↦ c·x` for `0 ≤ c ≤ 1`.
///
/// Every member is maximal; only `c = 1` (the identity) is restricted
/// maximal.
pub fn linear(c: &Rational) -> Result<PwlFunction> {
    if c < &Rational::zero() || c > &Rational::one() {
        return Err(Error::ParameterOutOfRange(
            "linear family needs 0 <= c <= 1".into(),
        ));
    }
    Ok(PwlFunction::linear(c))
}

/// The Burdett–Johnson family with parameter `C ≥ 1`.
///
/// For integer `C` this is the identity. Otherwise the function vanishes on
/// `[0, {C}/C]`, then alternates rises of slope `C/(⌊C⌋(1−{C}))` with
/// plateaus at heights `n/⌊C⌋` up to `(1, 1)`, and continues with that rise
/// slope on both tails. The result is a continuous two-slope function with
/// slope values `{0, C/(⌊C⌋(1−{C}))}` that satisfies `f(x) + f(1−x) = 1`, is
/// superadditive on all of ℝ², and agrees with the quasi-periodic closed
/// form
///
/// ```text
/// (⌊Cx⌋ + max(0, ({Cx} − {C})/(1 − {C}))) / ⌊C⌋
/// ```
///
/// on the closed interval from `−(1−{C})/C` to `(⌊C⌋+1)/C`, which contains
/// `[0, 1]`. The quasi-periodic form itself is not eventually affine, so no
/// function with affine tails can match it globally; the tails here extend
/// the rises that end at `(0,0)` and start at `(1,1)`, which is the unique
/// choice keeping the symmetry identity and superadditivity exact.
pub fn bj1(c: &Rational) -> Result<PwlFunction> {
    if c < &Rational::one() {
        return Err(Error::ParameterOutOfRange(
            "Burdett-Johnson family needs C >= 1".into(),
        ));
    }
    if c.is_integer() {
        return Ok(PwlFunction::identity());
    }
    let floor: BigInt = c.floor().to_integer();
    let frac = c - Rational::from_integer(floor.clone());
    let one_minus_frac = Rational::one() - &frac;
    let rise_slope = c / (Rational::from_integer(floor.clone()) * &one_minus_frac);

    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let mut n = BigInt::zero();
    while n <= floor {
        let level = Rational::new(n.clone(), floor.clone());
        let plateau_start = Rational::from_integer(n.clone()) / c;
        let plateau_end = (Rational::from_integer(n.clone()) + &frac) / c;
        breakpoints.push(plateau_start);
        values.push(level.clone());
        breakpoints.push(plateau_end);
        values.push(level);
        n += 1;
    }
    PwlFunction::new(breakpoints, values, rise_slope.clone(), rise_slope)
}

/// The perturbation family with parameters `s > 1` and
/// `0 < δ < min{(s−1)/(2s), 1/3}`.
///
/// Restricted maximal, with slope 0 exactly on `[0, δ] ∪ [1−δ, 1]`, slope
/// `2s` on the bands adjacent to 0 and 1, slope `1/(1−2δ)` in the middle and
/// tail slope `s` on both sides. Its superadditivity slack is at least `δ`
/// outside the exclusion region `E_δ`.
pub fn s_delta(s: &Rational, delta: &Rational) -> Result<PwlFunction> {
    if s <= &Rational::one() {
        return Err(Error::ParameterOutOfRange(
            "perturbation family needs s > 1".into(),
        ));
    }
    let bound_a = (s - Rational::one()) / (Rational::from_integer(2.into()) * s);
    let bound_b = Rational::new(1.into(), 3.into());
    let bound = if bound_a < bound_b { bound_a } else { bound_b };
    if delta <= &Rational::zero() || delta >= &bound {
        return Err(Error::ParameterOutOfRange(format!(
            "perturbation family needs 0 < delta < min((s-1)/(2s), 1/3) = {bound}"
        )));
    }
    let one = Rational::one();
    let two = Rational::from_integer(2.into());
    let two_s_delta = &two * s * delta;
    let breakpoints = vec![
        -delta.clone(),
        Rational::zero(),
        delta.clone(),
        &one - delta,
        one.clone(),
        &one + delta,
    ];
    let values = vec![
        -two_s_delta.clone(),
        Rational::zero(),
        Rational::zero(),
        one.clone(),
        one.clone(),
        &one + &two_s_delta,
    ];
    PwlFunction::new(breakpoints, values, s.clone(), s.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pwl::{affine_combine, PwlFunction};
    use crate::rational::{int, rat};

    #[test]
    fn linear_family_validates_range() {
        assert!(linear(&rat(1, 2)).is_ok());
        assert!(linear(&int(0)).is_ok());
        assert!(linear(&int(1)).unwrap().is_identity());
        assert!(linear(&rat(-1, 10)).is_err());
        assert!(linear(&rat(11, 10)).is_err());
    }

    #[test]
    fn bj1_integer_parameter_gives_identity() {
        assert!(bj1(&int(2)).unwrap().is_identity());
        assert!(bj1(&int(3)).unwrap().is_identity());
        assert!(bj1(&int(1)).unwrap().is_identity());
        assert!(bj1(&rat(1, 2)).is_err());
    }

    #[test]
    fn bj1_three_halves_shape() {
        let f = bj1(&rat(3, 2)).unwrap();
        assert_eq!(f.breakpoints(), &[int(0), rat(1, 3), rat(2, 3), int(1)]);
        assert_eq!(f.values(), &[int(0), int(0), int(1), int(1)]);
        assert_eq!(f.left_tail_slope(), &int(3));
        assert_eq!(f.right_tail_slope(), &int(3));
        assert_eq!(f.eval(&rat(2, 3)), int(1));
        assert_eq!(f.eval(&int(1)), int(1));
        assert_eq!(f.eval(&rat(1, 3)), int(0));
        assert_eq!(f.eval(&rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn bj1_seven_thirds_fixed_points() {
        let f = bj1(&rat(7, 3)).unwrap();
        assert_eq!(f.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(f.eval(&int(1)), int(1));
        let slopes = f.slopes();
        assert_eq!(slopes.len(), 2);
        assert!(slopes.contains(&int(0)));
        assert!(slopes.contains(&rat(7, 4)));
    }

    #[test]
    fn bj1_symmetry_identity() {
        for c in [rat(3, 2), rat(7, 3), rat(5, 2), rat(9, 4)] {
            let f = bj1(&c).unwrap();
            let sum = f.add(&f.reflect(&int(1)));
            assert_eq!(sum, PwlFunction::affine(&int(0), &int(1)), "C = {c}");
        }
    }

    #[test]
    fn s_delta_shape_and_values() {
        let f = s_delta(&int(2), &rat(1, 8)).unwrap();
        assert_eq!(f.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(f.eval(&rat(-1, 16)), rat(-1, 4));
        assert_eq!(f.eval(&rat(9, 8)), rat(3, 2));
        let slopes: Vec<_> = f.slopes().into_iter().collect();
        assert_eq!(slopes, vec![int(0), rat(4, 3), int(2), int(4)]);
    }

    #[test]
    fn s_delta_symmetry_identity() {
        let f = s_delta(&int(2), &rat(1, 8)).unwrap();
        let sum = f.add(&f.reflect(&int(1)));
        assert_eq!(sum, PwlFunction::affine(&int(0), &int(1)));
    }

    #[test]
    fn s_delta_rejects_bad_parameters() {
        // s <= 1 is out, as is any delta at or above the bound.
        assert!(s_delta(&rat(1, 5), &int(2)).is_err());
        assert!(s_delta(&int(2), &rat(1, 4)).is_err());
        assert!(s_delta(&int(2), &int(0)).is_err());
        assert!(s_delta(&rat(3, 2), &rat(1, 6)).is_err());
        assert!(s_delta(&rat(3, 2), &rat(1, 7)).is_ok());
    }

    #[test]
    fn convex_mix_of_bj1_evaluates_exactly() {
        let a = bj1(&rat(3, 2)).unwrap();
        let b = bj1(&rat(7, 3)).unwrap();
        let mix = affine_combine(&[rat(1, 2), rat(1, 2)], &[&a, &b]).unwrap();
        assert_eq!(mix.eval(&int(1)), int(1));
        assert_eq!(mix.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(mix.right_tail_slope(), &rat(19, 8));
        assert_eq!(mix.slopes().len(), 4);
    }
}
