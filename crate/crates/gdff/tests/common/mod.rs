//! Shared oracles for the integration tests, kept independent of the
//! library's computation paths: closed-form evaluation for the
//! Burdett–Johnson family, brute-force vertex enumeration as line
//! intersections, dense grid scans of the superadditivity slack, and the
//! windowed brute-force two-slope fill-in.

// Each integration test binary compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

use std::collections::BTreeSet;

use gdff::families::{bj1, linear, s_delta};
use gdff::pwl::{affine_combine, PwlFunction};
use gdff::rational::{int, rat, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Quasi-periodic closed form `(⌊Cx⌋ + max(0, ({Cx} − {C})/(1 − {C})))/⌊C⌋`.
pub fn bj1_closed_form(c: &Rational, x: &Rational) -> Rational {
    let cx = c * x;
    let floor_cx = cx.floor();
    let frac_cx = &cx - &floor_cx;
    let floor_c = c.floor();
    let frac_c = c - &floor_c;
    assert!(!frac_c.is_zero(), "closed form needs a non-integer parameter");
    let ratio = (&frac_cx - &frac_c) / (Rational::one() - &frac_c);
    let inner = if ratio > Rational::zero() {
        ratio
    } else {
        Rational::zero()
    };
    (floor_cx + inner) / floor_c
}

/// All pairwise intersections of the lines `x = b_i`, `y = b_j`,
/// `x + y = b_k`: the zero-dimensional faces of the complex.
pub fn line_intersection_vertices(f: &PwlFunction) -> BTreeSet<(Rational, Rational)> {
    let b = f.breakpoints();
    let mut out = BTreeSet::new();
    for bi in b {
        for bj in b {
            out.insert((bi.clone(), bj.clone()));
            out.insert((bi.clone(), bj - bi));
            out.insert((bj - bi, bi.clone()));
        }
    }
    out
}

/// Exact minimum of the slack over the square grid of the given pitch.
pub fn grid_min_slack(
    f: &PwlFunction,
    lo: i64,
    hi: i64,
    pitch_denominator: i64,
) -> Rational {
    let steps = (hi - lo) * pitch_denominator;
    let mut best: Option<Rational> = None;
    for i in 0..=steps {
        let x = int(lo) + rat(i, pitch_denominator);
        for j in 0..=steps {
            let y = int(lo) + rat(j, pitch_denominator);
            let s = gdff::delta_slack(f, &x, &y);
            if best.as_ref().map_or(true, |b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.expect("grid nonempty")
}

/// Brute-force two-slope fill-in: maximum of `f(u) + g(x − u)` over the
/// grid points `u ∈ (1/q)ℤ` within `[x − 2, x + 2]`, where `g` vanishes on
/// the right and has slope `s_plus` on the left.
pub fn brute_force_fill_in(
    f: &PwlFunction,
    q: i64,
    s_plus: &Rational,
    x: &Rational,
) -> Rational {
    let lo = ((x - int(2)) * int(q)).ceil().to_integer();
    let hi = ((x + int(2)) * int(q)).floor().to_integer();
    let mut best: Option<Rational> = None;
    let mut k = lo;
    while k <= hi {
        let u = Rational::new(k.clone(), BigInt::from(q));
        let penalty = if &u <= x {
            Rational::zero()
        } else {
            s_plus * (x - &u)
        };
        let candidate = f.eval(&u) + penalty;
        if best.as_ref().map_or(true, |b| candidate > *b) {
            best = Some(candidate);
        }
        k += 1;
    }
    best.expect("window contains grid points")
}

/// The named corpus of certified-maximal functions used across the suite.
pub fn maximal_corpus() -> Vec<(String, PwlFunction)> {
    let mut out: Vec<(String, PwlFunction)> = Vec::new();
    out.push(("identity".into(), PwlFunction::identity()));
    out.push(("linear_zero".into(), linear(&int(0)).unwrap()));
    out.push(("linear_half".into(), linear(&rat(1, 2)).unwrap()));
    for c in [rat(3, 2), rat(7, 3), rat(5, 2), rat(9, 4)] {
        out.push((format!("bj1_{c}"), bj1(&c).unwrap()));
    }
    for (s, d) in [
        (rat(3, 2), rat(1, 7)),
        (int(2), rat(1, 8)),
        (int(3), rat(1, 4)),
        (int(5), rat(1, 4)),
    ] {
        out.push((format!("s_delta_{s}_{d}"), s_delta(&s, &d).unwrap()));
    }
    let a = bj1(&rat(3, 2)).unwrap();
    let b = bj1(&rat(7, 3)).unwrap();
    out.push((
        "bj1_mix".into(),
        affine_combine(&[rat(1, 2), rat(1, 2)], &[&a, &b]).unwrap(),
    ));
    out
}

/// The restricted maximal subset of the corpus (drops the strictly scaled
/// linear members).
pub fn restricted_maximal_corpus() -> Vec<(String, PwlFunction)> {
    maximal_corpus()
        .into_iter()
        .filter(|(name, _)| name != "linear_zero" && name != "linear_half")
        .collect()
}

