//! Exact rational arithmetic carrier.
//!
//! Every coordinate, value and slope in this crate is a [`Rational`] in
//! canonical form (reduced, positive denominator). No floating point is used
//! anywhere on a computation path; conversion to `f64` happens only at output
//! boundaries such as SVG emission.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rational = num_rational::BigRational;

/// Shorthand constructor for a rational from machine integers.
///
/// Panics if `d == 0`; intended for literals in code and tests.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand constructor for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` into a canonical rational.
///
/// The denominator may be written with either sign; the result is reduced
/// with a positive denominator. Whitespace around the string is ignored.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in rational literal `{s}`")))?;
    let denom: BigInt = den_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in rational literal `{s}`")))?;
    if denom.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(numer, denom))
}

/// Formats a rational as `"p/q"` with the denominator always explicit.
///
/// The output is in lowest terms with a positive denominator, so formatting
/// followed by [`parse_rational`] is an exact round trip.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Smallest integer grid refinement containing all the given rationals:
/// the lcm of their (positive) denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    let mut acc = BigInt::from(1);
    for v in values {
        acc = num_integer::lcm(acc, v.denom().abs());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-3/4", "0/1", "17/1", "-100/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("3/-4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational(" 5 ").unwrap(), int(5));
        assert_eq!(parse_rational("-0").unwrap(), int(0));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn common_denominator_is_lcm() {
        let vals = [rat(1, 6), rat(3, 4), int(2)];
        assert_eq!(common_denominator(vals.iter()), BigInt::from(12));
    }
}
