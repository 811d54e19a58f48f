//! Applying gDFFs to integer-program rows: coefficient-wise images give
//! valid inequalities for the nonnegative integer solutions of the row, and
//! a brute-force lattice enumeration verifies them on bounded boxes. Also
//! provides seeded samplers for the single-row models with inequality and
//! equality right-hand side.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::check_maximal;
use crate::error::{Error, Result};
use crate::pwl::PwlFunction;
use crate::rational::{format_rational, parse_rational, Rational};

/// One row `Σ aⱼ·xⱼ ≤ b` over nonnegative integer variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpRow {
    coefficients: Vec<Rational>,
    rhs: Rational,
}

impl IpRow {
    pub fn new(coefficients: Vec<Rational>, rhs: Rational) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::EmptyRow);
        }
        Ok(IpRow { coefficients, rhs })
    }

    /// Parses the row format `a1 a2 … | b` with rationals written `p/q`.
    pub fn parse(line: &str) -> Result<Self> {
        let (lhs, rhs) = line
            .split_once('|')
            .ok_or_else(|| Error::Parse("row needs the form `a1 a2 ... | b`".into()))?;
        let coefficients = lhs
            .split_whitespace()
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        let rhs = parse_rational(rhs)?;
        IpRow::new(coefficients, rhs)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }
}

/// The image of a row under a maximal function: `Σ φ(aⱼ)·xⱼ ≤ φ(b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedCut {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

impl GeneratedCut {
    pub fn format(&self) -> String {
        let lhs = self
            .coefficients
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(" ");
        format!("{lhs} | {}", format_rational(&self.rhs))
    }
}

/// Applies a certified maximal function coefficient-wise to a row.
pub fn generate_cut(phi: &PwlFunction, row: &IpRow) -> Result<GeneratedCut> {
    let outcome = check_maximal(phi)?;
    if !outcome.holds {
        let summary = outcome
            .witnesses
            .first()
            .map(|w| format!("{}: {}", w.property, w.detail))
            .unwrap_or_default();
        return Err(Error::NotMaximal(summary));
    }
    Ok(GeneratedCut {
        coefficients: row.coefficients.iter().map(|a| phi.eval(a)).collect(),
        rhs: phi.eval(&row.rhs),
    })
}

/// Exhaustively checks the cut on every nonnegative integer point of the
/// row inside the box `0 ≤ xⱼ ≤ box_bound`.
///
/// Requires strictly positive row coefficients and a box large enough to
/// contain every feasible point, so the check is complete; returns the
/// first violating lattice point otherwise.
pub fn verify_cut_bruteforce(
    cut: &GeneratedCut,
    row: &IpRow,
    box_bound: u64,
) -> Result<Option<Vec<u64>>> {
    if box_bound == 0 {
        return Err(Error::ParameterOutOfRange("box bound must be >= 1".into()));
    }
    if cut.coefficients.len() != row.coefficients.len() {
        return Err(Error::LengthMismatch {
            breakpoints: cut.coefficients.len(),
            values: row.coefficients.len(),
        });
    }
    for (j, a) in row.coefficients.iter().enumerate() {
        if *a <= Rational::zero() {
            return Err(Error::NonPositiveCoefficient);
        }
        // Largest feasible value of x_j alone.
        let reach = (&row.rhs / a).floor().to_integer();
        let fits = u64::try_from(&reach).map(|r| r <= box_bound).unwrap_or(false);
        if row.rhs >= Rational::zero() && !fits {
            return Err(Error::BoxTooSmall {
                box_bound,
                index: j,
                needed: reach.to_string(),
            });
        }
    }
    let n = row.coefficients.len();
    let mut point = vec![0u64; n];
    loop {
        let weight: Rational = point
            .iter()
            .zip(&row.coefficients)
            .map(|(&x, a)| Rational::from_integer(x.into()) * a)
            .sum();
        if weight <= row.rhs {
            let image: Rational = point
                .iter()
                .zip(&cut.coefficients)
                .map(|(&x, c)| Rational::from_integer(x.into()) * c)
                .sum();
            if image > cut.rhs {
                return Ok(Some(point));
            }
        }
        // Odometer step.
        let mut j = 0;
        loop {
            if j == n {
                return Ok(None);
            }
            if point[j] < box_bound {
                point[j] += 1;
                break;
            }
            point[j] = 0;
            j += 1;
        }
    }
}

/// A finite-support integer-valued point of the single-row models: the
/// multiset assigning multiplicity `y(r)` to each listed value `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YPoint {
    support: Vec<(Rational, u64)>,
}

impl YPoint {
    pub fn origin() -> Self {
        YPoint {
            support: Vec::new(),
        }
    }

    pub fn new(support: Vec<(Rational, u64)>) -> Self {
        let mut merged: Vec<(Rational, u64)> = Vec::new();
        for (r, m) in support {
            if m == 0 {
                continue;
            }
            match merged.iter_mut().find(|(s, _)| *s == r) {
                Some((_, acc)) => *acc += m,
                None => merged.push((r, m)),
            }
        }
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        YPoint { support: merged }
    }

    pub fn support(&self) -> &[(Rational, u64)] {
        &self.support
    }

    /// `Σ r·y(r)`.
    pub fn weight(&self) -> Rational {
        self.support
            .iter()
            .map(|(r, m)| r * Rational::from_integer((*m).into()))
            .sum()
    }

    /// `Σ f(r)·y(r)`.
    pub fn image_sum(&self, f: &PwlFunction) -> Rational {
        self.support
            .iter()
            .map(|(r, m)| f.eval(r) * Rational::from_integer((*m).into()))
            .sum()
    }
}

fn grid_value(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.gen_range(1..=16i64);
    Rational::new(rng.gen_range(-2 * d..=2 * d).into(), d.into())
}

/// Deterministic sample of feasible points of the relaxed model
/// `Σ r·y(r) ≤ 1`. The origin is always the first sample.
pub fn sample_y_le1(seed: u64, count: usize, max_support: usize) -> Vec<YPoint> {
    let max_support = max_support.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![YPoint::origin()];
    while out.len() < count {
        let k = rng.gen_range(1..=max_support);
        let mut entries = Vec::with_capacity(k);
        let mut weight = Rational::zero();
        for i in 0..k {
            let m = rng.gen_range(1..=3u64);
            let r = if i + 1 == k && weight > Rational::zero() {
                // Close the point feasibly: spend at most the remaining room.
                let room = Rational::one() - &weight;
                let candidate = grid_value(&mut rng);
                let cap = &room / Rational::from_integer(m.into());
                if candidate <= cap {
                    candidate
                } else {
                    cap
                }
            } else {
                grid_value(&mut rng)
            };
            weight = &weight + &r * Rational::from_integer(m.into());
            entries.push((r, m));
        }
        let point = YPoint::new(entries);
        if point.weight() <= Rational::one() {
            out.push(point);
        }
    }
    out.truncate(count);
    out
}

/// Deterministic sample of the equality model `Σ r·y(r) = 1`: the last
/// support value closes the sum to exactly 1.
pub fn sample_y_eq1(seed: u64, count: usize, max_support: usize) -> Vec<YPoint> {
    let max_support = max_support.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(1..=max_support);
        let mut entries = Vec::with_capacity(k);
        let mut weight = Rational::zero();
        for _ in 0..k.saturating_sub(1) {
            let m = rng.gen_range(1..=3u64);
            let r = grid_value(&mut rng);
            weight = &weight + &r * Rational::from_integer(m.into());
            entries.push((r, m));
        }
        let closer = Rational::one() - &weight;
        entries.push((closer, 1));
        let point = YPoint::new(entries);
        debug_assert_eq!(point.weight(), Rational::one());
        out.push(point);
    }
    out
}

/// Checks `Σ φ(r)·y(r) ≤ 1` on every sample; returns the index of the first
/// violated one.
pub fn check_inequality_on_samples(phi: &PwlFunction, samples: &[YPoint]) -> Option<usize> {
    samples
        .iter()
        .position(|y| y.image_sum(phi) > Rational::one())
}
