//! Point sequences in `[0, 1)`: deterministic generators, seeded random
//! samples, and the plain-text point file.
//!
//! Every generator computes `x_n` from `n` alone (or from a sequential
//! random stream), so a sample of length `M` is always a prefix of the
//! sample of length `N > M` with the same parameters.

mod pointfile;

use std::path::PathBuf;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};

pub use pointfile::{load_points, parse_points, write_points, write_points_to};

/// `(√5 − 1)/2`, the fractional part of the golden ratio.
pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Default multiplier for the quadratic sequence `{n²α}`.
pub const DEFAULT_QUADRATIC_ALPHA: f64 = std::f64::consts::SQRT_2;

/// Largest double strictly below one.
const ONE_BELOW: f64 = 1.0 - f64::EPSILON / 2.0;

/// Largest `n` for which `n²` is exactly representable as a double.
const MAX_QUADRATIC_INDEX: usize = 94_906_265;

/// Fractional part `x − ⌊x⌋`, always in `[0, 1)`.
///
/// For tiny negative inputs the exact result rounds up to `1.0`; the largest
/// double below one is returned instead.
pub fn frac(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("frac of non-finite value {x}")));
    }
    Ok(frac_unchecked(x))
}

fn frac_unchecked(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        ONE_BELOW
    } else {
        f
    }
}

/// `frac(m · alpha)` for an exactly representable integer `m`, evaluated
/// from the error-free product `m·alpha = hi + lo` so that large `m` does not
/// erase the fractional digits.
fn frac_of_product(m: f64, alpha: f64) -> f64 {
    let hi = m * alpha;
    let lo = m.mul_add(alpha, -hi);
    let f = hi - hi.floor();
    let v = f + lo;
    if v < 0.0 {
        frac_unchecked(1.0 + v)
    } else if v >= 1.0 {
        frac_unchecked(v - 1.0)
    } else {
        v
    }
}

/// Radical inverse of `n` in `base`: the base-`b` digits of `n` mirrored
/// about the radix point, evaluated as one correctly rounded division.
pub fn radical_inverse(mut n: u64, base: u32) -> f64 {
    let b = u128::from(base);
    let mut reversed: u128 = 0;
    let mut denom: u128 = 1;
    while n > 0 {
        let digit = u128::from(n) % b;
        reversed = reversed * b + digit;
        denom *= b;
        n /= u64::from(base);
    }
    reversed as f64 / denom as f64
}

fn is_square(m: u64) -> bool {
    let r = m.isqrt();
    r * r == m
}

/// Uniform double in `[0, 1)` from the top 53 bits of a 64-bit word.
pub fn unit_f64(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seeded generator used for every random draw in the crate: xoshiro256++
/// with its state expanded from the 64-bit seed by SplitMix64.
pub fn seeded_rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    /// `x_n = {nα}`
    Kronecker {
        alpha: f64,
    },
    /// `x_n = {n²α}`
    Quadratic {
        alpha: f64,
    },
    /// van der Corput radical inverse of `n = 1, 2, …`
    Vdc {
        base: u32,
    },
    /// `{√n}` over the non-square integers `n ≥ 2`
    SqrtN,
    UniformRandom {
        seed: u64,
    },
    File {
        path: PathBuf,
    },
    /// Values supplied directly by the caller.
    Inline,
}

impl SequenceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SequenceKind::Kronecker { .. } => "kronecker",
            SequenceKind::Quadratic { .. } => "quadratic",
            SequenceKind::Vdc { .. } => "vdc",
            SequenceKind::SqrtN => "sqrt_n",
            SequenceKind::UniformRandom { .. } => "uniform_random",
            SequenceKind::File { .. } => "file",
            SequenceKind::Inline => "inline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceSpec {
    #[serde(flatten)]
    pub kind: SequenceKind,
    pub n: usize,
}

impl SequenceSpec {
    pub fn new(kind: SequenceKind, n: usize) -> Self {
        SequenceSpec { kind, n }
    }

    pub fn kronecker(alpha: f64, n: usize) -> Self {
        Self::new(SequenceKind::Kronecker { alpha }, n)
    }

    pub fn quadratic(alpha: f64, n: usize) -> Self {
        Self::new(SequenceKind::Quadratic { alpha }, n)
    }

    pub fn vdc(base: u32, n: usize) -> Self {
        Self::new(SequenceKind::Vdc { base }, n)
    }

    pub fn sqrt_n(n: usize) -> Self {
        Self::new(SequenceKind::SqrtN, n)
    }

    pub fn uniform(seed: u64, n: usize) -> Self {
        Self::new(SequenceKind::UniformRandom { seed }, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("sample size n must be at least 1"));
        }
        match &self.kind {
            SequenceKind::Kronecker { alpha } | SequenceKind::Quadratic { alpha }
                if !alpha.is_finite() =>
            {
                Err(Error::invalid(format!("alpha must be finite, got {alpha}")))
            }
            SequenceKind::Quadratic { .. } if self.n > MAX_QUADRATIC_INDEX => Err(Error::invalid(
                format!("quadratic sequence supports n <= {MAX_QUADRATIC_INDEX}"),
            )),
            SequenceKind::Vdc { base } if *base < 2 => {
                Err(Error::invalid(format!("vdc base must be >= 2, got {base}")))
            }
            _ => Ok(()),
        }
    }
}

/// An ordered finite sample `x_1, …, x_N` with every value in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSample {
    values: Vec<f64>,
    spec: SequenceSpec,
}

impl SequenceSample {
    /// Wraps caller-provided values, checking the `[0, 1)` invariant.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..1.0).contains(*v))
        {
            return Err(Error::invalid(format!(
                "value #{} = {v} is outside [0, 1)",
                i + 1
            )));
        }
        let n = values.len();
        Ok(SequenceSample {
            values,
            spec: SequenceSpec::new(SequenceKind::Inline, n),
        })
    }

    pub(crate) fn from_parts(values: Vec<f64>, spec: SequenceSpec) -> Self {
        debug_assert_eq!(values.len(), spec.n);
        debug_assert!(values.iter().all(|v| (0.0..1.0).contains(v)));
        SequenceSample { values, spec }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in ascending order.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_unstable_by(f64::total_cmp);
        v
    }

    /// The first `m` points, keeping the provenance.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.len() {
            return Err(Error::invalid(format!(
                "prefix length {m} not in 1..={}",
                self.len()
            )));
        }
        Ok(SequenceSample {
            values: self.values[..m].to_vec(),
            spec: SequenceSpec::new(self.spec.kind.clone(), m),
        })
    }
}

pub fn generate(spec: &SequenceSpec) -> Result<SequenceSample> {
    spec.validate()?;
    let n = spec.n;
    let values: Vec<f64> = match &spec.kind {
        SequenceKind::Kronecker { alpha } => {
            (1..=n).map(|i| frac_of_product(i as f64, *alpha)).collect()
        }
        SequenceKind::Quadratic { alpha } => (1..=n)
            .map(|i| frac_of_product((i as u64 * i as u64) as f64, *alpha))
            .collect(),
        SequenceKind::Vdc { base } => (1..=n as u64).map(|i| radical_inverse(i, *base)).collect(),
        SequenceKind::SqrtN => (2u64..)
            .filter(|&m| !is_square(m))
            .take(n)
            .map(|m| frac_unchecked((m as f64).sqrt()))
            .collect(),
        SequenceKind::UniformRandom { seed } => {
            let mut rng = seeded_rng(*seed);
            (0..n).map(|_| unit_f64(rng.next_u64())).collect()
        }
        SequenceKind::File { path } => {
            let loaded = load_points(path)?;
            if loaded.len() < n {
                return Err(Error::invalid(format!(
                    "{} holds {} points, {n} requested",
                    path.display(),
                    loaded.len()
                )));
            }
            let mut values = loaded.values;
            values.truncate(n);
            values
        }
        SequenceKind::Inline => {
            return Err(Error::invalid("inline samples cannot be regenerated"));
        }
    };
    Ok(SequenceSample::from_parts(values, spec.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_examples() {
        assert_eq!(frac(3.25).unwrap(), 0.25);
        assert_eq!(frac(-0.25).unwrap(), 0.75);
        assert_eq!(frac(7.0).unwrap(), 0.0);
        assert!(frac(f64::NAN).is_err());
        assert!(frac(f64::INFINITY).is_err());
        let tiny = frac(-1e-20).unwrap();
        assert!(tiny < 1.0 && tiny > 0.99);
    }

    #[test]
    fn kronecker_rational_alpha_cycles() {
        let s = generate(&SequenceSpec::kronecker(0.5, 4)).unwrap();
        assert_eq!(s.values(), &[0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn vdc_base_two() {
        let s = generate(&SequenceSpec::vdc(2, 4)).unwrap();
        assert_eq!(s.values(), &[0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn vdc_base_three_digits() {
        // 1, 2, 10, 11, 12, 20 in base 3
        let s = generate(&SequenceSpec::vdc(3, 6)).unwrap();
        let expected = [
            1.0 / 3.0,
            2.0 / 3.0,
            1.0 / 9.0,
            4.0 / 9.0,
            7.0 / 9.0,
            2.0 / 9.0,
        ];
        assert_eq!(s.values(), &expected);
    }

    #[test]
    fn sqrt_n_skips_squares() {
        let s = generate(&SequenceSpec::sqrt_n(4)).unwrap();
        let expected: Vec<f64> = [2u32, 3, 5, 6]
            .iter()
            .map(|&m| f64::from(m).sqrt().fract())
            .collect();
        assert_eq!(s.values(), expected.as_slice());
    }

    #[test]
    fn uniform_is_deterministic() {
        let spec = SequenceSpec::uniform(7, 1000);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = generate(&SequenceSpec::uniform(8, 1000)).unwrap();
        assert_ne!(generate(&spec).unwrap().values(), other.values());
    }

    #[test]
    fn xoshiro_stream_matches_reference_seeding() {
        // SplitMix64 expansion of seed 0 followed by xoshiro256++, computed
        // from the published reference algorithms.
        let mut sm = 0u64;
        let mut state = [0u64; 4];
        for word in &mut state {
            sm = sm.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = sm;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            *word = z ^ (z >> 31);
        }
        let expected = state[0]
            .wrapping_add(state[3])
            .rotate_left(23)
            .wrapping_add(state[0]);
        assert_eq!(seeded_rng(0).next_u64(), expected);
    }

    #[test]
    fn large_index_kronecker_keeps_fraction() {
        // 10^15 · 0.5 is an integer; an inaccurate product would leak noise.
        let v = frac_of_product(1e15, 0.5);
        assert_eq!(v, 0.0);
        let v = frac_of_product(3.0, 1.0 / 3.0);
        assert!(!(1e-15..=1.0 - 1e-15).contains(&v));
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&SequenceSpec::vdc(1, 4)).is_err());
        assert!(generate(&SequenceSpec::kronecker(f64::NAN, 4)).is_err());
        assert!(generate(&SequenceSpec::uniform(1, 0)).is_err());
        assert!(generate(&SequenceSpec::quadratic(1.5, MAX_QUADRATIC_INDEX + 1)).is_err());
    }

    #[test]
    fn from_values_checks_range() {
        assert!(SequenceSample::from_values(vec![0.0, 0.5]).is_ok());
        assert!(SequenceSample::from_values(vec![0.2, 1.0]).is_err());
        assert!(SequenceSample::from_values(vec![-0.0, f64::NAN]).is_err());
        assert!(matches!(
            SequenceSample::from_values(vec![]),
            Err(Error::EmptySample)
        ));
    }
}
