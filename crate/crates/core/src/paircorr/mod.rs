//! Close-pair counting under the circular metric `‖x − y‖` and the
//! pair-correlation deviation statistic.
//!
//! Counts are over ordered pairs `(l, m)`, `l ≠ m`, with the strict
//! comparison `‖x_l − x_m‖ < s/N`. The threshold is always the double
//! `s as f64 / N as f64`, and the distance is always [`wrap_distance`]
//! evaluated in double precision, so the sweep and the brute-force oracle
//! resolve near-ties identically.

mod banded;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequences::SequenceSample;

/// Distance to the nearest integer of `x − y`, for `x, y ∈ [0, 1)`.
pub fn wrap_distance(x: f64, y: f64) -> Result<f64> {
    for v in [x, y] {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::invalid(format!(
                "wrap_distance argument {v} is outside [0, 1)"
            )));
        }
    }
    Ok(circular(x, y))
}

#[inline]
fn circular(x: f64, y: f64) -> f64 {
    let a = (x - y).abs();
    a.min(1.0 - a)
}

/// The threshold `s/N` as used by every counting routine.
#[inline]
pub fn threshold(s: usize, n: usize) -> f64 {
    s as f64 / n as f64
}

/// Direct `O(N²)` count of ordered pairs closer than `t`.
pub fn pair_count_bruteforce(sample: &SequenceSample, t: f64) -> Result<u64> {
    check_threshold(t)?;
    let x = sample.values();
    let mut count = 0u64;
    for (l, &xl) in x.iter().enumerate() {
        for (m, &xm) in x.iter().enumerate() {
            if l != m && circular(xl, xm) < t {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn check_threshold(t: f64) -> Result<()> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::invalid(format!(
            "threshold must be positive, got {t}"
        )));
    }
    Ok(())
}

/// How [`PairCounter::table_with`] evaluates a range of thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMethod {
    /// One linear sweep per threshold: `O(N·s_max)`.
    Sweep,
    /// Fine-bin correlations plus exact checks of the pairs near each
    /// threshold, with `resolution` bins per step `1/N`. Falls back to the
    /// sweep when the transform would be too large to round exactly.
    Banded { resolution: usize },
    /// Sweep for short tables, banded otherwise.
    #[default]
    Auto,
}

/// Tables at least this long use the banded counter under [`CountMethod::Auto`].
const BANDED_MIN_S: usize = 32;

/// Sorted copy of a sample, answering close-pair counts in linear time per
/// threshold.
///
/// For a sorted pair `i < j` with `a = x_j − x_i`, `‖x_i − x_j‖ < t` holds
/// iff `a < t` or `1 − a < t`, and for `t ≤ 1/2` the two cases are
/// exclusive. Both predicates are monotone in `j` and in `i`, so each is
/// counted with one forward-moving pointer; the wrap-around pointer only
/// visits the `O(tN)` points near zero.
#[derive(Debug, Clone)]
pub struct PairCounter {
    sorted: Vec<f64>,
}

impl PairCounter {
    pub fn new(sample: &SequenceSample) -> Self {
        PairCounter {
            sorted: sample.sorted_values(),
        }
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// Ordered pairs `l ≠ m` with `‖x_l − x_m‖ < t`.
    pub fn count_below(&self, t: f64) -> Result<u64> {
        check_threshold(t)?;
        Ok(self.count_unchecked(t))
    }

    fn count_unchecked(&self, t: f64) -> u64 {
        let x = &self.sorted;
        let n = x.len();
        if t > 0.5 {
            // Every circular distance is at most 1/2.
            return (n as u64) * (n as u64).saturating_sub(1);
        }

        let mut near = 0u64;
        let mut j = 0usize;
        for i in 0..n {
            if j < i {
                j = i;
            }
            while j + 1 < n && x[j + 1] - x[i] < t {
                j += 1;
            }
            near += (j - i) as u64;
        }

        let mut far = 0u64;
        if n >= 2 {
            // Smallest j > 0 with 1 − (x_j − x_0) < t, scanning down from the top.
            let mut lo = n;
            while lo - 1 > 0 && 1.0 - (x[lo - 1] - x[0]) < t {
                lo -= 1;
            }
            for i in 0..n {
                if lo <= i {
                    lo = i + 1;
                }
                while lo < n && 1.0 - (x[lo] - x[i]) >= t {
                    lo += 1;
                }
                if lo >= n {
                    break;
                }
                far += (n - lo) as u64;
            }
        }
        2 * (near + far)
    }

    /// Counts for every threshold `s/N`, `s = 1..=s_max`.
    pub fn table(&self, s_max: usize) -> Result<PairCountTable> {
        self.table_with(s_max, CountMethod::Auto)
    }

    pub fn table_with(&self, s_max: usize, method: CountMethod) -> Result<PairCountTable> {
        let n = self.n();
        if s_max == 0 || 2 * s_max > n {
            return Err(Error::invalid(format!(
                "s_max must satisfy 1 <= s_max <= N/2, got s_max={s_max}, N={n}"
            )));
        }
        let resolution = match method {
            CountMethod::Sweep => None,
            CountMethod::Banded { resolution } => Some(resolution),
            CountMethod::Auto if s_max >= BANDED_MIN_S => Some(banded::resolution_for(s_max)),
            CountMethod::Auto => None,
        };
        let counts = resolution
            .and_then(|r| banded::table(&self.sorted, s_max, r))
            .unwrap_or_else(|| self.sweep(s_max));
        Ok(PairCountTable { n, counts })
    }

    #[cfg(feature = "parallel")]
    fn sweep(&self, s_max: usize) -> Vec<u64> {
        use rayon::prelude::*;
        let n = self.n();
        (1..=s_max)
            .into_par_iter()
            .map(|s| self.count_unchecked(threshold(s, n)))
            .collect()
    }

    #[cfg(not(feature = "parallel"))]
    fn sweep(&self, s_max: usize) -> Vec<u64> {
        let n = self.n();
        (1..=s_max)
            .map(|s| self.count_unchecked(threshold(s, n)))
            .collect()
    }
}

/// Sorts once and sweeps each threshold `s/N`, `s = 1..=s_max`.
pub fn pair_counts_fast(sample: &SequenceSample, s_max: usize) -> Result<PairCountTable> {
    PairCounter::new(sample).table(s_max)
}

/// Ordered close-pair counts at thresholds `s/N` for `s = 1..=s_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCountTable {
    n: usize,
    counts: Vec<u64>,
}

impl PairCountTable {
    /// Builds a table from externally obtained counts (`counts[0]` is `s = 1`).
    pub fn from_counts(n: usize, counts: Vec<u64>) -> Result<Self> {
        if n == 0 || counts.is_empty() {
            return Err(Error::invalid(
                "pair count table needs N >= 1 and s_max >= 1",
            ));
        }
        Ok(PairCountTable { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s_max(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, s: usize) -> Option<u64> {
        s.checked_sub(1).and_then(|i| self.counts.get(i).copied())
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn require(&self, s: usize) -> Result<u64> {
        self.count(s)
            .ok_or_else(|| Error::invalid(format!("s={s} not in table range 1..={}", self.s_max())))
    }

    /// `|count(s)/(2s) − N|`, the per-threshold term of the deviation maximum.
    pub fn deviation(&self, s: usize) -> Result<f64> {
        let c = self.require(s)?;
        Ok(deviation_term(c, s, self.n))
    }
}

#[inline]
fn deviation_term(count: u64, s: usize, n: usize) -> f64 {
    (count as f64 / (2 * s) as f64 - n as f64).abs()
}

/// `R(s, N) = count(s)/N`; tends to `2s` under Poissonian pair correlations.
pub fn ppc_statistic(table: &PairCountTable, s: usize) -> Result<f64> {
    let c = table.require(s)?;
    Ok(c as f64 / table.n as f64)
}

/// Smallest admissible `F(K, N)` for one sample:
/// `max_{s = 1..K} |count(s)/(2s) − N|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FEstimate {
    pub n: usize,
    pub k: usize,
    pub value: f64,
    /// Threshold index attaining the maximum (first one on ties).
    pub arg_s: usize,
}

pub fn f_estimate(table: &PairCountTable, k: usize) -> Result<FEstimate> {
    if k == 0 || k > table.s_max() {
        return Err(Error::invalid(format!(
            "k={k} not in table range 1..={}",
            table.s_max()
        )));
    }
    let mut value = f64::NEG_INFINITY;
    let mut arg_s = 1;
    for (i, &c) in table.counts[..k].iter().enumerate() {
        let d = deviation_term(c, i + 1, table.n);
        if d > value {
            value = d;
            arg_s = i + 1;
        }
    }
    Ok(FEstimate {
        n: table.n,
        k,
        value,
        arg_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> SequenceSample {
        SequenceSample::from_values(v.to_vec()).unwrap()
    }

    fn lattice(n: usize) -> SequenceSample {
        sample(&(0..n).map(|i| i as f64 / n as f64).collect::<Vec<_>>())
    }

    #[test]
    fn wrap_distance_examples() {
        assert!((wrap_distance(0.1, 0.9).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(wrap_distance(0.25, 0.75).unwrap(), 0.5);
        for a in [0.0, 0.3, 0.999] {
            assert_eq!(wrap_distance(a, a).unwrap(), 0.0);
        }
        assert!(wrap_distance(1.0, 0.2).is_err());
        assert!(wrap_distance(0.2, -0.1).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(
            pair_count_bruteforce(&sample(&[0.0, 0.5]), 0.25).unwrap(),
            0
        );
        assert_eq!(
            pair_count_bruteforce(&sample(&[0.0, 0.1, 0.95]), 0.12).unwrap(),
            4
        );
        assert_eq!(
            pair_count_bruteforce(&sample(&[0.0, 0.25, 0.5, 0.75]), 0.5).unwrap(),
            8
        );
        assert!(pair_count_bruteforce(&sample(&[0.0]), 0.0).is_err());
    }

    #[test]
    fn sweep_matches_bruteforce_on_examples() {
        for (v, t) in [
            (vec![0.0, 0.5], 0.25),
            (vec![0.0, 0.1, 0.95], 0.12),
            (vec![0.0, 0.25, 0.5, 0.75], 0.5),
            (vec![0.3, 0.3, 0.3], 0.01),
            (vec![0.0, 0.999, 0.998, 0.001], 0.0015),
        ] {
            let s = sample(&v);
            assert_eq!(
                PairCounter::new(&s).count_below(t).unwrap(),
                pair_count_bruteforce(&s, t).unwrap(),
                "{v:?} t={t}"
            );
        }
    }

    #[test]
    fn lattice_counts_exclude_exact_ties() {
        // Powers of two keep lattice points and thresholds exact.
        for n in [4usize, 8, 64, 1024] {
            let table = pair_counts_fast(&lattice(n), n / 2).unwrap();
            assert_eq!(
                table.count(3),
                if n >= 6 { Some(4 * n as u64) } else { None }
            );
            for s in 1..=n / 2 {
                assert_eq!(table.count(s).unwrap(), 2 * (s as u64 - 1) * n as u64);
                let r = ppc_statistic(&table, s).unwrap();
                assert_eq!(r, 2.0 * (s as f64 - 1.0));
            }
            assert_eq!(f_estimate(&table, n / 2).unwrap().value, n as f64);
        }
    }

    #[test]
    fn identical_points() {
        let table = pair_counts_fast(&sample(&[0.4; 3]), 1).unwrap();
        assert_eq!(table.count(1), Some(6));
        assert_eq!(ppc_statistic(&table, 1).unwrap(), 2.0);
    }

    #[test]
    fn sparse_points_have_no_close_pairs() {
        let s = sample(&[0.0, 0.25, 0.5, 0.75, 0.125, 0.375, 0.625, 0.875]);
        // every gap is at least 1/N and eighths subtract exactly
        let table = pair_counts_fast(&s, 1).unwrap();
        assert_eq!(table.counts(), &[0]);
        // tenths do not: fl(0.3) − fl(0.2) < fl(0.1)
        let tenths = sample(&[0.0, 0.2, 0.4, 0.6, 0.8, 0.1, 0.3, 0.5, 0.7, 0.9]);
        let t = threshold(1, 10);
        assert_eq!(pair_count_bruteforce(&tenths, t).unwrap(), 12);
        assert_eq!(pair_counts_fast(&tenths, 1).unwrap().counts(), &[12]);
    }

    #[test]
    fn f_estimate_perfect_counts() {
        let n = 100;
        let counts = (1..=10).map(|s| 2 * s as u64 * n as u64).collect();
        let table = PairCountTable::from_counts(n, counts).unwrap();
        let f = f_estimate(&table, 10).unwrap();
        assert_eq!(f.value, 0.0);
    }

    #[test]
    fn f_estimate_nested_max() {
        let table = PairCountTable::from_counts(10, vec![30, 30, 70, 90]).unwrap();
        let values: Vec<f64> = (1..=4)
            .map(|k| f_estimate(&table, k).unwrap().value)
            .collect();
        assert_eq!(values, vec![5.0, 5.0, 5.0, 5.0]);
        assert_eq!(table.deviation(2).unwrap(), 2.5);
        assert!(f_estimate(&table, 0).is_err());
        assert!(f_estimate(&table, 5).is_err());
        assert!(ppc_statistic(&table, 5).is_err());
    }

    #[test]
    fn table_range_checks() {
        let s = lattice(8);
        assert!(pair_counts_fast(&s, 0).is_err());
        assert!(pair_counts_fast(&s, 5).is_err());
        assert!(pair_counts_fast(&s, 4).is_ok());
    }

    #[test]
    fn saturated_threshold_counts_every_pair() {
        let s = sample(&[0.1, 0.2, 0.7]);
        assert_eq!(PairCounter::new(&s).count_below(0.75).unwrap(), 6);
        assert_eq!(pair_count_bruteforce(&s, 0.75).unwrap(), 6);
    }
}
