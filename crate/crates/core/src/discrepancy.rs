//! Exact star-discrepancy, the discrepancy bound `H(N, K)` with its window
//! rule for `K`, and the end-to-end bound check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::paircorr::{f_estimate, PairCountTable, PairCounter};
use crate::sequences::SequenceSample;

/// Smallest sample size accepted by [`select_k`] and [`bound_check`].
pub const MIN_BOUND_N: usize = 32;

/// Offset used by the grid oracle to probe both sides of each sample point.
const PROBE_OFFSET: f64 = 1.0 / (1u64 << 40) as f64;

/// `A_N([0, a))`: number of values strictly below `a`.
pub fn count_in_prefix_interval(sample: &SequenceSample, a: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::invalid(format!(
            "interval endpoint {a} is outside [0, 1]"
        )));
    }
    Ok(sample.values().iter().filter(|&&x| x < a).count())
}

/// How the supremum is reached at `witness_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSide {
    /// Attained at `a = witness_a` itself, where `[0, a)` excludes the point
    /// (the limit from the left has the same value).
    Left,
    /// Approached as `a ↓ witness_a`, where `[0, a)` includes the point.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub d_star: f64,
    pub witness_a: f64,
    pub witness_side: WitnessSide,
    pub n_d_star: f64,
}

impl DiscrepancyReport {
    /// `|A/N − a|` at the witness, counting with the side's convention.
    pub fn witness_deviation(&self, sample: &SequenceSample) -> f64 {
        let a = self.witness_a;
        let count = match self.witness_side {
            WitnessSide::Left => sample.values().iter().filter(|&&x| x < a).count(),
            WitnessSide::Right => sample.values().iter().filter(|&&x| x <= a).count(),
        };
        (count as f64 / self.n as f64 - a).abs()
    }
}

/// Exact `D*_N` from the order statistics:
/// `max_i max(i/N − x₍ᵢ₎, x₍ᵢ₎ − (i−1)/N)`.
pub fn star_discrepancy_exact(sample: &SequenceSample) -> Result<DiscrepancyReport> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let sorted = sample.sorted_values();
    Ok(discrepancy_of_sorted(&sorted))
}

pub(crate) fn discrepancy_of_sorted(sorted: &[f64]) -> DiscrepancyReport {
    let n = sorted.len();
    let nf = n as f64;
    let mut best = f64::NEG_INFINITY;
    let mut witness_a = 0.0;
    let mut witness_side = WitnessSide::Left;
    for (idx, &x) in sorted.iter().enumerate() {
        let i = (idx + 1) as f64;
        let below = x - (i - 1.0) / nf;
        if below > best {
            best = below;
            witness_a = x;
            witness_side = WitnessSide::Left;
        }
        let above = i / nf - x;
        if above > best {
            best = above;
            witness_a = x;
            witness_side = WitnessSide::Right;
        }
    }
    DiscrepancyReport {
        n,
        d_star: best,
        witness_a,
        witness_side,
        n_d_star: nf * best,
    }
}

/// Lower estimate of `D*_N` from direct evaluations of `|A_N([0,a))/N − a|`
/// at every sample value, at each value `± 2⁻⁴⁰`, and on the grid
/// `a = j/grid_points`. Independent of the order-statistics formula.
pub fn star_discrepancy_grid_oracle(sample: &SequenceSample, grid_points: usize) -> Result<f64> {
    let n = sample.len();
    if grid_points < n {
        return Err(Error::invalid(format!(
            "grid_points={grid_points} must be at least N={n}"
        )));
    }
    let sorted = sample.sorted_values();
    let nf = n as f64;
    let eval = |a: f64| {
        let a = a.clamp(0.0, 1.0);
        let below = sorted.partition_point(|&x| x < a);
        (below as f64 / nf - a).abs()
    };
    let mut best = 0.0f64;
    for &x in &sorted {
        best = best
            .max(eval(x))
            .max(eval(x - PROBE_OFFSET))
            .max(eval(x + PROBE_OFFSET));
    }
    let g = grid_points as f64;
    for j in 0..=grid_points {
        best = best.max(eval(j as f64 / g));
    }
    Ok(best)
}

/// `5 · max(N^{4/5}, √(N·F))`.
pub fn theorem_bound(n: usize, f_value: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if f_value.is_nan() || f_value < 0.0 {
        return Err(Error::invalid(format!(
            "f_value must be >= 0, got {f_value}"
        )));
    }
    let nf = n as f64;
    Ok(5.0 * nf.powf(0.8).max((nf * f_value).sqrt()))
}

/// `⌊N^{2/5}⌋`, computed exactly as the largest `K` with `K⁵ ≤ N²`.
pub fn k_upper(n: usize) -> usize {
    let n2 = (n as u128) * (n as u128);
    let mut k = (n as f64).powf(0.4).floor() as u128;
    while k > 0 && k.pow(5) > n2 {
        k -= 1;
    }
    while (k + 1).pow(5) <= n2 {
        k += 1;
    }
    k as usize
}

/// `⌈N^{2/5}/2⌉`, the smallest `K` with `(2K)⁵ ≥ N²`.
pub fn k_lower_half(n: usize) -> usize {
    let n2 = (n as u128) * (n as u128);
    let mut k = ((n as f64).powf(0.4) / 2.0).ceil().max(1.0) as u128;
    while k > 1 && (2 * (k - 1)).pow(5) >= n2 {
        k -= 1;
    }
    while (2 * k).pow(5) < n2 {
        k += 1;
    }
    k as usize
}

/// Whether `min(N^{2/5}/2, N/F) ≤ K ≤ N^{2/5}` holds, with `F = F(K², N)`.
/// The power comparisons are done in integers; `N/0` counts as `+∞`.
pub fn k_window_holds(n: usize, k: usize, f_k2: f64) -> bool {
    let n2 = (n as u128) * (n as u128);
    let k128 = k as u128;
    if k == 0 || k128.pow(5) > n2 {
        return false;
    }
    let half_root_ok = (2 * k128).pow(5) >= n2;
    let ratio_ok = f_k2 > 0.0 && (n as f64) / f_k2 <= k as f64;
    half_root_ok || ratio_ok
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KSelection {
    pub k: usize,
    pub feasible: bool,
    /// `F(K², N)` at the selected `K`.
    pub f_value: f64,
}

/// Scans `K = 1..=⌊N^{2/5}⌋` and returns the smallest `K` inside the window;
/// `f_of_k2(K)` must return `F(K², N)`. Falls back to `K = ⌊N^{2/5}⌋` with
/// `feasible = false`.
pub fn select_k_with(n: usize, mut f_of_k2: impl FnMut(usize) -> f64) -> KSelection {
    let top = k_upper(n);
    for k in 1..=top {
        let f = f_of_k2(k);
        if k_window_holds(n, k, f) {
            return KSelection {
                k,
                feasible: true,
                f_value: f,
            };
        }
    }
    let k = top.max(1);
    KSelection {
        k,
        feasible: false,
        f_value: f_of_k2(k),
    }
}

/// Empirical `K` selection. Every `K ≥ ⌈N^{2/5}/2⌉` satisfies the window,
/// so counts up to `s = min(⌈N^{2/5}/2⌉, ⌊N^{2/5}⌋)²` suffice; that table is
/// returned for reuse.
pub fn select_k(sample: &SequenceSample) -> Result<(KSelection, PairCountTable)> {
    let n = sample.len();
    if n < MIN_BOUND_N {
        return Err(Error::invalid(format!(
            "bound analysis needs N >= {MIN_BOUND_N}, got {n}"
        )));
    }
    let k_cap = k_lower_half(n).min(k_upper(n));
    let table = PairCounter::new(sample).table(k_cap * k_cap)?;
    let sel = select_k_with(n, |k| {
        let s = (k * k).min(table.s_max());
        f_estimate(&table, s)
            .map(|f| f.value)
            .unwrap_or(f64::INFINITY)
    });
    Ok((sel, table))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub n: usize,
    pub k: usize,
    pub f_value: f64,
    pub h_value: f64,
    pub d_star: f64,
    pub n_d_star: f64,
    pub satisfied: bool,
    pub k_feasible: bool,
}

impl BoundCheck {
    /// Human-readable verdict. The bound is only claimed beyond an
    /// unspecified threshold `N₀`, so a miss is never reported as a violation.
    pub fn verdict(&self) -> &'static str {
        if self.satisfied {
            "satisfied"
        } else {
            "inconclusive (below unknown N0)"
        }
    }
}

pub fn bound_check(sample: &SequenceSample) -> Result<BoundCheck> {
    let (sel, _) = select_k(sample)?;
    let n = sample.len();
    let h_value = theorem_bound(n, sel.f_value)?;
    let disc = star_discrepancy_exact(sample)?;
    Ok(BoundCheck {
        n,
        k: sel.k,
        f_value: sel.f_value,
        h_value,
        d_star: disc.d_star,
        n_d_star: disc.n_d_star,
        satisfied: disc.n_d_star <= h_value,
        k_feasible: sel.feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> SequenceSample {
        SequenceSample::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn prefix_counts() {
        let s = sample(&[0.1, 0.5, 0.9]);
        assert_eq!(count_in_prefix_interval(&s, 0.0).unwrap(), 0);
        assert_eq!(count_in_prefix_interval(&s, 1.0).unwrap(), 3);
        assert_eq!(count_in_prefix_interval(&s, 0.5).unwrap(), 1);
        assert!(count_in_prefix_interval(&s, 1.5).is_err());
        assert!(count_in_prefix_interval(&s, -0.1).is_err());
    }

    #[test]
    fn single_point() {
        let r = star_discrepancy_exact(&sample(&[0.5])).unwrap();
        assert_eq!(r.d_star, 0.5);
        let oracle = star_discrepancy_grid_oracle(&sample(&[0.5]), 100_000).unwrap();
        assert!((oracle - 0.5).abs() < 1e-9);
    }

    #[test]
    fn lattices() {
        for n in [10usize, 100, 1000] {
            let left: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
            let centered: Vec<f64> = (0..n)
                .map(|i| (2 * i + 1) as f64 / (2 * n) as f64)
                .collect();
            let l = star_discrepancy_exact(&sample(&left)).unwrap();
            let c = star_discrepancy_exact(&sample(&centered)).unwrap();
            assert!((l.d_star - 1.0 / n as f64).abs() < 1e-12);
            assert!((c.d_star - 0.5 / n as f64).abs() < 1e-12);
        }
        let left: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let o = star_discrepancy_grid_oracle(&sample(&left), 1000).unwrap();
        assert!((o - 0.1).abs() < 1e-9);
    }

    #[test]
    fn witness_reproduces_supremum() {
        let s = sample(&[0.9, 0.1, 0.15, 0.7]);
        let r = star_discrepancy_exact(&s).unwrap();
        assert!((r.witness_deviation(&s) - r.d_star).abs() < 1e-15);
        // clustered low points: supremum approached from the right
        let s = sample(&[0.01, 0.02, 0.03]);
        let r = star_discrepancy_exact(&s).unwrap();
        assert_eq!(r.witness_side, WitnessSide::Right);
        assert_eq!(r.witness_a, 0.03);
        assert!((r.d_star - 0.97).abs() < 1e-15);
        // clustered high points: attained exactly at the first point
        let s = sample(&[0.97, 0.98, 0.99]);
        let r = star_discrepancy_exact(&s).unwrap();
        assert_eq!(r.witness_side, WitnessSide::Left);
        assert_eq!(r.witness_a, 0.97);
    }

    #[test]
    fn ties_pick_extreme_copies() {
        let s = sample(&[0.2, 0.2, 0.2, 0.9]);
        let r = star_discrepancy_exact(&s).unwrap();
        // just above 0.2 three of four points lie in [0, a)
        assert!((r.d_star - 0.55).abs() < 1e-15);
        assert!((r.witness_deviation(&s) - r.d_star).abs() < 1e-15);
    }

    #[test]
    fn oracle_rejects_coarse_grid() {
        let s = sample(&[0.1, 0.2, 0.3]);
        assert!(star_discrepancy_grid_oracle(&s, 2).is_err());
    }

    #[test]
    fn theorem_bound_examples() {
        let b = theorem_bound(100_000, 0.0).unwrap();
        assert!((b / 5e4 - 1.0).abs() < 1e-12);
        // sqrt(1e5 * 1e3) = 1e4 ties with N^{4/5}
        let b = theorem_bound(100_000, 0.01 * 100_000.0).unwrap();
        assert!((b / 5e4 - 1.0).abs() < 1e-12);
        let b1 = theorem_bound(1000, 1e4).unwrap();
        let b4 = theorem_bound(1000, 4e4).unwrap();
        assert!((b4 / b1 - 2.0).abs() < 1e-12);
        assert!(theorem_bound(10, -1.0).is_err());
        assert!(theorem_bound(0, 1.0).is_err());
    }

    #[test]
    fn k_bounds_are_exact() {
        assert_eq!(k_upper(100_000), 100);
        assert_eq!(k_lower_half(100_000), 50);
        assert_eq!(k_upper(32), 4);
        assert_eq!(k_lower_half(32), 2);
        assert_eq!(k_upper(1_000_000), 251);
        assert_eq!(k_lower_half(1_000_000), 126);
        for n in 1..5000usize {
            let n2 = (n as u128).pow(2);
            let ku = k_upper(n) as u128;
            assert!(ku.pow(5) <= n2 && (ku + 1).pow(5) > n2);
            let kl = k_lower_half(n) as u128;
            assert!((2 * kl).pow(5) >= n2 && (kl == 1 || (2 * kl - 2).pow(5) < n2));
        }
    }

    #[test]
    fn flat_deviation_selects_half_root() {
        let sel = select_k_with(100_000, |_| 0.01 * 100_000.0);
        assert_eq!(sel.k, 50);
        assert!(sel.feasible);
        // N/F = 1000 > N^{2/5}/2: only the half-root clause applies
        let sel = select_k_with(100_000, |_| 100.0);
        assert_eq!(sel.k, 50);
    }

    #[test]
    fn vanishing_deviation_treated_as_infinite_ratio() {
        let sel = select_k_with(100_000, |_| 0.0);
        assert_eq!(sel.k, k_lower_half(100_000));
        assert!(sel.feasible);
        assert!(!k_window_holds(100_000, 10, 0.0));
    }

    #[test]
    fn large_deviation_selects_one() {
        let sel = select_k_with(4096, |_| 4096.0);
        assert_eq!(sel.k, 1);
        assert!(sel.feasible);
    }

    #[test]
    fn window_rejects_large_k() {
        assert!(!k_window_holds(100_000, 101, 1e9));
        assert!(k_window_holds(100_000, 100, 1.0));
    }

    #[test]
    fn bound_check_needs_enough_points() {
        let s = sample(&[0.5; 31]);
        assert!(bound_check(&s).is_err());
    }

    #[test]
    fn lattice_bound_check() {
        let n = 64usize;
        let s = sample(&(0..n).map(|i| i as f64 / n as f64).collect::<Vec<_>>());
        let b = bound_check(&s).unwrap();
        assert_eq!(b.k, 1);
        assert!(b.k_feasible);
        assert_eq!(b.f_value, n as f64);
        assert!((b.h_value - 5.0 * n as f64).abs() < 1e-9);
        assert!((b.n_d_star - 1.0).abs() < 1e-12);
        assert!(b.satisfied);
        assert_eq!(b.verdict(), "satisfied");
    }
}
