//! The quantities of the discrepancy-bound argument evaluated on concrete
//! data: bin counts `A_i` of width `K/N`, circular window sums `G_i`, the
//! moments `Z_L` and `γ_L`, pair counts `𝓗_L`, the two-block minimizer and
//! the closing inequality chain.
//!
//! Indices are circular modulo `M = ⌊N/K⌋ + 1`, including the last bin
//! `[⌊N/K⌋·K/N, 1)`, which is kept (empty, zero width) when `K` divides `N`.

mod full;
mod minimizer;
mod report;

use serde::Serialize;

pub use full::{proof_report, MinimizerSection, ProofOptions, ProofReport, WindowSummary};
pub use minimizer::{
    minimizer_blocks, verify_minimizer, LiteralMinimum, MinimizerBlocks, MinimizerReport,
    OracleResult, PerturbationCheck,
};
pub use report::{final_chain_report, ChainReport, Link};

use crate::error::{Error, Result};
use crate::paircorr::{threshold, PairCounter};
use crate::sequences::SequenceSample;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinProfile {
    pub n: usize,
    pub k: usize,
    /// `A_0, …, A_⌊N/K⌋`.
    pub bins: Vec<u64>,
    pub bin_width: f64,
}

impl BinProfile {
    /// Number of bins `M = ⌊N/K⌋ + 1`.
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// `A_l` with `l` taken modulo `M`; negative `l` allowed.
    pub fn at(&self, l: i64) -> u64 {
        self.bins[l.rem_euclid(self.bins.len() as i64) as usize]
    }
}

/// `A_i = #{x ∈ [iK/N, (i+1)K/N)}`, the last bin taking `[⌊N/K⌋K/N, 1)`.
/// Bin membership is decided exactly, not by rounding `x·N/K`.
pub fn bin_counts(sample: &SequenceSample, k: usize) -> Result<BinProfile> {
    let n = sample.len();
    check_k(n, k)?;
    let last = n / k;
    let mut bins = vec![0u64; last + 1];
    for &x in sample.values() {
        bins[exact_bin(x, n, k).min(last)] += 1;
    }
    Ok(BinProfile {
        n,
        k,
        bins,
        bin_width: k as f64 / n as f64,
    })
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || 2 * k > n {
        return Err(Error::invalid(format!(
            "k must satisfy 1 <= k <= N/2, got k={k}, N={n}"
        )));
    }
    Ok(())
}

/// `⌊x·N/K⌋` in exact arithmetic for `x ∈ [0, 1)`.
fn exact_bin(x: f64, n: usize, k: usize) -> usize {
    if x <= 0.0 {
        return 0;
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if raw_exp == 0 {
        (frac_bits, -1074)
    } else {
        (frac_bits | (1u64 << 52), raw_exp - 1075)
    };
    // x = mant·2^exp with exp < 0; ⌊⌊mant·N/K⌋ / 2^-exp⌋ = ⌊mant·N/(K·2^-exp)⌋.
    let q = (mant as u128) * (n as u128) / (k as u128);
    let shift = (-exp) as u32;
    if shift >= 128 {
        0
    } else {
        (q >> shift) as usize
    }
}

/// `G_i = A_i + … + A_{i+L−1}` for `i = 0..M`, circularly.
pub fn window_sums(profile: &BinProfile, l: usize) -> Vec<u64> {
    let m = profile.len();
    let a = &profile.bins;
    let mut g = Vec::with_capacity(m);
    let mut cur: u64 = (0..l).map(|j| a[j % m]).sum();
    for i in 0..m {
        g.push(cur);
        cur = cur + a[(i + l) % m] - a[i];
    }
    g
}

/// `𝓗_L`: ordered pairs closer than `L·K/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HCount {
    pub value: u64,
    /// `L·K/N > 1/2`: every distinct pair is counted.
    pub saturated: bool,
}

pub fn h_count(sample: &SequenceSample, k: usize, l: usize) -> Result<HCount> {
    check_k(sample.len(), k)?;
    check_l(k, l)?;
    let counter = PairCounter::new(sample);
    h_count_with(&counter, k, l)
}

fn check_l(k: usize, l: usize) -> Result<()> {
    if l == 0 || l > k {
        return Err(Error::invalid(format!(
            "L must satisfy 1 <= L <= K={k}, got {l}"
        )));
    }
    Ok(())
}

fn h_count_with(counter: &PairCounter, k: usize, l: usize) -> Result<HCount> {
    let n = counter.n();
    Ok(HCount {
        value: counter.count_below(threshold(l * k, n))?,
        saturated: 2 * l * k > n,
    })
}

/// `𝓗_1..𝓗_K`, from one threshold table when `K² ≤ N/2`.
fn h_counts(counter: &PairCounter, k: usize) -> Result<Vec<HCount>> {
    let n = counter.n();
    if 2 * k * k <= n {
        let table = counter.table(k * k)?;
        return Ok((1..=k)
            .map(|l| HCount {
                value: table.counts()[l * k - 1],
                saturated: false,
            })
            .collect());
    }
    (1..=k).map(|l| h_count_with(counter, k, l)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowStats {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub g: Vec<u64>,
    /// `Σ G_i`, equal to `L·N`.
    pub g_sum: u64,
    /// `Z_L = Σ G_i² / (2LKN)`.
    pub z: f64,
    /// `γ_L` from its defining sum `Σ (G_i² − (A_{i+1}+…+A_{i+L−1})²) / (2LKN)`.
    pub gamma: f64,
    /// `Z_L − ((L−1)/L)·Z_{L−1}` (just `Z_1` at `L = 1`).
    pub gamma_telescoped: f64,
    /// `2LKN·γ_L − N`, an integer.
    #[serde(serialize_with = "crate::json::wide_int")]
    pub count_lower_bound: i128,
    pub h_count: u64,
    pub h_saturated: bool,
}

impl WindowStats {
    /// `𝓗_L ≥ 2LKN·γ_L − N`, compared in integers.
    pub fn count_inequality_holds(&self) -> bool {
        self.h_count as i128 >= self.count_lower_bound
    }

    /// Relative gap between the two evaluations of `γ_L`.
    pub fn telescoping_error(&self) -> f64 {
        let scale = self.gamma.abs().max(self.gamma_telescoped.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.gamma - self.gamma_telescoped).abs() / scale
        }
    }
}

pub fn window_stats(
    profile: &BinProfile,
    l: usize,
    sample: &SequenceSample,
) -> Result<WindowStats> {
    check_profile(profile, sample)?;
    check_l(profile.k, l)?;
    let counter = PairCounter::new(sample);
    let h = h_count_with(&counter, profile.k, l)?;
    Ok(stats_for(profile, l, h))
}

/// Window statistics for every `L = 1..=K`.
pub fn window_series(profile: &BinProfile, sample: &SequenceSample) -> Result<Vec<WindowStats>> {
    check_profile(profile, sample)?;
    let counter = PairCounter::new(sample);
    let hs = h_counts(&counter, profile.k)?;
    Ok((1..=profile.k)
        .zip(hs)
        .map(|(l, h)| stats_for(profile, l, h))
        .collect())
}

fn check_profile(profile: &BinProfile, sample: &SequenceSample) -> Result<()> {
    if profile.n != sample.len() || profile.bins.iter().sum::<u64>() != sample.len() as u64 {
        return Err(Error::invalid("profile does not belong to this sample"));
    }
    check_k(profile.n, profile.k)
}

fn sum_sq(g: &[u64]) -> u128 {
    g.iter().map(|&v| (v as u128) * (v as u128)).sum()
}

fn stats_for(profile: &BinProfile, l: usize, h: HCount) -> WindowStats {
    let (n, k) = (profile.n, profile.k);
    let g = window_sums(profile, l);
    let prev = window_sums(profile, l - 1);
    let m = g.len();

    let sq = sum_sq(&g);
    // Σ_i (G_i² − G'_{i+1}²) with G' the windows of length L − 1.
    let defining: i128 = (0..m)
        .map(|i| {
            let a = g[i] as i128;
            let b = prev[(i + 1) % m] as i128;
            a * a - b * b
        })
        .sum();

    let denom = |len: usize| (2 * len * k) as f64 * n as f64;
    let z = sq as f64 / denom(l);
    let gamma = defining as f64 / denom(l);
    let gamma_telescoped = if l == 1 {
        z
    } else {
        let z_prev = sum_sq(&prev) as f64 / denom(l - 1);
        z - (l - 1) as f64 / l as f64 * z_prev
    };

    WindowStats {
        n,
        k,
        l,
        g_sum: g.iter().sum(),
        g,
        z,
        gamma,
        gamma_telescoped,
        count_lower_bound: defining - n as i128,
        h_count: h.value,
        h_saturated: h.saturated,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainBound {
    /// `max(Z_1, Z_2 − Z_1/2, …, Z_K − ((K−1)/K)·Z_{K−1})`.
    pub max_term: f64,
    /// `L` attaining `max_term` (first on ties).
    pub arg_l: usize,
    /// `2·Z_K/(K+1)`.
    pub bound: f64,
    pub holds: bool,
}

/// Evaluates the succession argument on `Z_1..Z_K`.
pub fn chain_lower_bound(z: &[f64]) -> Result<ChainBound> {
    if z.is_empty() {
        return Err(Error::invalid("need at least one Z value"));
    }
    if let Some(bad) = z.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "Z values must be finite, got {bad}"
        )));
    }
    let k = z.len();
    let mut max_term = z[0];
    let mut arg_l = 1;
    for l in 2..=k {
        let t = z[l - 1] - (l - 1) as f64 / l as f64 * z[l - 2];
        if t > max_term {
            max_term = t;
            arg_l = l;
        }
    }
    let bound = 2.0 * z[k - 1] / (k + 1) as f64;
    Ok(ChainBound {
        max_term,
        arg_l,
        bound,
        holds: max_term >= bound,
    })
}
