//! The closing inequality chain evaluated on one sample.

use serde::Serialize;

use super::{
    bin_counts, chain_lower_bound, exact_bin, stats_for, window_sums, BinProfile, HCount,
    WindowStats,
};
use crate::discrepancy::{k_window_holds, star_discrepancy_exact, theorem_bound, MIN_BOUND_N};
use crate::error::{Error, Result};
use crate::paircorr::{f_estimate, PairCounter};
use crate::sequences::SequenceSample;

/// Relative slack for real-valued links that hold exactly in real arithmetic.
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// One of `<`, `<=`, `>=`, `=`.
    pub relation: &'static str,
    pub holds: bool,
    /// True for links that follow from definitions or the `K` window and so
    /// must hold on every sample. The others are the counterfactual steps of
    /// the contradiction argument and the asymptotic estimate.
    pub guaranteed: bool,
}

impl Link {
    pub(super) fn new(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        relation: &'static str,
        guaranteed: bool,
    ) -> Self {
        let tol = REL_TOL * lhs.abs().max(rhs.abs());
        let holds = match relation {
            "<" => lhs < rhs,
            "<=" => lhs <= rhs + tol,
            ">=" => lhs + tol >= rhs,
            _ => (lhs - rhs).abs() <= tol,
        };
        Link {
            name: name.into(),
            lhs,
            rhs,
            relation,
            holds,
            guaranteed,
        }
    }

    pub(super) fn exact(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        relation: &'static str,
        holds: bool,
    ) -> Self {
        Link {
            name: name.into(),
            lhs,
            rhs,
            relation,
            holds,
            guaranteed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub k: usize,
    /// `F(K², N)` estimated from the sample.
    pub f_value: f64,
    /// `H(N, K)`
    pub h_value: f64,
    pub n_d_star: f64,
    /// Witness endpoint `B` of the star discrepancy.
    pub witness_b: f64,
    /// `A_N([0, B)) − NB`
    pub witness_excess: f64,
    pub z: Vec<f64>,
    pub gamma: Vec<f64>,
    pub h_counts: Vec<u64>,
    pub links: Vec<Link>,
}

impl ChainReport {
    pub fn guaranteed_links_hold(&self) -> bool {
        self.links.iter().filter(|l| l.guaranteed).all(|l| l.holds)
    }

    pub fn link(&self, name: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.name == name)
    }
}

pub fn final_chain_report(sample: &SequenceSample, k: usize) -> Result<ChainReport> {
    chain_with_stats(sample, k).map(|(report, _, _)| report)
}

/// The chain report together with the profile and window statistics it
/// was built from.
pub(super) fn chain_with_stats(
    sample: &SequenceSample,
    k: usize,
) -> Result<(ChainReport, BinProfile, Vec<WindowStats>)> {
    let n = sample.len();
    if n < MIN_BOUND_N {
        return Err(Error::invalid(format!(
            "chain report needs N >= {MIN_BOUND_N}, got {n}"
        )));
    }
    if k == 0 || 2 * k * k > n {
        return Err(Error::Infeasible(format!(
            "K={k} needs 1 <= K and 2K^2 <= N={n}"
        )));
    }
    let table = PairCounter::new(sample).table(k * k)?;
    let f = f_estimate(&table, k * k)?.value;
    if !k_window_holds(n, k, f) {
        return Err(Error::Infeasible(format!(
            "K={k} is outside min(N^(2/5)/2, N/F) <= K <= N^(2/5) with N={n}, F={f}"
        )));
    }
    let h = theorem_bound(n, f)?;
    let disc = star_discrepancy_exact(sample)?;
    let b = disc.witness_a;
    let (nf, kf) = (n as f64, k as f64);

    let profile = bin_counts(sample, k)?;
    let stats: Vec<_> = (1..=k)
        .map(|l| {
            let hc = HCount {
                value: table.counts()[l * k - 1],
                saturated: false,
            };
            stats_for(&profile, l, hc)
        })
        .collect();

    let mut links = Vec::new();
    links.push(Link::new(
        "k_squared_le_h_over_5",
        kf * kf,
        h / 5.0,
        "<=",
        true,
    ));

    for w in &stats {
        let l = w.l;
        let dev = table.deviation(l * k)?;
        links.push(Link::new(format!("relation_hf L={l}"), dev, f, "<=", true));
    }
    for w in &stats {
        let l = w.l as f64;
        let ratio = w.h_count as f64 / (2.0 * l * kf * nf);
        links.push(Link::exact(
            format!("count_lower_bound L={}", w.l),
            ratio,
            w.gamma - 1.0 / (2.0 * l * kf),
            ">=",
            w.count_inequality_holds(),
        ));
    }

    let z: Vec<f64> = stats.iter().map(|w| w.z).collect();
    let chain = chain_lower_bound(&z)?;
    links.push(Link::new(
        "chain_bound",
        chain.max_term,
        chain.bound,
        ">=",
        true,
    ));

    let max_ratio = stats
        .iter()
        .map(|w| w.h_count as f64 / (2.0 * (w.l * k) as f64 * nf))
        .fold(f64::NEG_INFINITY, f64::max);
    let max_gamma = stats
        .iter()
        .map(|w| w.gamma)
        .fold(f64::NEG_INFINITY, f64::max);
    links.push(Link::new(
        "max_ratio_vs_gamma",
        max_ratio,
        max_gamma - 1.0 / (2.0 * kf),
        ">=",
        true,
    ));
    links.push(Link::new(
        "f_bounds_max_ratio",
        f / nf + 1.0,
        max_ratio,
        ">=",
        true,
    ));

    // The bins 0..⌊NB/K⌋ cover [0, B), and the windows −K+1..⌊NB/K⌋ cover
    // each of those bins K times.
    let below_b = sample.values().iter().filter(|&&x| x < b).count() as u64;
    let j = exact_bin(b, n, k).min(profile.len() - 1) as i64;
    let bins_sum: u64 = (0..=j).map(|i| profile.at(i)).sum();
    links.push(Link::exact(
        "bins_cover_witness",
        bins_sum as f64,
        below_b as f64,
        ">=",
        bins_sum >= below_b,
    ));
    let g = window_sums(&profile, k);
    let m = g.len() as i64;
    let g_sum: u64 = (-(k as i64) + 1..=j)
        .map(|i| g[i.rem_euclid(m) as usize])
        .sum();
    links.push(Link::exact(
        "block_sum_cover",
        g_sum as f64,
        (k as u64 * bins_sum) as f64,
        ">=",
        g_sum >= k as u64 * bins_sum,
    ));

    links.push(Link::new("n_d_star_le_h", disc.n_d_star, h, "<=", false));

    // Block objective against its claimed asymptotic floor, with B the witness.
    let nb_bins = (nf * b / kf).floor();
    let lc = kf + nb_bins;
    let hc = (n / k) as f64 - kf - nb_bins;
    let block_value = if hc > 0.0 {
        (kf * kf * (nf * b + h).powi(2) / lc + kf * kf * (nf * (1.0 - b) - h).powi(2) / hc)
            / (2.0 * kf * kf * nf)
    } else {
        f64::NAN
    };
    let floor = kf / 2.0 * (1.0 + h * h / (2.0 * nf * nf));
    links.push(Link::new(
        "block_objective_vs_floor",
        block_value,
        floor,
        ">=",
        false,
    ));

    let a_term = nf * nf / kf;
    let b_term = nf * f;
    let n85 = nf.powf(1.6);
    links.push(Link::new(
        "h_sq_lt_8a_plus_4b",
        h * h,
        8.0 * a_term + 4.0 * b_term,
        "<",
        false,
    ));
    links.push(Link::new(
        "8a_plus_4b_le_12max",
        8.0 * a_term + 4.0 * b_term,
        12.0 * a_term.max(b_term),
        "<=",
        true,
    ));
    links.push(Link::new(
        "12max_lt_25max",
        12.0 * a_term.max(b_term),
        25.0 * n85.max(b_term),
        "<",
        true,
    ));
    links.push(Link::new(
        "25max_eq_h_sq",
        25.0 * n85.max(b_term),
        h * h,
        "=",
        true,
    ));

    let report = ChainReport {
        n,
        k,
        f_value: f,
        h_value: h,
        n_d_star: disc.n_d_star,
        witness_b: b,
        witness_excess: below_b as f64 - nf * b,
        gamma: stats.iter().map(|w| w.gamma).collect(),
        h_counts: stats.iter().map(|w| w.h_count).collect(),
        z,
        links,
    };
    Ok((report, profile, stats))
}
