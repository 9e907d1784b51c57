//! Everything in one report: bins, window identities, the chain bound, the
//! block minimizer and the closing chain.

use serde::Serialize;

use super::report::{chain_with_stats, ChainReport, Link};
use super::{chain_lower_bound, verify_minimizer, BinProfile, ChainBound, MinimizerReport};
use crate::discrepancy::select_k;
use crate::error::{Error, Result};
use crate::sequences::SequenceSample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofOptions {
    /// Bin width multiplier; the smallest admissible `K` when `None`.
    pub k: Option<usize>,
    /// Minimizer `B`; the star-discrepancy witness when `None`.
    pub b: Option<f64>,
    /// Minimizer `H`; `H(N, K)` when `None`.
    pub h: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ProofOptions {
    fn default() -> Self {
        ProofOptions {
            k: None,
            b: None,
            h: None,
            trials: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSummary {
    pub l: usize,
    pub g_sum: u64,
    pub z: f64,
    pub gamma: f64,
    pub gamma_telescoped: f64,
    pub telescoping_error: f64,
    pub h_count: u64,
    #[serde(serialize_with = "crate::json::wide_int")]
    pub count_lower_bound: i128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerSection {
    pub b: f64,
    pub h: f64,
    /// Why the minimizer was not run, when its preconditions fail.
    pub infeasible: Option<String>,
    pub report: Option<MinimizerReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofReport {
    pub n: usize,
    pub k: usize,
    pub profile: BinProfile,
    pub windows: Vec<WindowSummary>,
    pub chain: ChainBound,
    pub minimizer: MinimizerSection,
    pub final_chain: ChainReport,
    /// Every checked relation, guaranteed or not.
    pub identities: Vec<Link>,
    pub guaranteed_hold: bool,
}

pub fn proof_report(sample: &SequenceSample, opts: &ProofOptions) -> Result<ProofReport> {
    let k = match opts.k {
        Some(k) => k,
        None => select_k(sample)?.0.k,
    };
    let (final_chain, profile, stats) = chain_with_stats(sample, k)?;
    let n = sample.len();

    let mut identities = Vec::new();
    for w in &stats {
        identities.push(Link::exact(
            format!("window_sum L={}", w.l),
            w.g_sum as f64,
            (w.l * n) as f64,
            "=",
            w.g_sum == (w.l * n) as u64,
        ));
        identities.push(Link::new(
            format!("telescoping L={}", w.l),
            w.gamma,
            w.gamma_telescoped,
            "=",
            true,
        ));
    }
    let z: Vec<f64> = stats.iter().map(|w| w.z).collect();
    let chain = chain_lower_bound(&z)?;

    let b = opts.b.unwrap_or(final_chain.witness_b);
    let h = opts.h.unwrap_or(final_chain.h_value);
    let minimizer = match verify_minimizer(n, k, b, h, opts.trials, opts.seed) {
        Ok(r) => {
            identities.push(Link::exact(
                "minimizer_counterexamples",
                r.counterexamples as f64,
                0.0,
                "=",
                r.counterexamples == 0,
            ));
            let worst = r.oracle.max_rel_error_low.max(r.oracle.max_rel_error_high);
            identities.push(Link::exact(
                "projection_oracle_error",
                worst,
                1e-6,
                "<=",
                r.oracle.converged,
            ));
            if let Some(p) = r.perturbation {
                identities.push(Link::exact(
                    "perturbation_two_delta_squared",
                    p.increase,
                    p.expected,
                    "=",
                    p.holds,
                ));
            }
            MinimizerSection {
                b,
                h,
                infeasible: None,
                report: Some(r),
            }
        }
        Err(Error::Infeasible(msg)) => MinimizerSection {
            b,
            h,
            infeasible: Some(msg),
            report: None,
        },
        Err(e) => return Err(e),
    };
    identities.extend(final_chain.links.iter().cloned());

    let windows = stats
        .iter()
        .map(|w| WindowSummary {
            l: w.l,
            g_sum: w.g_sum,
            z: w.z,
            gamma: w.gamma,
            gamma_telescoped: w.gamma_telescoped,
            telescoping_error: w.telescoping_error(),
            h_count: w.h_count,
            count_lower_bound: w.count_lower_bound,
        })
        .collect();
    let guaranteed_hold = identities.iter().filter(|l| l.guaranteed).all(|l| l.holds);
    Ok(ProofReport {
        n,
        k,
        profile,
        windows,
        chain,
        minimizer,
        final_chain,
        identities,
        guaranteed_hold,
    })
}
