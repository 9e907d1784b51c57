//! The two-block minimizer of `Σ G_i²` and its numerical verification.
//!
//! With `lc = K + ⌊NB/K⌋` lower indices `−K+1..⌊NB/K⌋` and
//! `hc = ⌊N/K⌋ − K − ⌊NB/K⌋` upper indices `⌊NB/K⌋+1..⌊N/K⌋−K`, the
//! constraints are `Σ G = KN`, lower sum `≥ K(NB + H)` and upper sum
//! `≤ K(N(1−B) − H)`. These two blocks cover `⌊N/K⌋` of the `⌊N/K⌋ + 1`
//! circular indices; the remaining index `⌊N/K⌋ − K + 1` is pinned to zero
//! for the main check. [`LiteralMinimum`] reports what happens when it is
//! left free as well.

use rand_core::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequences::{seeded_rng, unit_f64};

/// Relative tolerance for comparing objectives and constraint sums.
const REL_TOL: f64 = 1e-12;
/// Required agreement between the projection oracle and the block values.
const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizerBlocks {
    pub n: usize,
    pub k: usize,
    pub b: f64,
    pub h: f64,
    pub low_count: usize,
    pub high_count: usize,
    /// `K(NB + H)/(K + ⌊NB/K⌋)`
    pub g_low: f64,
    /// `K(N(1−B) − H)/(⌊N/K⌋ − K − ⌊NB/K⌋)`
    pub g_high: f64,
    /// `K(NB + H)`
    pub low_sum: f64,
    /// `K(N(1−B) − H)`
    pub high_sum: f64,
    /// `low_count·g_low² + high_count·g_high²`
    pub objective: f64,
    /// `g_low ≥ g_high`. Otherwise the lower-sum constraint is slack and the
    /// even spread `KN/(lc + hc)` does better than the blocks.
    pub constraint_active: bool,
}

pub fn minimizer_blocks(n: usize, k: usize, b: f64, h: f64) -> Result<MinimizerBlocks> {
    if n == 0 || k == 0 {
        return Err(Error::invalid(format!(
            "need N >= 1 and K >= 1, got N={n}, K={k}"
        )));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::Infeasible(format!("B must lie in (0, 1), got {b}")));
    }
    if !h.is_finite() {
        return Err(Error::invalid(format!("H must be finite, got {h}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let nb = nf * b;
    let slack = nf - nb - h;
    if slack <= 0.0 {
        return Err(Error::Infeasible(format!(
            "N - NB - H > 0 fails: N - NB - H = {slack}"
        )));
    }
    if kf * kf > h / 5.0 {
        return Err(Error::Infeasible(format!(
            "K^2 <= H/5 fails: K^2 = {}, H/5 = {}",
            kf * kf,
            h / 5.0
        )));
    }
    let nb_bins = (nb / kf).floor() as usize;
    let low_count = k + nb_bins;
    let high_count = match (n / k).checked_sub(k + nb_bins) {
        Some(c) if c > 0 => c,
        _ => {
            return Err(Error::Infeasible(format!(
                "upper block is empty: floor(N/K) - K - floor(NB/K) = {} - {} - {} <= 0",
                n / k,
                k,
                nb_bins
            )))
        }
    };
    let low_sum = kf * (nb + h);
    let high_sum = kf * slack;
    let g_low = low_sum / low_count as f64;
    let g_high = high_sum / high_count as f64;
    Ok(MinimizerBlocks {
        n,
        k,
        b,
        h,
        low_count,
        high_count,
        g_low,
        g_high,
        low_sum,
        high_sum,
        objective: low_count as f64 * g_low * g_low + high_count as f64 * g_high * g_high,
        constraint_active: g_low >= g_high,
    })
}

impl MinimizerBlocks {
    fn total(&self) -> f64 {
        (self.k * self.n) as f64
    }

    /// The block configuration on the two-block support.
    pub fn configuration(&self) -> Vec<f64> {
        let mut g = vec![self.g_low; self.low_count];
        g.resize(self.low_count + self.high_count, self.g_high);
        g
    }

    fn feasible(&self, g: &[f64]) -> bool {
        let total = self.total();
        let sum: f64 = g.iter().sum();
        let low: f64 = g[..self.low_count].iter().sum();
        g.iter().all(|&v| v > 0.0)
            && (sum - total).abs() <= REL_TOL * total
            && low >= self.low_sum * (1.0 - REL_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub dimension: usize,
    pub iterations: usize,
    pub objective: f64,
    pub max_rel_error_low: f64,
    pub max_rel_error_high: f64,
    /// Both errors within `1e−6`.
    pub converged: bool,
}

/// The minimum when the index outside both blocks is also a free variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiteralMinimum {
    pub dimension: usize,
    /// `low_sum²/lc + high_sum²/(hc + 1)`.
    pub closed_form: f64,
    pub oracle: f64,
    /// `(objective − closed_form)/objective`, positive: the block objective
    /// is not the minimum over all `⌊N/K⌋ + 1` indices.
    pub relative_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationCheck {
    pub delta: f64,
    pub increase: f64,
    /// `2δ²`
    pub expected: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerReport {
    pub blocks: MinimizerBlocks,
    pub trials: usize,
    pub seed: u64,
    /// Feasible vectors whose objective is below the block objective.
    pub counterexamples: usize,
    /// Generated vectors rejected by the floating-point feasibility check.
    pub rejected: usize,
    /// Smallest `(Σ G_i² − objective)/objective` over the trials.
    pub min_relative_margin: f64,
    /// The same margin for the block configuration itself.
    pub self_margin: f64,
    pub oracle: OracleResult,
    pub literal: LiteralMinimum,
    pub perturbation: Option<PerturbationCheck>,
}

impl MinimizerReport {
    pub fn passed(&self) -> bool {
        self.counterexamples == 0
            && self.oracle.converged
            && self.perturbation.is_none_or(|p| p.holds)
    }
}

/// Samples `trials` random feasible vectors on the two-block support, runs
/// the projection oracle, and checks the `2δ²` perturbation identity.
pub fn verify_minimizer(
    n: usize,
    k: usize,
    b: f64,
    h: f64,
    trials: usize,
    seed: u64,
) -> Result<MinimizerReport> {
    let blocks = minimizer_blocks(n, k, b, h)?;
    let obj = blocks.objective;
    let margin = |g: &[f64]| (sum_sq(g) - obj) / obj;

    let run = |trial: usize| -> Outcome {
        let g = random_feasible(&blocks, trial, seed);
        if !blocks.feasible(&g) {
            return Outcome {
                rejected: 1,
                ..Outcome::EMPTY
            };
        }
        let m = margin(&g);
        Outcome {
            counterexamples: usize::from(m < -REL_TOL),
            rejected: 0,
            min_margin: m,
        }
    };
    #[cfg(feature = "parallel")]
    let outcome = {
        use rayon::prelude::*;
        (0..trials)
            .into_par_iter()
            .map(run)
            .reduce(|| Outcome::EMPTY, Outcome::merge)
    };
    #[cfg(not(feature = "parallel"))]
    let outcome = (0..trials).map(run).fold(Outcome::EMPTY, Outcome::merge);

    let oracle = run_oracle(&blocks);
    let literal = literal_minimum(&blocks);
    Ok(MinimizerReport {
        blocks,
        trials,
        seed,
        counterexamples: outcome.counterexamples,
        rejected: outcome.rejected,
        min_relative_margin: outcome.min_margin,
        self_margin: margin(&blocks.configuration()),
        oracle,
        literal,
        perturbation: perturbation_check(&blocks),
    })
}

#[derive(Clone, Copy)]
struct Outcome {
    counterexamples: usize,
    rejected: usize,
    min_margin: f64,
}

impl Outcome {
    const EMPTY: Outcome = Outcome {
        counterexamples: 0,
        rejected: 0,
        min_margin: f64::INFINITY,
    };

    fn merge(a: Outcome, b: Outcome) -> Outcome {
        Outcome {
            counterexamples: a.counterexamples + b.counterexamples,
            rejected: a.rejected + b.rejected,
            min_margin: a.min_margin.min(b.min_margin),
        }
    }
}

fn sum_sq(g: &[f64]) -> f64 {
    g.iter().map(|v| v * v).sum()
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Positive weights summing to one (a flat Dirichlet draw).
fn simplex(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..len)
        .map(|_| -(1.0 - unit_f64(rng.next_u64())).ln())
        .collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// Zero-mean noise in `[−2, 2]`.
fn centered_noise(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let u: Vec<f64> = (0..len)
        .map(|_| 2.0 * unit_f64(rng.next_u64()) - 1.0)
        .collect();
    let mean = u.iter().sum::<f64>() / len as f64;
    u.into_iter().map(|v| v - mean).collect()
}

/// Trials cycle through spread-out draws, draws with the lower constraint
/// tight, and small perturbations of the block configuration at scales
/// `10^-1..10^-6`.
fn random_feasible(blocks: &MinimizerBlocks, trial: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded_rng(trial_seed(seed, trial));
    let (lc, hc) = (blocks.low_count, blocks.high_count);
    let total = blocks.total();
    let spread = |rng: &mut _, low: f64| {
        let mut g: Vec<f64> = simplex(rng, lc).into_iter().map(|w| w * low).collect();
        g.extend(simplex(rng, hc).into_iter().map(|w| w * (total - low)));
        g
    };
    match trial % 4 {
        0 => {
            let u = unit_f64(rng.next_u64());
            let low = blocks.low_sum + (total - blocks.low_sum) * u * 0.999;
            spread(&mut rng, low)
        }
        1 => spread(&mut rng, blocks.low_sum),
        _ => {
            let scale = 10f64.powi(-1 - ((trial / 4) % 6) as i32);
            let shift = scale * unit_f64(rng.next_u64()) * blocks.high_sum * 0.5;
            let mut g: Vec<f64> = centered_noise(&mut rng, lc)
                .into_iter()
                .map(|e| blocks.g_low * (1.0 + scale * e) + shift / lc as f64)
                .collect();
            g.extend(
                centered_noise(&mut rng, hc)
                    .into_iter()
                    .map(|e| blocks.g_high * (1.0 + scale * e) - shift / hc as f64),
            );
            g
        }
    }
}

/// Minimum-norm point of `{G ≥ 0, Σ G = total, Σ_{i<low} G_i ≥ low_sum}`.
/// Dykstra's alternating projections get close; pairwise mass transfers
/// (each the exact minimizer along its feasible segment) finish the descent.
fn min_norm_point(dim: usize, low: usize, total: f64, low_sum: f64) -> (Vec<f64>, usize) {
    let scale = total / dim as f64;
    let mut x = vec![0.0; dim];
    let mut incr = vec![vec![0.0; dim]; 3];
    let mut iterations = 0;
    for it in 1..=100_000 {
        iterations = it;
        let prev = x.clone();
        for (set, p) in incr.iter_mut().enumerate() {
            let mut y: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a + b).collect();
            let before = y.clone();
            match set {
                0 => {
                    let shift = (y.iter().sum::<f64>() - total) / dim as f64;
                    y.iter_mut().for_each(|v| *v -= shift);
                }
                1 => {
                    let s: f64 = y[..low].iter().sum();
                    if s < low_sum {
                        let add = (low_sum - s) / low as f64;
                        y[..low].iter_mut().for_each(|v| *v += add);
                    }
                }
                _ => y.iter_mut().for_each(|v| *v = v.max(0.0)),
            }
            for i in 0..dim {
                p[i] = before[i] - y[i];
            }
            x = y;
        }
        let change = x
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change <= 1e-15 * scale {
            break;
        }
    }

    // Restore exact feasibility before the descent.
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    let s_low: f64 = x[..low].iter().sum();
    if s_low < low_sum {
        let add = (low_sum - s_low) / low as f64;
        x[..low].iter_mut().for_each(|v| *v += add);
    }
    let rest: f64 = x[low..].iter().sum();
    let target = total - x[..low].iter().sum::<f64>();
    if rest > 0.0 {
        x[low..].iter_mut().for_each(|v| *v *= target / rest);
    } else {
        let each = target / (dim - low) as f64;
        x[low..].iter_mut().for_each(|v| *v = each);
    }

    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                if i == j || x[i] <= x[j] {
                    continue;
                }
                let mut t = (x[i] - x[j]) / 2.0;
                if i < low && j >= low {
                    let s_low: f64 = x[..low].iter().sum();
                    t = t.min((s_low - low_sum).max(0.0));
                }
                if t > 0.0 {
                    x[i] -= t;
                    x[j] += t;
                    moved = moved.max(t);
                }
            }
        }
        if moved <= 1e-15 * scale {
            break;
        }
    }
    (x, iterations)
}

fn run_oracle(blocks: &MinimizerBlocks) -> OracleResult {
    let dim = blocks.low_count + blocks.high_count;
    let (x, iterations) = min_norm_point(dim, blocks.low_count, blocks.total(), blocks.low_sum);
    let rel = |v: &[f64], target: f64| {
        v.iter()
            .map(|g| (g - target).abs() / target)
            .fold(0.0, f64::max)
    };
    let max_rel_error_low = rel(&x[..blocks.low_count], blocks.g_low);
    let max_rel_error_high = rel(&x[blocks.low_count..], blocks.g_high);
    OracleResult {
        dimension: dim,
        iterations,
        objective: sum_sq(&x),
        max_rel_error_low,
        max_rel_error_high,
        converged: max_rel_error_low <= ORACLE_TOL && max_rel_error_high <= ORACLE_TOL,
    }
}

fn literal_minimum(blocks: &MinimizerBlocks) -> LiteralMinimum {
    let dim = blocks.low_count + blocks.high_count + 1;
    let (x, _) = min_norm_point(dim, blocks.low_count, blocks.total(), blocks.low_sum);
    let lc = blocks.low_count as f64;
    let rest = (blocks.high_count + 1) as f64;
    let closed_form = if blocks.constraint_active {
        blocks.low_sum.powi(2) / lc + blocks.high_sum.powi(2) / rest
    } else {
        blocks.total().powi(2) / dim as f64
    };
    LiteralMinimum {
        dimension: dim,
        closed_form,
        oracle: sum_sq(&x),
        relative_gap: (blocks.objective - closed_form) / blocks.objective,
    }
}

/// Moves `δ` between two entries of one block; the objective must
/// rise by exactly `2δ²`.
fn perturbation_check(blocks: &MinimizerBlocks) -> Option<PerturbationCheck> {
    let (start, g) = if blocks.low_count >= 2 {
        (0, blocks.g_low)
    } else if blocks.high_count >= 2 {
        (blocks.low_count, blocks.g_high)
    } else {
        return None;
    };
    let delta = g / 4.0;
    let base = blocks.configuration();
    let mut moved = base.clone();
    moved[start] += delta;
    moved[start + 1] -= delta;
    let increase = sum_sq(&moved) - sum_sq(&base);
    let expected = 2.0 * delta * delta;
    Some(PerturbationCheck {
        delta,
        increase,
        expected,
        holds: (increase - expected).abs() <= 1e-9 * expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_example() {
        let m = minimizer_blocks(100_000, 100, 0.1, 50_000.0).unwrap();
        assert_eq!((m.low_count, m.high_count), (200, 800));
        assert!((m.g_low - 30_000.0).abs() < 1e-9);
        assert!((m.g_high - 5_000.0).abs() < 1e-9);
        assert!(m.constraint_active);
    }

    #[test]
    fn infeasible_inputs_name_the_condition() {
        let msg = |r: Result<MinimizerBlocks>| match r {
            Err(Error::Infeasible(m)) => m,
            other => panic!("expected infeasible, got {other:?}"),
        };
        assert!(msg(minimizer_blocks(1000, 2, 0.5, 500.0)).contains("N - NB - H"));
        assert!(msg(minimizer_blocks(1000, 10, 0.1, 400.0)).contains("K^2 <= H/5"));
        assert!(msg(minimizer_blocks(1000, 2, 0.0, 100.0)).contains("(0, 1)"));
        assert!(msg(minimizer_blocks(1000, 2, 1.0, 100.0)).contains("(0, 1)"));
    }

    #[test]
    fn small_case_passes() {
        let r = verify_minimizer(150, 5, 0.1, 125.0, 2000, 1).unwrap();
        assert_eq!((r.blocks.low_count, r.blocks.high_count), (8, 22));
        assert_eq!(r.blocks.g_low, 87.5);
        assert_eq!(r.rejected, 0);
        assert!(r.passed(), "{r:?}");
        assert!(r.self_margin.abs() <= 1e-15);
        assert!(r.min_relative_margin >= 0.0);
        assert!(r.literal.relative_gap > 0.0);
        assert!((r.literal.oracle - r.literal.closed_form).abs() <= 1e-9 * r.literal.closed_form);
    }

    #[test]
    fn perturbation_is_two_delta_squared() {
        let m = minimizer_blocks(150, 5, 0.1, 125.0).unwrap();
        let p = perturbation_check(&m).unwrap();
        assert!(p.holds);
        assert_eq!(p.expected, 2.0 * p.delta * p.delta);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = verify_minimizer(150, 5, 0.1, 125.0, 500, 9).unwrap();
        let b = verify_minimizer(150, 5, 0.1, 125.0, 500, 9).unwrap();
        assert_eq!(a, b);
    }
}
