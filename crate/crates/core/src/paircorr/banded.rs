//! Banded counting for large threshold ranges.
//!
//! Points of the sorted sample are placed in `N·R` fine bins (`R` per
//! threshold step `1/N`). For a sorted pair `i < j` at fine offset
//! `M = F_j − F_i` the scaled gap `N·(x_j − x_i)` lies in `((M−1)/R, (M+1)/R)`
//! up to rounding far below one bin, so the double comparison
//! `x_j − x_i < s/N` is settled by `M` alone unless `M ∈ {sR−1, sR, sR+1}`.
//!
//! Settled pairs are counted in bulk: with `F = bR + ℓ` the number of ordered
//! pairs with `M ∈ [kR, kR+R)` is the bin-offset-`k` correlation of level `ℓ`
//! against levels `≥ ℓ`, plus the offset-`k+1` correlation against levels
//! `< ℓ`, summed over `ℓ`. All of it collapses into one spectrum, so the cost
//! is `R + 2` FFTs of length `~N`. Pairs with `M mod R ∈ {R−1, 0, 1}` live in
//! three residue classes and are enumerated (about `3NS/R` of them) and
//! tested with the exact predicate.
//!
//! Pairs that wrap around `0 ≡ 1` only occur between the `O(S)` points next
//! to either end and are bucketed directly.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Largest padded FFT length attempted (keeps memory around 800 MB).
const MAX_FFT_LEN: usize = 1 << 23;

/// Fine-bin resolution balancing FFT work against enumeration.
pub(super) fn resolution_for(s_max: usize) -> usize {
    ((s_max as f64).sqrt().round() as usize).clamp(4, 256)
}

/// Counts `2·(near(s) + far(s))` for `s = 1..=s_max`, or `None` when the
/// transform would be too large or too inaccurate to round exactly.
pub(super) fn table(sorted: &[f64], s_max: usize, resolution: usize) -> Option<Vec<u64>> {
    let n = sorted.len();
    let r = resolution.max(3);
    let fft_len = (n + s_max + 2).next_power_of_two();
    if fft_len > MAX_FFT_LEN || (n as u128) * (r as u128) >= 1u128 << 48 {
        return None;
    }
    let thr: Vec<f64> = (0..=s_max + 1).map(|s| super::threshold(s, n)).collect();

    let fine_len = (n * r) as u64;
    let scale = fine_len as f64;
    let fine: Vec<u64> = sorted
        .iter()
        .map(|&x| ((x * scale).floor() as u64).min(fine_len - 1))
        .collect();

    let blocks = block_counts(&fine, r, s_max, fft_len)?;

    // ordered pairs (including self pairs) sharing a fine bin
    let mut same_bin = 0u64;
    let mut run = 0u64;
    for i in 0..n {
        if i > 0 && fine[i] == fine[i - 1] {
            run += 1;
        } else {
            same_bin += run * run;
            run = 1;
        }
    }
    same_bin += run * run;

    let (minus, plus) = boundary_pairs(sorted, &fine, r, s_max, &thr);
    let far = wrapped_pairs(sorted, s_max, &thr);

    let base = (same_bin + n as u64) / 2;
    let mut out = Vec::with_capacity(s_max);
    let mut cumulative = 0u64;
    let mut far_cum = 0u64;
    for s in 1..=s_max {
        cumulative += blocks[s - 1];
        far_cum += far[s];
        let near = cumulative - base - minus[s] + plus[s];
        out.push(2 * (near + far_cum));
    }
    Some(out)
}

/// `blocks[k]` = ordered pairs `(p, q)`, self pairs included, with
/// `F_q − F_p ∈ [kR, kR + R)`, for `k < s_max`.
fn block_counts(fine: &[u64], r: usize, s_max: usize, fft_len: usize) -> Option<Vec<u64>> {
    let mut planner = FftPlanner::<f64>::new();
    let forward: Arc<dyn Fft<f64>> = planner.plan_fft_forward(fft_len);
    let inverse: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(fft_len);
    let zero = Complex64::new(0.0, 0.0);

    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); r];
    let mut totals = vec![zero; fft_len];
    for &f in fine {
        let b = (f / r as u64) as usize;
        by_level[(f % r as u64) as usize].push(b);
        totals[b].re += 1.0;
    }

    // Rounding error of a correlation is about eps·log2(len)·‖f‖·‖g‖.
    let total_norm = totals.iter().map(|c| c.re * c.re).sum::<f64>().sqrt();
    let mut level_norm_sum = 0.0;
    for bins in &by_level {
        let mut counts = std::collections::HashMap::<usize, f64>::new();
        for &b in bins {
            *counts.entry(b).or_default() += 1.0;
        }
        level_norm_sum += counts.values().map(|c| c * c).sum::<f64>().sqrt();
    }
    let err = f64::EPSILON * 8.0 * (fft_len as f64).log2() * level_norm_sum * total_norm * 2.0;
    if err > 0.25 {
        return None;
    }

    forward.process(&mut totals);
    let mut at_or_above = vec![zero; fft_len];
    let mut acc_same = vec![zero; fft_len];
    let mut acc_next = vec![zero; fft_len];
    let mut level = vec![zero; fft_len];
    for bins in by_level.iter().rev() {
        if bins.is_empty() {
            continue;
        }
        level.iter_mut().for_each(|c| *c = zero);
        for &b in bins {
            level[b].re += 1.0;
        }
        forward.process(&mut level);
        for f in 0..fft_len {
            at_or_above[f] += level[f];
            let lc = level[f].conj();
            acc_same[f] += lc * at_or_above[f];
            acc_next[f] += lc * (totals[f] - at_or_above[f]);
        }
    }
    inverse.process(&mut acc_same);
    inverse.process(&mut acc_next);

    let norm = fft_len as f64;
    let mut blocks = Vec::with_capacity(s_max);
    for k in 0..s_max {
        let v = (acc_same[k].re + acc_next[k + 1].re) / norm;
        let rounded = v.round();
        if (v - rounded).abs() > 0.25 || rounded < 0.0 {
            return None;
        }
        blocks.push(rounded as u64);
    }
    Some(blocks)
}

/// Sorted pairs with `M ∈ {sR−1, sR, sR+1}`: `minus[s]` counts those at
/// `M = sR − 1` (already inside the bulk count), `plus[s]` those passing
/// `x_j − x_i < s/N`.
fn boundary_pairs(
    sorted: &[f64],
    fine: &[u64],
    r: usize,
    s_max: usize,
    thr: &[f64],
) -> (Vec<u64>, Vec<u64>) {
    let r64 = r as u64;
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); r];
    for (i, &f) in fine.iter().enumerate() {
        classes[(f % r64) as usize].push(i);
    }
    let ctx = Boundary {
        sorted,
        fine,
        classes: &classes,
        r64,
        s_max,
        thr,
    };
    let n = sorted.len();
    let chunk = n.div_ceil(64).max(4096);
    let starts: Vec<usize> = (0..n).step_by(chunk).collect();
    let merge = |mut a: (Vec<u64>, Vec<u64>), b: (Vec<u64>, Vec<u64>)| {
        for (x, y) in a.0.iter_mut().zip(&b.0) {
            *x += y;
        }
        for (x, y) in a.1.iter_mut().zip(&b.1) {
            *x += y;
        }
        a
    };
    let empty = || (vec![0u64; s_max + 1], vec![0u64; s_max + 1]);
    let run = |&start: &usize| ctx.scan(start, (start + chunk).min(n));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        starts.par_iter().map(run).reduce(empty, merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        starts.iter().map(run).fold(empty(), merge)
    }
}

struct Boundary<'a> {
    sorted: &'a [f64],
    fine: &'a [u64],
    classes: &'a [Vec<usize>],
    r64: u64,
    s_max: usize,
    thr: &'a [f64],
}

impl Boundary<'_> {
    fn scan(&self, start: usize, end: usize) -> (Vec<u64>, Vec<u64>) {
        let (fine, r64) = (self.fine, self.r64);
        let r = self.classes.len();
        let mut minus = vec![0u64; self.s_max + 1];
        let mut plus = vec![0u64; self.s_max + 1];
        let reach = self.s_max as u64 * r64 + 1;
        let first = fine[start];
        let mut cursor: Vec<usize> = self
            .classes
            .iter()
            .map(|m| m.partition_point(|&j| fine[j] <= first))
            .collect();

        for i in start..end {
            let fi = fine[i];
            let level = (fi % r64) as usize;
            let xi = self.sorted[i];
            for class in [(level + r - 1) % r, level, (level + 1) % r] {
                let members = &self.classes[class];
                let mut c = cursor[class];
                while c < members.len() && fine[members[c]] <= fi {
                    c += 1;
                }
                cursor[class] = c;
                for &j in &members[c..] {
                    let m = fine[j] - fi;
                    if m > reach {
                        break;
                    }
                    let s = ((m + 1) / r64) as usize;
                    if s == 0 || s > self.s_max {
                        continue;
                    }
                    if m == s as u64 * r64 - 1 {
                        minus[s] += 1;
                    }
                    if self.sorted[j] - xi < self.thr[s] {
                        plus[s] += 1;
                    }
                }
            }
        }
        (minus, plus)
    }
}

/// `far[s]` = sorted pairs whose wrapped gap `1 − (x_j − x_i)` first drops
/// below the threshold at `s`.
fn wrapped_pairs(sorted: &[f64], s_max: usize, thr: &[f64]) -> Vec<u64> {
    let n = sorted.len();
    let n_f = n as f64;
    let t_max = thr[s_max];
    let mut far = vec![0u64; s_max + 2];
    let mut lo = n;
    for i in 0..n {
        let xi = sorted[i];
        if i == 0 {
            while lo - 1 > 0 && 1.0 - (sorted[lo - 1] - xi) < t_max {
                lo -= 1;
            }
        } else {
            if lo <= i {
                lo = i + 1;
            }
            while lo < n && 1.0 - (sorted[lo] - xi) >= t_max {
                lo += 1;
            }
        }
        if lo >= n {
            break;
        }
        for &xj in &sorted[lo..] {
            let v = 1.0 - (xj - xi);
            far[first_threshold_above(v, thr, n_f, s_max)] += 1;
        }
    }
    far
}

/// Smallest `s ≥ 1` with `v < thr[s]`, or `s_max + 1` if none.
fn first_threshold_above(v: f64, thr: &[f64], n_f: f64, s_max: usize) -> usize {
    let mut g = ((v * n_f).floor().max(0.0) as usize + 1).min(s_max + 1);
    while g > 1 && v < thr[g - 1] {
        g -= 1;
    }
    while g <= s_max && v >= thr[g] {
        g += 1;
    }
    g
}
