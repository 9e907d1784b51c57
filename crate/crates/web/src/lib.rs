//! WebAssembly bindings for the static page in `www/`.
//!
//! Each exported function takes a generator description `(kind, param, n)`
//! and returns a JSON string. `param` is the multiplier for `kronecker` and
//! `quadratic`, the base for `vdc` and the seed for `uniform_random`; NaN
//! selects the default. The `*_view` functions hold the logic and run
//! natively as well.

use ppclab_core::discrepancy::select_k;
use ppclab_core::prooflab::{window_series, window_sums};
use ppclab_core::sequences::{golden_alpha, DEFAULT_QUADRATIC_ALPHA};
use ppclab_core::{
    bin_counts, bound_check, chain_lower_bound, generate, pair_counts_fast, BoundCheck,
    SequenceKind, SequenceSample, SequenceSpec,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest sample the page will generate.
pub const MAX_N: usize = 1_000_000;

pub fn sample_for(kind: &str, param: f64, n: usize) -> Result<SequenceSample, String> {
    if n > MAX_N {
        return Err(format!("N={n} is above the page limit of {MAX_N}"));
    }
    let given = (!param.is_nan()).then_some(param);
    let whole = |what: &str, default: f64| -> Result<f64, String> {
        let v = given.unwrap_or(default);
        if v < 0.0 || v.fract() != 0.0 || !v.is_finite() {
            return Err(format!("{what} must be a non-negative integer, got {v}"));
        }
        Ok(v)
    };
    let kind = match kind {
        "kronecker" => SequenceKind::Kronecker {
            alpha: given.unwrap_or_else(golden_alpha),
        },
        "quadratic" => SequenceKind::Quadratic {
            alpha: given.unwrap_or(DEFAULT_QUADRATIC_ALPHA),
        },
        "vdc" => SequenceKind::Vdc {
            base: whole("base", 2.0)?.min(u32::MAX as f64) as u32,
        },
        "sqrt_n" => SequenceKind::SqrtN,
        "uniform_random" => SequenceKind::UniformRandom {
            seed: whole("seed", 0.0)? as u64,
        },
        other => return Err(format!("unknown sequence kind {other:?}")),
    };
    generate(&SequenceSpec::new(kind, n)).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct CurveView {
    pub n: usize,
    pub counts: Vec<u64>,
    /// `R(s, N) / (2s)`, which tends to 1 for Poissonian pair correlations.
    pub ratio: Vec<f64>,
    pub max_deviation: f64,
}

pub fn curve_view(sample: &SequenceSample, s_max: usize) -> Result<CurveView, String> {
    let n = sample.len();
    let table = pair_counts_fast(sample, s_max).map_err(|e| e.to_string())?;
    let ratio: Vec<f64> = table
        .counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 / (2.0 * (i + 1) as f64 * n as f64))
        .collect();
    let max_deviation = ratio.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    Ok(CurveView {
        n,
        counts: table.counts().to_vec(),
        ratio,
        max_deviation,
    })
}

#[derive(Debug, Serialize)]
pub struct BoundView {
    #[serde(flatten)]
    pub check: BoundCheck,
    pub verdict: &'static str,
}

pub fn bound_view(sample: &SequenceSample) -> Result<BoundView, String> {
    let check = bound_check(sample).map_err(|e| e.to_string())?;
    Ok(BoundView {
        verdict: check.verdict(),
        check,
    })
}

#[derive(Debug, Serialize)]
pub struct BinView {
    pub n: usize,
    pub k: usize,
    pub bins: Vec<u64>,
    /// Window sums of `K` consecutive bins.
    pub g: Vec<u64>,
    pub z: Vec<f64>,
    pub gamma: Vec<f64>,
    /// `max_L γ_L`, bounded below by `chain_bound = 2·Z_K/(K+1)`.
    pub chain_max: f64,
    pub chain_bound: f64,
}

/// Bins and window moments; `k = 0` picks the smallest admissible `K`.
pub fn bin_view(sample: &SequenceSample, k: usize) -> Result<BinView, String> {
    let k = if k == 0 {
        select_k(sample).map_err(|e| e.to_string())?.0.k
    } else {
        k
    };
    let profile = bin_counts(sample, k).map_err(|e| e.to_string())?;
    let series = window_series(&profile, sample).map_err(|e| e.to_string())?;
    let z: Vec<f64> = series.iter().map(|w| w.z).collect();
    let chain = chain_lower_bound(&z).map_err(|e| e.to_string())?;
    Ok(BinView {
        n: sample.len(),
        k,
        g: window_sums(&profile, k),
        gamma: series.iter().map(|w| w.gamma).collect(),
        bins: profile.bins,
        z,
        chain_max: chain.max_term,
        chain_bound: chain.bound,
    })
}

fn to_json<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn ppc_curve(kind: &str, param: f64, n: usize, s_max: usize) -> Result<String, JsError> {
    to_json(sample_for(kind, param, n).and_then(|s| curve_view(&s, s_max)))
}

#[wasm_bindgen]
pub fn verify_bound(kind: &str, param: f64, n: usize) -> Result<String, JsError> {
    to_json(sample_for(kind, param, n).and_then(|s| bound_view(&s)))
}

#[wasm_bindgen]
pub fn prooflab_bins(kind: &str, param: f64, n: usize, k: usize) -> Result<String, JsError> {
    to_json(sample_for(kind, param, n).and_then(|s| bin_view(&s, k)))
}
