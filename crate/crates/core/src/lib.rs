//! Pair-correlation statistics, exact star-discrepancy and empirical checks
//! of the discrepancy bound `N·D*_N ≤ 5·max(N^{4/5}, √(N·F(K², N)))` for
//! sequences in `[0, 1)`.
//!
//! * [`sequences`]: generators and the point file
//! * [`paircorr`]: close-pair counts and the deviation statistic `F(K, N)`
//! * [`discrepancy`]: `D*_N`, the bound `H(N, K)`, `K` selection
//! * [`prooflab`]: bin profiles, window moments and the inequality chain
//!   behind the bound, evaluated on concrete data

pub mod discrepancy;
pub mod error;
pub mod json;
pub mod paircorr;
pub mod prooflab;
pub mod sequences;

pub use discrepancy::{
    bound_check, select_k, star_discrepancy_exact, star_discrepancy_grid_oracle, theorem_bound,
    BoundCheck, DiscrepancyReport,
};
pub use error::{Error, Result};
pub use paircorr::{
    f_estimate, pair_count_bruteforce, pair_counts_fast, ppc_statistic, wrap_distance, CountMethod,
    FEstimate, PairCountTable, PairCounter,
};
pub use prooflab::{
    bin_counts, chain_lower_bound, final_chain_report, h_count, minimizer_blocks, verify_minimizer,
    window_stats, BinProfile, WindowStats,
};
pub use sequences::{generate, load_points, SequenceKind, SequenceSample, SequenceSpec};
