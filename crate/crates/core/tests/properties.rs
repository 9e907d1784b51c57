use std::path::Path;

use ppclab_core::discrepancy::k_upper;
use ppclab_core::paircorr::threshold;
use ppclab_core::prooflab::{window_series, window_sums};
use ppclab_core::sequences::{frac, parse_points, unit_f64, write_points};
use ppclab_core::{
    bin_counts, chain_lower_bound, generate, pair_count_bruteforce, star_discrepancy_exact,
    star_discrepancy_grid_oracle, wrap_distance, CountMethod, PairCounter, SequenceSample,
    SequenceSpec,
};
use proptest::prelude::*;

const GRID_BITS: u32 = 20;

fn sample(v: Vec<f64>) -> SequenceSample {
    SequenceSample::from_values(v).unwrap()
}

/// Values on the grid `m/2^20`: subtraction, `1 − x` and shifts are exact.
fn dyadic(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..(1 << GRID_BITS), 2..max_n)
        .prop_map(|v| v.into_iter().map(to_grid).collect())
}

fn to_grid(m: u32) -> f64 {
    m as f64 / (1u32 << GRID_BITS) as f64
}

/// Few distinct values, so many duplicates and exact ties with `s/N`.
fn clustered(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..16, 2..max_n)
        .prop_map(|v| v.into_iter().map(|m| m as f64 / 16.0).collect())
}

fn arbitrary_unit(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(any::<u64>(), 2..max_n)
        .prop_map(|v| v.into_iter().map(unit_f64).collect())
}

fn any_sample(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![dyadic(max_n), clustered(max_n), arbitrary_unit(max_n)]
}

fn counts(v: &[f64], s_max: usize) -> Vec<u64> {
    PairCounter::new(&sample(v.to_vec()))
        .table_with(s_max, CountMethod::Sweep)
        .unwrap()
        .counts()
        .to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn banded_matches_sweep_and_bruteforce(
        v in any_sample(300),
        frac_s in 0.0f64..1.0,
        resolution in 3usize..12,
    ) {
        let n = v.len();
        prop_assume!(n >= 2);
        let s_max = 1 + (frac_s * (n / 2 - 1) as f64) as usize;
        let s = sample(v);
        let counter = PairCounter::new(&s);
        let sweep = counter.table_with(s_max, CountMethod::Sweep).unwrap();
        let banded = counter.table_with(s_max, CountMethod::Banded { resolution }).unwrap();
        prop_assert_eq!(banded.counts(), sweep.counts());
        for t in 1..=s_max {
            prop_assert_eq!(
                sweep.count(t).unwrap(),
                pair_count_bruteforce(&s, threshold(t, n)).unwrap()
            );
        }
    }

    #[test]
    fn counts_are_even_monotone_and_bounded(v in any_sample(200)) {
        let n = v.len();
        let c = counts(&v, n / 2);
        let all = (n * (n - 1)) as u64;
        for w in c.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for &x in &c {
            prop_assert_eq!(x % 2, 0);
            prop_assert!(x <= all);
        }
    }

    #[test]
    fn counts_ignore_order(v in any_sample(200).prop_shuffle()) {
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        let n = v.len();
        prop_assert_eq!(counts(&v, n / 2), counts(&sorted, n / 2));
    }

    #[test]
    fn counts_invariant_under_rotation_and_reflection(
        v in dyadic(200),
        shift in 0u32..(1 << GRID_BITS),
    ) {
        let n = v.len();
        let c = to_grid(shift);
        let rotated: Vec<f64> = v.iter().map(|&x| { let y = x + c; if y >= 1.0 { y - 1.0 } else { y } }).collect();
        let reflected: Vec<f64> = v.iter().map(|&x| if x == 0.0 { 0.0 } else { 1.0 - x }).collect();
        let base = counts(&v, n / 2);
        prop_assert_eq!(&counts(&rotated, n / 2), &base);
        prop_assert_eq!(&counts(&reflected, n / 2), &base);
    }

    #[test]
    fn wrap_distance_is_a_symmetric_half_metric(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (unit_f64(a), unit_f64(b));
        let d = wrap_distance(x, y).unwrap();
        prop_assert_eq!(d, wrap_distance(y, x).unwrap());
        prop_assert!((0.0..=0.5).contains(&d));
        prop_assert_eq!(wrap_distance(x, x).unwrap(), 0.0);
    }

    #[test]
    fn frac_lands_in_unit_interval(x in -1e12f64..1e12) {
        let f = frac(x).unwrap();
        prop_assert!((0.0..1.0).contains(&f));
    }

    #[test]
    fn point_file_round_trips(v in arbitrary_unit(100)) {
        let s = sample(v.clone());
        let text = write_points(&s);
        let back = parse_points(&text, Path::new("mem")).unwrap();
        prop_assert_eq!(back, v);
    }
}

fn any_spec() -> impl Strategy<Value = SequenceSpec> {
    prop_oneof![
        (-10.0f64..10.0).prop_map(|a| SequenceSpec::kronecker(a, 1)),
        (-10.0f64..10.0).prop_map(|a| SequenceSpec::quadratic(a, 1)),
        (2u32..17).prop_map(|b| SequenceSpec::vdc(b, 1)),
        Just(SequenceSpec::sqrt_n(1)),
        any::<u64>().prop_map(|s| SequenceSpec::uniform(s, 1)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generators_stay_in_range_and_extend_prefixes(
        spec in any_spec(),
        n in 1usize..400,
        extra in 0usize..200,
    ) {
        let short = generate(&SequenceSpec { n, ..spec.clone() }).unwrap();
        let long = generate(&SequenceSpec { n: n + extra, ..spec }).unwrap();
        prop_assert_eq!(short.len(), n);
        prop_assert_eq!(short.values(), &long.values()[..n]);
        for &x in long.values() {
            prop_assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn exact_discrepancy_sits_between_grid_bounds(v in any_sample(60)) {
        let s = sample(v);
        let exact = star_discrepancy_exact(&s).unwrap().d_star;
        let grid = 4096;
        let lower = star_discrepancy_grid_oracle(&s, grid).unwrap();
        prop_assert!(lower <= exact);
        prop_assert!(exact <= lower + 1.0 / grid as f64);
        prop_assert!(exact >= 0.5 / s.len() as f64);
        prop_assert!(exact <= 1.0);
    }

    #[test]
    fn discrepancy_ignores_order(v in any_sample(100).prop_shuffle()) {
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        let a = star_discrepancy_exact(&sample(v)).unwrap();
        let b = star_discrepancy_exact(&sample(sorted)).unwrap();
        prop_assert_eq!(a.d_star, b.d_star);
        prop_assert_eq!(a.witness_a, b.witness_a);
    }

    #[test]
    fn bin_identities(v in arbitrary_unit(3000), pick in 0.0f64..1.0) {
        let n = v.len();
        prop_assume!(n >= 32);
        let k = 1 + (pick * (k_upper(n) - 1) as f64) as usize;
        let s = sample(v);
        let profile = bin_counts(&s, k).unwrap();
        prop_assert_eq!(profile.len(), n / k + 1);
        prop_assert_eq!(profile.bins.iter().sum::<u64>(), n as u64);
        for l in [1, k] {
            prop_assert_eq!(window_sums(&profile, l).iter().sum::<u64>(), (l * n) as u64);
        }
        let series = window_series(&profile, &s).unwrap();
        for w in &series {
            prop_assert!(w.telescoping_error() <= 1e-12);
            prop_assert!(w.count_inequality_holds());
        }
        let z: Vec<f64> = series.iter().map(|w| w.z).collect();
        prop_assert!(chain_lower_bound(&z).unwrap().holds);
    }

    #[test]
    fn chain_bound_on_positive_vectors(z in prop::collection::vec(1e-6f64..1e6, 1..50)) {
        let c = chain_lower_bound(&z).unwrap();
        prop_assert!(c.holds);
        prop_assert!(c.max_term >= c.bound);
    }

    #[test]
    fn max_dominates_weighted_sum(a in 1e-9f64..1e12, b in 1e-9f64..1e12) {
        prop_assert!(8.0 * a + 4.0 * b <= 12.0 * a.max(b));
    }
}
