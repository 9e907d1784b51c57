use ppclab_web::{bin_view, bound_view, curve_view, sample_for, MAX_N};

#[test]
fn defaults_and_parameters() {
    let vdc = sample_for("vdc", f64::NAN, 4).unwrap();
    assert_eq!(vdc.values(), [0.5, 0.25, 0.75, 0.125]);
    let ternary = sample_for("vdc", 3.0, 2).unwrap();
    assert_eq!(ternary.values()[0], 1.0 / 3.0);
    let k = sample_for("kronecker", 0.5, 4).unwrap();
    assert_eq!(k.values(), [0.5, 0.0, 0.5, 0.0]);
    assert_eq!(
        sample_for("uniform_random", 42.0, 10).unwrap().values(),
        sample_for("uniform_random", 42.0, 10).unwrap().values()
    );
    assert_ne!(
        sample_for("uniform_random", f64::NAN, 10).unwrap().values(),
        sample_for("uniform_random", 1.0, 10).unwrap().values()
    );
}

#[test]
fn bad_requests_are_errors() {
    assert!(sample_for("halton", f64::NAN, 10).is_err());
    assert!(sample_for("vdc", 2.5, 10).is_err());
    assert!(sample_for("vdc", 1.0, 10).is_err());
    assert!(sample_for("uniform_random", -1.0, 10).is_err());
    assert!(sample_for("sqrt_n", f64::NAN, MAX_N + 1).is_err());
    assert!(sample_for("sqrt_n", f64::NAN, 0).is_err());
    let s = sample_for("sqrt_n", f64::NAN, 20).unwrap();
    assert!(curve_view(&s, 11).is_err());
    assert!(bound_view(&s).is_err());
}

#[test]
fn curve_for_uniform_sample() {
    let s = sample_for("uniform_random", 42.0, 100_000).unwrap();
    let c = curve_view(&s, 10).unwrap();
    assert_eq!(c.counts[0], 199_676);
    assert_eq!(c.ratio.len(), 10);
    assert!(c.max_deviation < 0.05);
    let json = serde_json::to_value(&c).unwrap();
    assert_eq!(json["n"], 100_000);
}

#[test]
fn bound_carries_verdict() {
    let s = sample_for("uniform_random", 42.0, 100_000).unwrap();
    let v = serde_json::to_value(bound_view(&s).unwrap()).unwrap();
    assert_eq!(v["k"], 50);
    assert_eq!(v["satisfied"], true);
    assert_eq!(v["verdict"], "satisfied");
}

#[test]
fn bins_and_windows() {
    let s = sample_for("uniform_random", 5.0, 5000).unwrap();
    let v = bin_view(&s, 0).unwrap();
    assert_eq!(v.bins.len(), 5000 / v.k + 1);
    assert_eq!(v.bins.iter().sum::<u64>(), 5000);
    assert_eq!(v.g.iter().sum::<u64>(), (v.k * 5000) as u64);
    assert_eq!(v.z.len(), v.k);
    assert!(v.chain_max >= v.chain_bound);
    let fixed = bin_view(&s, 4).unwrap();
    assert_eq!(fixed.k, 4);
    assert!(bin_view(&s, 5000).is_err());
}
