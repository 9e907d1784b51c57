//! Times one pair-count table.
//!
//! `cargo run --release -p ppclab-core --example kernel_timing -- N S_MAX [sweep|R]`

use std::time::Instant;

use ppclab_core::{generate, CountMethod, PairCounter, SequenceSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100_000);
    let s_max: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(2500);
    let sample = generate(&SequenceSpec::uniform(42, n)).unwrap();
    let method = match args.next().as_deref() {
        Some("sweep") => CountMethod::Sweep,
        Some(r) if r.parse::<usize>().is_ok() => CountMethod::Banded {
            resolution: r.parse().unwrap(),
        },
        _ => CountMethod::Auto,
    };
    let counter = PairCounter::new(&sample);
    let start = Instant::now();
    let table = counter.table_with(s_max, method).unwrap();
    println!(
        "N={n} s_max={s_max} {method:?}: {:.3}s, count(s_max)={}",
        start.elapsed().as_secs_f64(),
        table.counts()[s_max - 1]
    );
}
