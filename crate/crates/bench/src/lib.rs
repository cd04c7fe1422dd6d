//! Fixtures shared by the benchmarks.

use gle_core::{EnsembleSpec, LimitSpec};

/// Entry and exit data for `k` curves over `t` steps with slope about 1/2.
pub fn staircase(k: usize, t: i64) -> (Vec<i64>, Vec<i64>) {
    let x: Vec<i64> = (0..k as i64).map(|i| -2 * i).collect();
    let y: Vec<i64> = x.iter().map(|v| v + t / 2).collect();
    (x, y)
}

pub fn staircase_spec(k: usize, t: i64) -> EnsembleSpec {
    let (x, y) = staircase(k, t);
    EnsembleSpec::new(0, t, x, y).expect("staircase data is valid")
}

pub fn distinct_limit(k: usize) -> LimitSpec {
    let a: Vec<f64> = (0..k).map(|i| 1.0 - i as f64 * 0.7).collect();
    let b: Vec<f64> = (0..k).map(|i| 0.5 - i as f64 * 0.4).collect();
    LimitSpec::new(0.5, 0.5, a, b).expect("distinct entries")
}
