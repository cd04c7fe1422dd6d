//! Summary statistics and distribution distances used by the experiments.

use std::collections::HashMap;
use std::hash::Hash;

use statrs::function::erf::erfc;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn standard_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Sample covariance with its standard error (from the spread of the centred products).
pub fn covariance_with_se(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let (mx, my) = (mean(xs), mean(ys));
    let prods: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let n = xs.len() as f64;
    (prods.iter().sum::<f64>() / (n - 1.0), standard_error(&prods))
}

/// Total variation distance between empirical counts and a target law given on its support.
/// Mass of the counts outside the target support counts fully.
///
/// Terms are summed in sorted order, so the result does not depend on hash iteration order.
pub fn tv_distance<K: Eq + Hash>(counts: &HashMap<K, u64>, target: &HashMap<K, f64>) -> f64 {
    let n: u64 = counts.values().sum();
    let n = n as f64;
    let mut terms: Vec<f64> = target
        .iter()
        .map(|(k, &p)| (p - counts.get(k).copied().unwrap_or(0) as f64 / n).abs())
        .chain(
            counts
                .iter()
                .filter(|(k, _)| !target.contains_key(*k))
                .map(|(_, &c)| c as f64 / n),
        )
        .collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum::<f64>() / 2.0
}

pub fn normal_cdf(x: f64, mean: f64, var: f64) -> f64 {
    0.5 * erfc(-(x - mean) / (2.0 * var).sqrt())
}

/// Kolmogorov distance between the empirical law of `sorted` and a continuous CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Empirical CDF of `sorted` at `x`.
pub fn ecdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// Sup distance between the empirical CDF of lattice-valued data and a continuous CDF,
/// evaluated half a lattice spacing either side of every observed atom.
///
/// A raw Kolmogorov distance of lattice data to a continuous law never drops below roughly
/// half the largest atom mass; the midpoints are the usual continuity correction.
pub fn lattice_cdf_distance(sorted: &[f64], spacing: f64, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let j = sorted[i..].partition_point(|&u| u <= v) + i;
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d.max((below - cdf(v - spacing / 2.0)).abs());
        d = d.max((upto - cdf(v + spacing / 2.0)).abs());
        i = j;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-12);
        let (c, _) = covariance_with_se(&xs, &xs);
        assert!((c - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tv() {
        let counts = HashMap::from([(1, 50u64), (2, 50), (3, 0)]);
        let target = HashMap::from([(1, 0.5), (2, 0.25), (3, 0.25)]);
        assert!((tv_distance(&counts, &target) - 0.25).abs() < 1e-12);
        let stray = HashMap::from([(9, 10u64)]);
        assert!((tv_distance(&stray, &target) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_and_ks() {
        assert!((normal_cdf(0.0, 0.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.96, 0.0, 1.0) - 0.975).abs() < 1e-4);
        let sorted = [0.5];
        assert!((ks_distance(&sorted, |x| x) - 0.5).abs() < 1e-15);
        assert_eq!(ecdf(&[1.0, 2.0, 2.0, 3.0], 2.0), 0.75);
    }

    #[test]
    fn lattice_distance_of_exact_binomial_is_small() {
        // Fair ±1 walk of 400 steps over √400; exact pmf as repeated data.
        let n = 400u32;
        let mut data = Vec::new();
        let mut c = 1f64;
        let total = 2f64.powi(n as i32);
        for k in 0..=n {
            if k > 0 {
                c = c * (n - k + 1) as f64 / k as f64;
            }
            let copies = (c / total * 1e5).round() as usize;
            let v = (k as f64 - n as f64 / 2.0) / (n as f64).sqrt();
            data.extend(std::iter::repeat(v).take(copies));
        }
        let d = lattice_cdf_distance(&data, 1.0 / (n as f64).sqrt(), |x| normal_cdf(x, 0.0, 0.25));
        assert!(d < 0.01, "{d}");
        assert!(ks_distance(&data, |x| normal_cdf(x, 0.0, 0.25)) > 0.015);
    }
}
