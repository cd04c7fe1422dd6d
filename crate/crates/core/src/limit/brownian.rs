//! Brownian-bridge formulas and a grid sampler.

use rand::Rng;
use rand_distr::StandardNormal;

/// `P(max_{[0,1]} B ≥ C)` for a bridge with `σ² = p(1-p)`: `exp(-2C²/(p(1-p)))`.
pub fn bb_max_tail(p: f64, c: f64) -> f64 {
    (-2.0 * c * c / (p * (1.0 - p))).exp()
}

/// `P(max |B| ≥ C) = 2 Σ_{n≥1} (-1)^{n-1} exp(-2n²C²/(p(1-p)))`, summed until a term
/// drops below `1e-16`.
pub fn bb_abs_max_tail(p: f64, c: f64) -> f64 {
    let v = p * (1.0 - p);
    let mut sum = 0.0;
    let mut n = 1.0f64;
    loop {
        let term = (-2.0 * n * n * c * c / v).exp();
        if term < 1e-16 {
            break;
        }
        sum += if n as u64 % 2 == 1 { term } else { -term };
        n += 1.0;
        if n > 1e6 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `σ² (r ∧ s - r s)`.
pub fn bridge_covariance(r: f64, s: f64, sigma: f64) -> f64 {
    sigma * sigma * (r.min(s) - r * s)
}

/// A bridge with diffusion `sigma` at `n_grid` equally spaced times `0, 1/(n-1), ..., 1`.
///
/// A random walk `W` with `N(0, σ²h)` increments is pinned by `B_i = W_i - (i/n) W_n`, which
/// has exactly the bridge covariance at the grid points.
pub fn sample_brownian_bridge<R: Rng + ?Sized>(rng: &mut R, n_grid: usize, sigma: f64) -> Vec<f64> {
    assert!(n_grid >= 2, "need at least the two endpoints");
    let steps = n_grid - 1;
    let sd = sigma / (steps as f64).sqrt();
    let mut w = Vec::with_capacity(n_grid);
    w.push(0.0);
    let mut acc = 0.0;
    for _ in 0..steps {
        let g: f64 = rng.sample(StandardNormal);
        acc += sd * g;
        w.push(acc);
    }
    let end = acc;
    for (i, v) in w.iter_mut().enumerate() {
        *v -= end * i as f64 / steps as f64;
    }
    w[steps] = 0.0;
    w
}

/// A bridge with diffusion `sigma` on `n_grid` points built from two independent bridges
/// glued at grid index `split` through a Gaussian midpoint `ξ`.
///
/// With `u = split/(n_grid-1)`, `ξ ~ N(0, σ²u(1-u))` and the pieces have diffusion
/// `σ√u` and `σ√(1-u)`; each is shifted by the linear interpolation of `ξ`.
pub fn sample_two_bridge<R: Rng + ?Sized>(
    rng: &mut R,
    n_grid: usize,
    split: usize,
    sigma: f64,
) -> Vec<f64> {
    assert!(n_grid >= 3 && split > 0 && split < n_grid - 1);
    let u = split as f64 / (n_grid - 1) as f64;
    let g: f64 = rng.sample(StandardNormal);
    let xi = sigma * (u * (1.0 - u)).sqrt() * g;
    let left = sample_brownian_bridge(rng, split + 1, sigma * u.sqrt());
    let right = sample_brownian_bridge(rng, n_grid - split, sigma * (1.0 - u).sqrt());
    let mut out = Vec::with_capacity(n_grid);
    for (j, v) in left.iter().enumerate() {
        out.push(j as f64 / split as f64 * xi + v);
    }
    let rlen = (n_grid - split - 1) as f64;
    for (j, v) in right.iter().enumerate().skip(1) {
        out.push((rlen - j as f64) / rlen * xi + v);
    }
    out
}
