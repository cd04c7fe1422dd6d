//! Exact sampling column by column from the branching of the determinantal count.
//!
//! Going from column `λ` at time `m` to column `μ` at `m + 1` happens with probability
//! `N(μ → y, T-m-1) / N(λ → y, T-m)`, where `N` is the Jacobi–Trudi count. The counts are
//! exact integers; the resulting transition laws are cached per `(m, λ)` as cumulative
//! `f64` tables, so the only rounding is in the final comparison with a uniform draw.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use super::SamplingError;
use crate::ensemble::{BernoulliLineEnsemble, UpRightPath};
use crate::exact::count::lgv_det_cached;
use crate::exact::BinomialCache;

struct Transition {
    next: Vec<Vec<i64>>,
    cumulative: Vec<f64>,
}

/// Reusable sampler for fixed boundary data `x → y` in `T` steps, without barriers.
pub struct SequentialSampler {
    x: Vec<i64>,
    y: Vec<i64>,
    t: i64,
    binom: BinomialCache,
    // layers[m] maps the column at time m to its transition law.
    layers: Vec<HashMap<Vec<i64>, Transition>>,
}

/// Converts non-negative big integers to `f64` weights summing to one.
fn normalized_weights(weights: &[BigInt]) -> Vec<f64> {
    let bits = weights.iter().map(|w| w.bits()).max().unwrap_or(0);
    let shift = bits.saturating_sub(60);
    let approx: Vec<f64> = weights
        .iter()
        .map(|w| (w >> shift).to_f64().unwrap_or(0.0))
        .collect();
    let total: f64 = approx.iter().sum();
    approx.into_iter().map(|a| a / total).collect()
}

impl SequentialSampler {
    pub fn new(x: Vec<i64>, y: Vec<i64>, t: i64) -> Result<Self, SamplingError> {
        if x.len() != y.len() || x.is_empty() {
            return Err(crate::ensemble::EnsembleError::LengthMismatch {
                x: x.len(),
                y: y.len(),
            }
            .into());
        }
        if t < 1 {
            return Err(crate::ensemble::EnsembleError::BadInterval { t0: 0, t1: t }.into());
        }
        let mut binom = BinomialCache::new();
        let total = lgv_det_cached(&x, &y, t, &mut binom);
        if !total.is_positive() {
            return Err(SamplingError::EmptyStateSpace);
        }
        Ok(Self {
            x,
            y,
            t,
            binom,
            layers: (0..t).map(|_| HashMap::new()).collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.x.len()
    }

    pub fn duration(&self) -> i64 {
        self.t
    }

    /// Number of cached `(m, λ)` transition tables.
    pub fn cached_states(&self) -> usize {
        self.layers.iter().map(HashMap::len).sum()
    }

    fn build_transition(&mut self, m: usize, lambda: &[i64]) -> Transition {
        let k = lambda.len();
        let left = self.t - m as i64 - 1;
        let mut next = Vec::new();
        let mut weights = Vec::new();
        for mask in 0u32..(1 << k) {
            let mu: Vec<i64> = (0..k)
                .map(|i| lambda[i] + i64::from((mask >> i) & 1))
                .collect();
            if mu.windows(2).any(|w| w[0] < w[1]) {
                continue;
            }
            if (0..k).any(|i| mu[i] > self.y[i] || self.y[i] - mu[i] > left) {
                continue;
            }
            let w = lgv_det_cached(&mu, &self.y, left, &mut self.binom);
            if w.is_zero() {
                continue;
            }
            debug_assert!(w.is_positive());
            next.push(mu);
            weights.push(w);
        }
        let mut acc = 0.0;
        let cumulative = normalized_weights(&weights)
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Transition { next, cumulative }
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R, m: usize, cur: &mut Vec<i64>) {
        if !self.layers[m].contains_key(cur.as_slice()) {
            let tr = self.build_transition(m, cur);
            self.layers[m].insert(cur.clone(), tr);
        }
        let tr = &self.layers[m][cur.as_slice()];
        let u: f64 = rng.random();
        let idx = tr
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(tr.next.len() - 1);
        cur.copy_from_slice(&tr.next[idx]);
    }

    /// Column at time `m` (relative to the start), sampling only the first `m` steps.
    pub fn sample_column<R: Rng + ?Sized>(&mut self, rng: &mut R, m: i64) -> Vec<i64> {
        assert!((0..=self.t).contains(&m), "time {m} outside [0, {}]", self.t);
        let mut cur = self.x.clone();
        for s in 0..m as usize {
            self.step(rng, s, &mut cur);
        }
        cur
    }

    /// A full ensemble on `[t0, t0 + T]`.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R, t0: i64) -> BernoulliLineEnsemble {
        let k = self.k();
        let len = self.t as usize + 1;
        let mut rows: Vec<Vec<i64>> = (0..k).map(|_| Vec::with_capacity(len)).collect();
        let mut cur = self.x.clone();
        for (row, &v) in rows.iter_mut().zip(&cur) {
            row.push(v);
        }
        for s in 0..self.t as usize {
            self.step(rng, s, &mut cur);
            for (row, &v) in rows.iter_mut().zip(&cur) {
                row.push(v);
            }
        }
        BernoulliLineEnsemble::from_paths_unchecked(
            rows.into_iter()
                .map(|r| UpRightPath::from_raw(t0, r))
                .collect(),
        )
    }
}

/// One exact uniform sample of `Ω_avoid(0, T, x, y)` with no barriers and full avoidance.
pub fn sequential_exact_sample<R: Rng + ?Sized>(
    rng: &mut R,
    x: &[i64],
    y: &[i64],
    t: i64,
) -> Result<BernoulliLineEnsemble, SamplingError> {
    Ok(SequentialSampler::new(x.to_vec(), y.to_vec(), t)?.sample(rng, 0))
}
