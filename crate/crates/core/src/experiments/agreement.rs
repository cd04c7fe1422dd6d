//! Empirical laws of the samplers against the exact uniform law on small instances.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::ensemble::{BernoulliLineEnsemble, EnsembleSpec};
use crate::exact::enumerate_admissible;
use crate::sampling::{
    default_burn_in, rejection_sample, GlauberChain, RngHandle, SequentialSampler,
};
use crate::stats::tv_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Rejection,
    Sequential,
    Glauber,
}

/// All path values, concatenated top path first.
pub fn state_key(e: &BernoulliLineEnsemble) -> Vec<i64> {
    e.paths().iter().flat_map(|p| p.values().iter().copied()).collect()
}

/// The uniform law on `Ω_avoid(spec)`, keyed by [`state_key`].
pub fn uniform_law(spec: &EnsembleSpec, cap: u64) -> Result<HashMap<Vec<i64>, f64>, ExperimentError> {
    let states = enumerate_admissible(spec, cap)?;
    let p = 1.0 / states.len() as f64;
    Ok(states.iter().map(|e| (state_key(e), p)).collect())
}

/// State counts from `n` draws of the given sampler.
///
/// The Glauber chain starts at the maximal ensemble, runs the default burn-in and then
/// records the state after each of `n` further moves.
pub fn empirical_law(
    spec: &EnsembleSpec,
    kind: SamplerKind,
    n: u64,
    handle: RngHandle,
) -> Result<HashMap<Vec<i64>, u64>, ExperimentError> {
    let mut rng = handle.rng();
    let mut counts: HashMap<Vec<i64>, u64> = HashMap::new();
    match kind {
        SamplerKind::Rejection => {
            for _ in 0..n {
                let (e, _) = rejection_sample(&mut rng, spec, 1_000_000)?;
                *counts.entry(state_key(&e)).or_default() += 1;
            }
        }
        SamplerKind::Sequential => {
            if !spec.is_unconstrained() {
                return Err(ExperimentError::Domain(
                    "sequential sampling needs no barriers and full avoidance".into(),
                ));
            }
            let mut s =
                SequentialSampler::new(spec.x().to_vec(), spec.y().to_vec(), spec.duration())?;
            for _ in 0..n {
                let e = s.sample(&mut rng, spec.t0());
                *counts.entry(state_key(&e)).or_default() += 1;
            }
        }
        SamplerKind::Glauber => {
            let mut chain = GlauberChain::new(spec.clone(), None)?;
            chain.run(&mut rng, default_burn_in(spec));
            for _ in 0..n {
                chain.step(&mut rng);
                *counts.entry(state_key(chain.state())).or_default() += 1;
            }
        }
    }
    Ok(counts)
}

/// TV distance between `n` draws of `kind` and the uniform law.
pub fn empirical_tv(
    spec: &EnsembleSpec,
    kind: SamplerKind,
    n: u64,
    handle: RngHandle,
    cap: u64,
) -> Result<f64, ExperimentError> {
    let target = uniform_law(spec, cap)?;
    let counts = empirical_law(spec, kind, n, handle)?;
    Ok(tv_distance(&counts, &target))
}
