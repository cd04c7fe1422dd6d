//! Uniform single bridges and rejection sampling of avoiding ensembles.

use rand::Rng;

use super::SamplingError;
use crate::ensemble::{is_admissible, BernoulliLineEnsemble, EnsembleSpec, UpRightPath};

/// Uniform element of `Ω(t0, t1, x, y)`: a uniform `(y-x)`-subset of the steps goes up.
pub fn sample_bridge<R: Rng + ?Sized>(
    rng: &mut R,
    t0: i64,
    t1: i64,
    x: i64,
    y: i64,
) -> Result<UpRightPath, SamplingError> {
    if t1 < t0 || y < x || y - x > t1 - t0 {
        return Err(SamplingError::InfeasibleEndpoints { t0, t1, x, y });
    }
    let mut steps_left = (t1 - t0) as u64;
    let mut ups_left = (y - x) as u64;
    let mut values = Vec::with_capacity(steps_left as usize + 1);
    let mut cur = x;
    values.push(cur);
    while steps_left > 0 {
        // Up with probability ups_left / steps_left, exactly.
        if ups_left > 0 && rng.random_range(0..steps_left) < ups_left {
            cur += 1;
            ups_left -= 1;
        }
        steps_left -= 1;
        values.push(cur);
    }
    Ok(UpRightPath::from_raw(t0, values))
}

/// Independent bridges for every path of `spec`, ignoring all interactions.
pub fn sample_free_tuple<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &EnsembleSpec,
) -> Result<BernoulliLineEnsemble, SamplingError> {
    let paths = spec
        .x()
        .iter()
        .zip(spec.y())
        .map(|(&x, &y)| sample_bridge(rng, spec.t0(), spec.t1(), x, y))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BernoulliLineEnsemble::from_paths_unchecked(paths))
}

/// Draws independent bridge tuples until one is admissible.
///
/// The output is uniform on `Ω_avoid(spec)`; the returned try count is geometric with
/// success probability equal to the acceptance probability.
pub fn rejection_sample<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &EnsembleSpec,
    max_tries: u64,
) -> Result<(BernoulliLineEnsemble, u64), SamplingError> {
    for tries in 1..=max_tries {
        let cand = sample_free_tuple(rng, spec)?;
        if is_admissible(spec, &cand)? {
            return Ok((cand, tries));
        }
    }
    Err(SamplingError::MaxTriesExceeded { tries: max_tries })
}
