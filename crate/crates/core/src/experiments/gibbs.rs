//! Exact check that resampling a block of paths on a window from its conditional uniform
//! law leaves the uniform measure unchanged.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::agreement::state_key;
use super::{ExperimentError, ExperimentOutput, ExperimentReport, SCHEMA_VERSION};
use crate::ensemble::{Barrier, BernoulliLineEnsemble, EnsembleSpec, EnsembleSpecDoc, UpRightPath};
use crate::exact::{enumerate_admissible, DEFAULT_ENUM_CAP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GibbsConfig {
    pub spec: EnsembleSpecDoc,
    /// `[a, b]`: values at `a` and `b` are kept, the interior is resampled.
    pub window: [i64; 2],
    /// 1-based `[k1, k2]` with `k2 ≤ k - 1`.
    pub paths: [usize; 2],
    pub cap: u64,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        let spec = EnsembleSpec::new(0, 4, vec![1, 0], vec![3, 2]).expect("valid default");
        Self {
            spec: EnsembleSpecDoc::from_spec(&spec),
            window: [1, 3],
            paths: [1, 1],
            cap: DEFAULT_ENUM_CAP,
        }
    }
}

/// Result of comparing the two laws.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsOutcome {
    pub states: usize,
    /// Distinct boundary configurations the resampling was conditioned on.
    pub conditionings: usize,
    pub interior_empty: bool,
    /// Largest `|before(ω) - after(ω)|`, exactly.
    pub max_difference: BigRational,
    pub equal: bool,
}

fn restrict(path: &UpRightPath, a: i64, b: i64) -> UpRightPath {
    let off = (a - path.t0()) as usize;
    UpRightPath::new(a, path.values()[off..=off + (b - a) as usize].to_vec())
        .expect("a sub-path of an up-right path is up-right")
}

fn restrict_barrier(bar: &Barrier, a: i64, b: i64) -> Barrier {
    match bar {
        Barrier::Path(p) => Barrier::Path(restrict(p, a, b)),
        other => other.clone(),
    }
}

/// The law of the uniform sample on `Ω_avoid(spec)` after paths `k1..=k2` (1-based) are
/// redrawn on `[a, b]` from the uniform law of the sub-ensemble with entry `L(a)`, exit
/// `L(b)`, and the neighbouring paths (or the spec's barriers) as barriers, compared
/// with the original law in exact rational arithmetic.
///
/// The sub-ensemble is enumerated on its own, not read off the full enumeration, so the
/// comparison checks that the conditional law really is uniform on the smaller set.
pub fn gibbs_invariance(
    spec: &EnsembleSpec,
    window: (i64, i64),
    paths: (usize, usize),
    cap: u64,
) -> Result<GibbsOutcome, ExperimentError> {
    let (a, b) = window;
    let (k1, k2) = paths;
    if !spec.full_avoidance() {
        return Err(ExperimentError::Domain("resampling needs avoidance at every time".into()));
    }
    if k1 < 1 || k1 > k2 || k2 > spec.k().saturating_sub(1) {
        return Err(ExperimentError::Domain(format!(
            "path range [{k1}, {k2}] must lie in [1, {}]",
            spec.k().saturating_sub(1)
        )));
    }
    if a < spec.t0() || b > spec.t1() || a >= b {
        return Err(ExperimentError::Domain(format!(
            "window [{a}, {b}] must lie in [{}, {}] with a < b",
            spec.t0(),
            spec.t1()
        )));
    }
    let states = enumerate_admissible(spec, cap)?;
    let n = states.len();
    if n == 0 {
        return Err(ExperimentError::Hypothesis("Ω_avoid is empty".into()));
    }
    let unit = BigRational::new(BigInt::one(), BigInt::from(n));
    let before: HashMap<Vec<i64>, BigRational> =
        states.iter().map(|e| (state_key(e), unit.clone())).collect();

    let (i1, i2) = (k1 - 1, k2 - 1);
    let mut sub_cache: BTreeMap<Vec<Vec<i64>>, Vec<BernoulliLineEnsemble>> = BTreeMap::new();
    let mut after: HashMap<Vec<i64>, BigRational> = HashMap::new();
    for e in &states {
        let top = if i1 == 0 {
            restrict_barrier(spec.top(), a, b)
        } else {
            Barrier::Path(restrict(e.path(i1 - 1), a, b))
        };
        let bottom = Barrier::Path(restrict(e.path(i2 + 1), a, b));
        let x: Vec<i64> = (i1..=i2).map(|i| e.value(i, a)).collect();
        let y: Vec<i64> = (i1..=i2).map(|i| e.value(i, b)).collect();
        let key = {
            let mut kk = vec![x.clone(), y.clone()];
            for bar in [&top, &bottom] {
                kk.push(match bar {
                    Barrier::Path(p) => p.values().to_vec(),
                    _ => Vec::new(),
                });
            }
            kk
        };
        if !sub_cache.contains_key(&key) {
            let sub = EnsembleSpec::with_all(a, b, x, y, top, bottom, None)?;
            sub_cache.insert(key.clone(), enumerate_admissible(&sub, cap)?);
        }
        let subs = &sub_cache[&key];
        let share = &unit / BigRational::from_integer(BigInt::from(subs.len()));
        for s in subs {
            let mut rows: Vec<Vec<i64>> = e.paths().iter().map(|p| p.values().to_vec()).collect();
            for (j, i) in (i1..=i2).enumerate() {
                let off = (a - spec.t0()) as usize;
                rows[i][off..=off + (b - a) as usize].copy_from_slice(s.path(j).values());
            }
            let spliced = BernoulliLineEnsemble::from_values(spec.t0(), rows)?;
            *after
                .entry(state_key(&spliced))
                .or_insert_with(BigRational::zero) += &share;
        }
    }

    let mut max_difference = BigRational::zero();
    for key in before.keys().chain(after.keys()) {
        let p = before.get(key).cloned().unwrap_or_else(BigRational::zero);
        let q = after.get(key).cloned().unwrap_or_else(BigRational::zero);
        let d = if p > q { p - q } else { q - p };
        if d > max_difference {
            max_difference = d;
        }
    }
    Ok(GibbsOutcome {
        states: n,
        conditionings: sub_cache.len(),
        interior_empty: b - a < 2,
        equal: before == after,
        max_difference,
    })
}

pub fn run_gibbs_invariance(cfg: &GibbsConfig) -> Result<ExperimentOutput, ExperimentError> {
    let spec = cfg.spec.clone().into_spec()?;
    let out = gibbs_invariance(
        &spec,
        (cfg.window[0], cfg.window[1]),
        (cfg.paths[0], cfg.paths[1]),
        cfg.cap,
    )?;
    let mut notes = Vec::new();
    if out.interior_empty {
        notes.push("window has no interior times; invariance is trivial".to_string());
    }
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        experiment: "gibbs".into(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        seed: 0,
        statistics: vec![json!({
            "states": out.states,
            "conditionings": out.conditionings,
            "max_difference": out.max_difference.to_string(),
            "equal": out.equal,
        })],
        summary: json!({ "equal": out.equal }),
        pass: Some(out.equal),
        notes,
    };
    Ok(ExperimentOutput { report, tables: Vec::new() })
}
