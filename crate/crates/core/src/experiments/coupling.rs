//! Monotone coupling: shared-move Glauber chains on ordered boundary data.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::agreement::{state_key, uniform_law};
use super::{ExperimentError, ExperimentOutput, ExperimentReport, KEY_COUPLING, SCHEMA_VERSION};
use crate::ensemble::{is_admissible, Barrier, EnsembleSpec, EnsembleSpecDoc, UpRightPath};
use crate::exact::DEFAULT_ENUM_CAP;
use crate::sampling::{default_burn_in, CoupledChain, RngHandle};
use crate::stats::tv_distance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub pairs: usize,
    /// Coupled moves per pair.
    pub n_steps: u64,
    pub t_max: i64,
    pub k_max: usize,
    /// Recorded moves per chain for the marginal-law check.
    pub tv_steps: u64,
    pub tv_threshold: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            pairs: 20,
            n_steps: 1_000_000,
            t_max: 8,
            k_max: 3,
            tv_steps: 1_000_000,
            tv_threshold: 0.05,
        }
    }
}

fn random_decreasing<R: Rng + ?Sized>(rng: &mut R, k: usize, top: i64) -> Vec<i64> {
    let mut v = Vec::with_capacity(k);
    let mut cur = top;
    for _ in 0..k {
        v.push(cur);
        cur -= rng.random_range(0..=2);
    }
    v
}

fn raise_decreasing<R: Rng + ?Sized>(rng: &mut R, v: &[i64]) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::with_capacity(v.len());
    for (i, &x) in v.iter().enumerate() {
        let up = x + rng.random_range(0..=2);
        out.push(if i == 0 { up } else { up.min(out[i - 1]) });
    }
    out
}

fn random_path<R: Rng + ?Sized>(rng: &mut R, t0: i64, t1: i64, start: i64) -> UpRightPath {
    let mut vals = vec![start];
    for _ in t0..t1 {
        let last = *vals.last().unwrap();
        vals.push(last + i64::from(rng.random_bool(0.5)));
    }
    UpRightPath::new(t0, vals).expect("steps are 0 or 1")
}

fn shifted(p: &UpRightPath, by: i64) -> UpRightPath {
    UpRightPath::new(p.t0(), p.values().iter().map(|v| v + by).collect()).expect("shift keeps steps")
}

/// A random pair `(low, high)` meeting the coupling hypotheses, both non-empty.
///
/// Entry and exit data of `high` dominate those of `low`; bottom barriers satisfy
/// `g_low ≤ g_high` and top barriers `f_low ≤ f_high` wherever they are finite.
pub fn random_ordered_pair<R: Rng + ?Sized>(
    rng: &mut R,
    t_max: i64,
    k_max: usize,
) -> (EnsembleSpec, EnsembleSpec) {
    loop {
        let t1 = rng.random_range(2..=t_max.max(2));
        let k = rng.random_range(1..=k_max.max(1));
        let top = rng.random_range(0..=3);
        let x = random_decreasing(rng, k, top);
        let mut y: Vec<i64> = x.iter().map(|&xi| xi + rng.random_range(0..=t1)).collect();
        for i in 1..k {
            y[i] = y[i].min(y[i - 1]);
        }
        let x2 = raise_decreasing(rng, &x);
        let y2 = raise_decreasing(rng, &y);
        let avoid: Option<BTreeSet<i64>> = if rng.random_bool(0.5) {
            None
        } else {
            Some((0..=t1).filter(|_| rng.random_bool(0.6)).collect())
        };
        let (g_low, g_high) = match rng.random_range(0..3) {
            0 => (Barrier::MinusInfinity, Barrier::MinusInfinity),
            1 => {
                let drop = rng.random_range(0..=3);
                let g = random_path(rng, 0, t1, x2[k - 1] - drop);
                (Barrier::MinusInfinity, Barrier::Path(g))
            }
            _ => {
                let drop = rng.random_range(0..=2);
                let g = random_path(rng, 0, t1, x[k - 1] - drop);
                let by = rng.random_range(0..=1);
                let low = shifted(&g, -by);
                (Barrier::Path(low), Barrier::Path(g))
            }
        };
        let (f_low, f_high) = match rng.random_range(0..3) {
            0 => (Barrier::PlusInfinity, Barrier::PlusInfinity),
            1 => {
                let lift = rng.random_range(0..=2);
                let f = random_path(rng, 0, t1, x[0] + lift);
                (Barrier::Path(f), Barrier::PlusInfinity)
            }
            _ => {
                let lift = rng.random_range(0..=2);
                let f = random_path(rng, 0, t1, x[0] + lift);
                let by = rng.random_range(0..=1);
                let high = shifted(&f, by);
                (Barrier::Path(f), Barrier::Path(high))
            }
        };
        let low = EnsembleSpec::with_all(0, t1, x, y, f_low, g_low, avoid.clone());
        let high = EnsembleSpec::with_all(0, t1, x2, y2, f_high, g_high, avoid);
        let (Ok(low), Ok(high)) = (low, high) else { continue };
        if low.check_feasible().is_err() || high.check_feasible().is_err() {
            continue;
        }
        if CoupledChain::new(low.clone(), high.clone()).is_ok() {
            return (low, high);
        }
    }
}

fn describe(spec: &EnsembleSpec) -> serde_json::Value {
    serde_json::to_value(EnsembleSpecDoc::from_spec(spec)).expect("spec serializes")
}

/// Runs shared-move chains on random ordered pairs and counts ordering violations; then
/// checks each chain's long-run law on a fixed enumerable pair.
pub fn run_coupling_test(cfg: &CouplingConfig, seed: u64) -> Result<ExperimentOutput, ExperimentError> {
    let root = RngHandle::from_seed(seed).derive(KEY_COUPLING);
    let mut stats = Vec::new();
    let mut total_violations: u64 = 0;
    let mut total_steps: u64 = 0;
    for pi in 0..cfg.pairs {
        let mut rng = root.derive_path(&[0, pi as u64]).rng();
        let (low, high) = random_ordered_pair(&mut rng, cfg.t_max, cfg.k_max);
        let mut chain = CoupledChain::new(low.clone(), high.clone())?;
        let mut violations = u64::from(!chain.is_ordered());
        for _ in 0..cfg.n_steps {
            if !chain.step(&mut rng).1 {
                violations += 1;
            }
        }
        let ordered_at_end = chain.is_ordered();
        let admissible = is_admissible(&low, chain.low())? && is_admissible(&high, chain.high())?;
        total_violations += violations + u64::from(!ordered_at_end);
        total_steps += cfg.n_steps;
        stats.push(json!({
            "pair": pi,
            "low": describe(&low),
            "high": describe(&high),
            "steps": cfg.n_steps,
            "violations": violations,
            "ordered_at_end": ordered_at_end,
            "admissible_at_end": admissible,
        }));
    }

    // Identical specs must give identical chains.
    let same = EnsembleSpec::new(0, 6, vec![2, 1, 0], vec![5, 3, 3])?;
    let mut twin = CoupledChain::new(same.clone(), same)?;
    let mut rng = root.derive(1).rng();
    let mut twin_mismatch = 0u64;
    for _ in 0..cfg.n_steps.min(100_000) {
        twin.step(&mut rng);
        if twin.low() != twin.high() {
            twin_mismatch += 1;
        }
    }

    // Marginal laws on an enumerable pair with a bottom barrier under the high chain.
    let low = EnsembleSpec::new(0, 4, vec![1, 0], vec![3, 2])?;
    let g = UpRightPath::new(0, vec![0, 0, 1, 1, 2])?;
    let high = EnsembleSpec::new(0, 4, vec![1, 1], vec![4, 2])?.with_bottom(Barrier::Path(g))?;
    let law_low = uniform_law(&low, DEFAULT_ENUM_CAP)?;
    let law_high = uniform_law(&high, DEFAULT_ENUM_CAP)?;
    let mut chain = CoupledChain::new(low.clone(), high.clone())?;
    let mut rng = root.derive(2).rng();
    for _ in 0..default_burn_in(&low).max(default_burn_in(&high)) {
        chain.step(&mut rng);
    }
    let mut c_low: HashMap<Vec<i64>, u64> = HashMap::new();
    let mut c_high: HashMap<Vec<i64>, u64> = HashMap::new();
    let mut tv_violations = 0u64;
    for _ in 0..cfg.tv_steps {
        if !chain.step(&mut rng).1 {
            tv_violations += 1;
        }
        *c_low.entry(state_key(chain.low())).or_default() += 1;
        *c_high.entry(state_key(chain.high())).or_default() += 1;
    }
    let (tv_low, tv_high) = if cfg.tv_steps > 0 {
        (tv_distance(&c_low, &law_low), tv_distance(&c_high, &law_high))
    } else {
        (f64::NAN, f64::NAN)
    };
    total_violations += tv_violations;

    let tv_ok = cfg.tv_steps == 0 || (tv_low <= cfg.tv_threshold && tv_high <= cfg.tv_threshold);
    let pass = total_violations == 0 && twin_mismatch == 0 && tv_ok;
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        experiment: "coupling".into(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        seed,
        statistics: stats,
        summary: json!({
            "total_steps": total_steps,
            "total_violations": total_violations,
            "identical_spec_mismatches": twin_mismatch,
            "marginal_check": {
                "low": describe(&low),
                "high": describe(&high),
                "states_low": law_low.len(),
                "states_high": law_high.len(),
                "tv_low": tv_low,
                "tv_high": tv_high,
                "threshold": cfg.tv_threshold,
            },
        }),
        pass: Some(pass),
        notes: Vec::new(),
    };
    Ok(ExperimentOutput { report, tables: Vec::new() })
}
