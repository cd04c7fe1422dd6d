//! Smallest gap between consecutive curves at the observation time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::scaling::ScalingSpec;
use super::{fmt_f64, CsvTable, ExperimentError, ExperimentOutput, ExperimentReport};
use super::{KEY_MINGAP, SCHEMA_VERSION};
use crate::limit::LimitSpec;
use crate::sampling::{RngHandle, SequentialSampler};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MingapConfig {
    pub p: f64,
    pub t: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "T_values", alias = "t_values")]
    pub t_values: Vec<i64>,
    pub n_samples: usize,
    /// Gap thresholds in units of `√T`. `0` reports the probability of a tie.
    pub deltas: Vec<f64>,
    /// Pass bound for the smallest positive `δ` at the largest `T`.
    pub epsilon: f64,
    pub batch_size: usize,
}

impl Default for MingapConfig {
    fn default() -> Self {
        Self {
            p: 0.5,
            t: 0.5,
            a: vec![1.0, -1.0],
            b: vec![1.0, -1.0],
            t_values: vec![50, 100, 200, 400],
            n_samples: 20_000,
            deltas: vec![0.0, 0.05, 0.1, 0.2, 0.5],
            epsilon: 0.1,
            batch_size: 5_000,
        }
    }
}

/// `min_i (L_i − L_{i+1})` at the observation time, for `n` exact draws.
fn sample_min_gaps(
    scale: &ScalingSpec,
    n: usize,
    batch_size: usize,
    handle: RngHandle,
) -> Result<Vec<i64>, ExperimentError> {
    let (x, y) = scale.boundary()?;
    let m = scale.observation_time();
    SequentialSampler::new(x.clone(), y.clone(), scale.t_big)?;
    let batch_size = batch_size.max(1);
    let batches = n.div_ceil(batch_size);
    let parts: Vec<Vec<i64>> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut sampler = SequentialSampler::new(x.clone(), y.clone(), scale.t_big)
                .expect("checked above");
            let mut rng = handle.derive(bi as u64).rng();
            let len = batch_size.min(n - bi * batch_size);
            (0..len)
                .map(|_| {
                    let col = sampler.sample_column(&mut rng, m);
                    col.windows(2).map(|w| w[0] - w[1]).min().expect("k >= 2")
                })
                .collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Estimates `P(min gap < δ√T)` for each `δ > 0` and `P(min gap = 0)` for `δ = 0`.
pub fn run_mingap(cfg: &MingapConfig, seed: u64) -> Result<ExperimentOutput, ExperimentError> {
    let spec = LimitSpec::new(cfg.p, cfg.t, cfg.a.clone(), cfg.b.clone())?;
    if spec.k() < 2 {
        return Err(ExperimentError::Domain("the gap needs k >= 2".into()));
    }
    if cfg.t_values.is_empty() {
        return Err(ExperimentError::Config("T_values is empty".into()));
    }
    if cfg.deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(ExperimentError::Config("deltas must be finite and >= 0".into()));
    }
    let root = RngHandle::from_seed(seed).derive(KEY_MINGAP);
    let mut table = CsvTable::new("mingap.csv", &["T", "delta", "probability"]);
    let mut stats = Vec::new();
    let mut last_curve = Vec::new();
    for (ti, &tt) in cfg.t_values.iter().enumerate() {
        let scale = ScalingSpec::new(tt, cfg.p, cfg.t, cfg.a.clone(), cfg.b.clone());
        let gaps = sample_min_gaps(&scale, cfg.n_samples, cfg.batch_size, root.derive(ti as u64))?;
        let root_t = (tt as f64).sqrt();
        let curve: Vec<f64> = cfg
            .deltas
            .iter()
            .map(|&d| {
                let hits = if d == 0.0 {
                    gaps.iter().filter(|&&g| g == 0).count()
                } else {
                    gaps.iter().filter(|&&g| (g as f64) < d * root_t).count()
                };
                if gaps.is_empty() {
                    f64::NAN
                } else {
                    hits as f64 / gaps.len() as f64
                }
            })
            .collect();
        for (d, pr) in cfg.deltas.iter().zip(&curve) {
            table.push([tt.to_string(), fmt_f64(*d), fmt_f64(*pr)]);
        }
        stats.push(json!({
            "T": tt,
            "n_samples": gaps.len(),
            "deltas": cfg.deltas,
            "probability": curve,
            "smallest_gap": gaps.iter().min(),
        }));
        last_curve = curve;
    }

    let mut notes = vec!["delta = 0 is the tie probability and is not judged".to_string()];
    let smallest = cfg
        .deltas
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > 0.0)
        .min_by(|a, b| a.1.total_cmp(b.1));
    let pass = match smallest {
        _ if cfg.n_samples == 0 => {
            notes.push("insufficient data: n_samples = 0".to_string());
            None
        }
        None => {
            notes.push("no positive delta configured".to_string());
            None
        }
        Some((j, _)) => Some(last_curve[j] < cfg.epsilon),
    };
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        experiment: "mingap".into(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        seed,
        statistics: stats,
        summary: json!({
            "largest_T": cfg.t_values.last(),
            "smallest_positive_delta": smallest.map(|(_, d)| *d),
            "probability": smallest.map(|(j, _)| last_curve[j]),
            "epsilon": cfg.epsilon,
        }),
        pass,
        notes,
    };
    Ok(ExperimentOutput { report, tables: vec![table] })
}
