//! Marginals of the rescaled fixed-time column against the limit density.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::scaling::ScalingSpec;
use super::{fmt_f64, CsvTable, ExperimentError, ExperimentOutput, ExperimentReport};
use super::{KEY_CONVERGENCE, SCHEMA_VERSION};
use crate::limit::{LimitDensity, LimitSpec, MarginalCdf};
use crate::sampling::{RngHandle, SequentialSampler};
use crate::stats::{ks_distance, lattice_cdf_distance, normal_cdf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub p: f64,
    pub t: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "T_values", alias = "t_values")]
    pub t_values: Vec<i64>,
    pub n_samples: usize,
    /// Pass threshold for the sup-CDF distance at the largest `T`.
    pub threshold: f64,
    /// Allowed increase of the distance between consecutive `T` values.
    pub noise_band: f64,
    pub batch_size: usize,
    /// Points of the tabulated marginal CDFs of the limit.
    pub cdf_grid: usize,
    pub write_samples: bool,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            p: 0.5,
            t: 0.5,
            a: vec![0.0],
            b: vec![0.0],
            t_values: vec![50, 100, 200, 400],
            n_samples: 200_000,
            threshold: 0.03,
            noise_band: 0.01,
            batch_size: 5_000,
            cdf_grid: 4001,
            write_samples: true,
        }
    }
}

/// `n` draws of `Z^T` for one scale, in deterministic batch order.
pub fn sample_scaled_columns(
    scale: &ScalingSpec,
    n: usize,
    batch_size: usize,
    handle: RngHandle,
) -> Result<Vec<Vec<f64>>, ExperimentError> {
    let (x, y) = scale.boundary()?;
    let m = scale.observation_time();
    // Fails early on an empty state space.
    SequentialSampler::new(x.clone(), y.clone(), scale.t_big)?;
    let batch_size = batch_size.max(1);
    let batches = n.div_ceil(batch_size);
    let parts: Vec<Vec<Vec<f64>>> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut sampler = SequentialSampler::new(x.clone(), y.clone(), scale.t_big)
                .expect("checked above");
            let mut rng = handle.derive(bi as u64).rng();
            let len = batch_size.min(n - bi * batch_size);
            (0..len)
                .map(|_| scale.rescale_column(&sampler.sample_column(&mut rng, m)))
                .collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

enum Target {
    Normal { mean: f64, var: f64 },
    Table(Vec<MarginalCdf>),
}

impl Target {
    fn cdf(&self, i: usize, x: f64) -> f64 {
        match self {
            Target::Normal { mean, var } => normal_cdf(x, *mean, *var),
            Target::Table(t) => t[i].eval(x),
        }
    }
}

/// Samples `Z^T` for every configured `T` and compares each coordinate's empirical CDF
/// with the corresponding marginal of `ρ`.
///
/// The distance is taken half a lattice step either side of each atom, see
/// [`lattice_cdf_distance`]; the raw Kolmogorov distance is reported alongside.
pub fn run_convergence(
    cfg: &ConvergenceConfig,
    seed: u64,
) -> Result<ExperimentOutput, ExperimentError> {
    let spec = LimitSpec::new(cfg.p, cfg.t, cfg.a.clone(), cfg.b.clone())?;
    let k = spec.k();
    if cfg.t_values.is_empty() {
        return Err(ExperimentError::Config("T_values is empty".into()));
    }
    let density = LimitDensity::new(spec.clone())?;
    let target = if k == 1 {
        Target::Normal {
            mean: (1.0 - cfg.t) * cfg.a[0] + cfg.t * cfg.b[0],
            var: spec.single_variance(),
        }
    } else {
        Target::Table((0..k).map(|i| density.marginal_cdf(i, cfg.cdf_grid)).collect())
    };

    let root = RngHandle::from_seed(seed).derive(KEY_CONVERGENCE);
    let mut stats = Vec::new();
    let mut per_t_distance = Vec::new();
    let mut samples_header = vec!["T".to_string(), "replicate".to_string()];
    samples_header.extend((1..=k).map(|i| format!("z_{i}")));
    let mut samples_csv = CsvTable::with_header("samples.csv", samples_header);
    let mut cdf_csv = CsvTable::new("cdf.csv", &["T", "coordinate", "x", "empirical", "limit"]);

    for (ti, &tt) in cfg.t_values.iter().enumerate() {
        let scale = ScalingSpec::new(tt, cfg.p, cfg.t, cfg.a.clone(), cfg.b.clone());
        let (x, y) = scale.boundary()?;
        let draws = sample_scaled_columns(&scale, cfg.n_samples, cfg.batch_size, root.derive(ti as u64))?;
        if cfg.write_samples {
            for (r, z) in draws.iter().enumerate() {
                samples_csv.push(
                    [tt.to_string(), r.to_string()]
                        .into_iter()
                        .chain(z.iter().map(|v| fmt_f64(*v))),
                );
            }
        }
        let spacing = 1.0 / (tt as f64).sqrt();
        let mut coord_dist = Vec::new();
        let mut coord_ks = Vec::new();
        for i in 0..k {
            let mut col: Vec<f64> = draws.iter().map(|z| z[i]).collect();
            col.sort_by(f64::total_cmp);
            if col.is_empty() {
                continue;
            }
            let d = lattice_cdf_distance(&col, spacing, |v| target.cdf(i, v));
            let ks = ks_distance(&col, |v| target.cdf(i, v));
            coord_dist.push(d);
            coord_ks.push(ks);
            let mut j = 0;
            while j < col.len() {
                let v = col[j];
                let next = col[j..].partition_point(|&u| u <= v) + j;
                let mid = v + spacing / 2.0;
                cdf_csv.push([
                    tt.to_string(),
                    (i + 1).to_string(),
                    fmt_f64(mid),
                    fmt_f64(next as f64 / col.len() as f64),
                    fmt_f64(target.cdf(i, mid)),
                ]);
                j = next;
            }
        }
        let dist = coord_dist.iter().copied().fold(0.0, f64::max);
        if !coord_dist.is_empty() {
            per_t_distance.push(dist);
        }
        stats.push(json!({
            "T": tt,
            "x": x,
            "y": y,
            "observation_time": scale.observation_time(),
            "n_samples": draws.len(),
            "sup_cdf_distance": coord_dist,
            "raw_ks_distance": coord_ks,
            "max_sup_cdf_distance": dist,
        }));
    }

    let mut notes = Vec::new();
    let pass = if cfg.n_samples == 0 {
        notes.push("insufficient data: n_samples = 0".to_string());
        None
    } else {
        let last = *per_t_distance.last().unwrap();
        let monotone = per_t_distance.windows(2).all(|w| w[1] <= w[0] + cfg.noise_band);
        Some(last <= cfg.threshold && monotone)
    };

    let mut density_csv = CsvTable::new("density_grid.csv", &["coordinate", "z", "density"]);
    match &target {
        Target::Normal { mean, var } => {
            for j in 0..=400 {
                let z = mean + (j as f64 - 200.0) / 200.0 * 5.0 * var.sqrt();
                density_csv.push(["1".to_string(), fmt_f64(z), fmt_f64(density.rho(&[z]))]);
            }
        }
        Target::Table(tables) => {
            for (i, t) in tables.iter().enumerate() {
                let step = (t.grid.len() / 400).max(1);
                for j in (0..t.grid.len()).step_by(step) {
                    density_csv.push([
                        (i + 1).to_string(),
                        fmt_f64(t.grid[j]),
                        fmt_f64(t.density[j]),
                    ]);
                }
            }
        }
    }

    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        experiment: "convergence".into(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        seed,
        statistics: stats,
        summary: json!({
            "distance_by_T": per_t_distance,
            "threshold": cfg.threshold,
            "noise_band": cfg.noise_band,
            "log_Zc": density.ln_zc(),
        }),
        pass,
        notes,
    };
    let mut tables = vec![cdf_csv, density_csv];
    if cfg.write_samples {
        tables.insert(0, samples_csv);
    }
    Ok(ExperimentOutput { report, tables })
}
