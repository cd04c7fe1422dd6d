//! Integer boundary data for a diffusive scale, and the rescaling of ensembles to curves.

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::ensemble::BernoulliLineEnsemble;

/// Boundary data `x^T = round(a√T)`, `y^T = round(pT + b√T)` for a limit `(p, t, a, b)`.
///
/// Rounding to nearest keeps the boundary error symmetric; `floor` would bias every
/// coordinate downward by up to `1/√T` in rescaled units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    #[serde(rename = "T")]
    pub t_big: i64,
    pub p: f64,
    pub t: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Makes `v` weakly decreasing by lowering entries that exceed their predecessor.
fn repair_decreasing(v: &mut [i64]) {
    for i in 1..v.len() {
        if v[i] > v[i - 1] {
            v[i] = v[i - 1];
        }
    }
}

impl ScalingSpec {
    pub fn new(t_big: i64, p: f64, t: f64, a: Vec<f64>, b: Vec<f64>) -> Self {
        Self { t_big, p, t, a, b }
    }

    /// `(x^T, y^T)` after minimal repair; errors when no ensemble exists.
    pub fn boundary(&self) -> Result<(Vec<i64>, Vec<i64>), ExperimentError> {
        let tt = self.t_big;
        if tt < 1 || self.a.len() != self.b.len() || self.a.is_empty() {
            return Err(ExperimentError::InfeasibleScale { t: tt });
        }
        let root = (tt as f64).sqrt();
        let mut x: Vec<i64> = self.a.iter().map(|a| (a * root).round() as i64).collect();
        let mut y: Vec<i64> = self
            .b
            .iter()
            .map(|b| (self.p * tt as f64 + b * root).round() as i64)
            .collect();
        repair_decreasing(&mut x);
        repair_decreasing(&mut y);
        for i in 0..x.len() {
            if y[i] < x[i] || y[i] - x[i] > tt {
                return Err(ExperimentError::InfeasibleScale { t: tt });
            }
        }
        Ok((x, y))
    }

    /// The observation time `⌊tT⌋`.
    pub fn observation_time(&self) -> i64 {
        (self.t * self.t_big as f64).floor() as i64
    }

    /// `(L(⌊tT⌋) - ptT) / √T`.
    pub fn rescale_column(&self, column: &[i64]) -> Vec<f64> {
        let tt = self.t_big as f64;
        let shift = self.p * self.t * tt;
        column.iter().map(|&v| (v as f64 - shift) / tt.sqrt()).collect()
    }
}

/// Exponent `α`, slope `p` and curvature `λ` of the edge rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleSpec {
    pub alpha: f64,
    pub p: f64,
    pub lambda: f64,
}

impl RescaleSpec {
    pub fn new(alpha: f64, p: f64, lambda: f64) -> Result<Self, ExperimentError> {
        if !(alpha > 0.0) || !(lambda > 0.0) {
            return Err(ExperimentError::Domain(format!(
                "alpha = {alpha} and lambda = {lambda} must be positive"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(ExperimentError::Domain(format!("p = {p} must lie in (0, 1)")));
        }
        Ok(Self { alpha, p, lambda })
    }
}

/// Curves of a rescaled ensemble on a grid of `s` values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescaledCurves {
    pub s: Vec<f64>,
    /// `f_i^N(s)`, parabola included.
    pub f: Vec<Vec<f64>>,
    /// `(f_i^N(s) - λs²) / √(p(1-p))`.
    pub curves: Vec<Vec<f64>>,
    /// Half-width `ψ` of the window in `s` units; values beyond it are held constant.
    pub psi: f64,
}

/// `f_i^N(s) = N^{-α/2} (L_i(sN^α) - p s N^α + λ s² N^{α/2})` with linear interpolation
/// between lattice times.
///
/// The usable window is `|s| ≤ ψ`, where `ψ N^α` is the largest symmetric time interval
/// around zero inside the ensemble; `f` is held at its value at `±ψ` beyond it.
pub fn rescale_ensemble(
    ens: &BernoulliLineEnsemble,
    spec: &RescaleSpec,
    n: u64,
    s_grid: &[f64],
) -> Result<RescaledCurves, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::Domain("N must be positive".into()));
    }
    let scale = (n as f64).powf(spec.alpha);
    let half = (-ens.t0()).min(ens.t1());
    if half <= 0 {
        return Err(ExperimentError::WindowTooSmall {
            t0: ens.t0(),
            t1: ens.t1(),
        });
    }
    let psi = half as f64 / scale;
    let root = scale.sqrt();
    let sd = (spec.p * (1.0 - spec.p)).sqrt();
    let mut f = Vec::with_capacity(ens.k());
    let mut curves = Vec::with_capacity(ens.k());
    for path in ens.paths() {
        let mut fi = Vec::with_capacity(s_grid.len());
        let mut ci = Vec::with_capacity(s_grid.len());
        for &s0 in s_grid {
            let s = s0.clamp(-psi, psi);
            let time = s * scale;
            let lo = time.floor();
            let frac = time - lo;
            let l0 = path.at(lo as i64).expect("inside window") as f64;
            let l = if frac > 0.0 {
                let l1 = path.at(lo as i64 + 1).expect("inside window") as f64;
                l0 + frac * (l1 - l0)
            } else {
                l0
            };
            let v = (l - spec.p * time + spec.lambda * s * s * root) / root;
            fi.push(v);
            ci.push((v - spec.lambda * s * s) / sd);
        }
        f.push(fi);
        curves.push(ci);
    }
    Ok(RescaledCurves {
        s: s_grid.to_vec(),
        f,
        curves,
        psi,
    })
}
