//! `H`, `Z_c` and `ρ`, plus marginal CDFs and the confluent limit check.
//!
//! Each block `(α, m)` of `a` contributes the rows `(c₁ z_j)^r e^{c₁ α z_j}`, `r < m`, to `φ`
//! (likewise `b` and `c₂` for `ψ`). Both determinants are multiplied by `(-1)^{C(m,2)}` per
//! block. With that sign `φ, ψ > 0` on the open chamber for every block structure, and the
//! confluent limit `ε^{-u-v} H_ε → H` holds with constant one.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quadrature::{OrderedRule, QuadratureOptions};
use super::{Blocks, LimitError, LimitSpec};
use crate::linalg::{log_det, SignedLog};

fn ln_block_det(c: f64, blocks: &Blocks, z: &[f64]) -> SignedLog {
    let mut rows: Vec<Vec<SignedLog>> = Vec::with_capacity(z.len());
    for (&alpha, &m) in blocks.values.iter().zip(&blocks.mult) {
        for r in 0..m {
            rows.push(
                z.iter()
                    .map(|&zj| {
                        let base = c * alpha * zj;
                        if r == 0 {
                            SignedLog { sign: 1.0, ln_abs: base }
                        } else if zj == 0.0 {
                            SignedLog::ZERO
                        } else {
                            let sign = if zj < 0.0 && r % 2 == 1 { -1.0 } else { 1.0 };
                            SignedLog {
                                sign,
                                ln_abs: r as f64 * (c * zj.abs()).ln() + base,
                            }
                        }
                    })
                    .collect(),
            );
        }
    }
    let mut d = log_det(&rows);
    if blocks.pair_count() % 2 == 1 {
        d.sign = -d.sign;
    }
    d
}

/// `H(z)` in signed-log form; the sign is only ever negative through rounding.
pub fn ln_h_density(spec: &LimitSpec, z: &[f64]) -> SignedLog {
    assert_eq!(z.len(), spec.k(), "z has the wrong dimension");
    let (c1, c2, c3) = spec.constants();
    let phi = ln_block_det(c1, spec.blocks_a(), z);
    let psi = ln_block_det(c2, spec.blocks_b(), z);
    let gauss = SignedLog {
        sign: 1.0,
        ln_abs: -c3 * z.iter().map(|v| v * v).sum::<f64>(),
    };
    phi.mul(psi).mul(gauss)
}

/// `H(z) = φ(a, z, m) ψ(b, z, n) ∏ e^{-c₃ z_i²}`, clamped at zero.
pub fn h_density(spec: &LimitSpec, z: &[f64]) -> f64 {
    ln_h_density(spec, z).to_f64().max(0.0)
}

fn ln_zc_closed_form(spec: &LimitSpec) -> Result<f64, LimitError> {
    if !spec.is_distinct() {
        return Err(LimitError::Domain(
            "closed form needs pairwise distinct entries in a and b".into(),
        ));
    }
    let k = spec.k() as f64;
    let (p, t) = (spec.p(), spec.t());
    let (c1, c2, _) = spec.constants();
    let v = p * (1.0 - p);
    let rows: Vec<Vec<SignedLog>> = spec
        .b()
        .iter()
        .map(|bi| {
            spec.a()
                .iter()
                .map(|aj| SignedLog {
                    sign: 1.0,
                    ln_abs: -(bi - aj) * (bi - aj) / (2.0 * v),
                })
                .collect()
        })
        .collect();
    let det = log_det(&rows);
    if det.sign <= 0.0 {
        return Err(LimitError::Domain("Gaussian kernel determinant is not positive".into()));
    }
    Ok(k / 2.0 * (2.0 * PI).ln()
        + k / 2.0 * (v * t * (1.0 - t)).ln()
        + c1 / 2.0 * spec.a().iter().map(|x| x * x).sum::<f64>()
        + c2 / 2.0 * spec.b().iter().map(|x| x * x).sum::<f64>()
        + det.ln_abs)
}

/// Closed-form `Z_c` for distinct entries.
pub fn normalizing_constant_closed_form(spec: &LimitSpec) -> Result<f64, LimitError> {
    ln_zc_closed_form(spec).map(f64::exp)
}

/// Integration box `[-L, L]` from the envelope `∏ e^{C|z| - c₃ z²}`.
fn envelope_half_width(spec: &LimitSpec, opts: &QuadratureOptions) -> f64 {
    let (c1, c2, c3) = spec.constants();
    let c = c1 * spec.a().iter().map(|x| x.abs()).sum::<f64>()
        + c2 * spec.b().iter().map(|x| x.abs()).sum::<f64>();
    c / (2.0 * c3) + opts.tail_sigmas / (2.0 * c3).sqrt()
}

/// Largest `ln H` over a coarse grid of the ordered box, used to keep integrands near one.
fn ln_h_reference(spec: &LimitSpec, half: f64) -> f64 {
    let rule = OrderedRule::new(-half, half, 8, 4);
    let mut best = f64::NEG_INFINITY;
    rule.integrate_ordered(spec.k(), None, &mut |z| {
        let h = ln_h_density(spec, z);
        if h.sign > 0.0 {
            best = best.max(h.ln_abs);
        }
        0.0
    });
    best
}

fn ln_zc_quadrature(spec: &LimitSpec, opts: &QuadratureOptions) -> Result<f64, LimitError> {
    let half = envelope_half_width(spec, opts);
    let reference = ln_h_reference(spec, half);
    if !reference.is_finite() {
        return Err(LimitError::DegenerateH);
    }
    let k = spec.k();
    let mut integrand = |z: &[f64]| {
        let h = ln_h_density(spec, z);
        if h.sign > 0.0 {
            (h.ln_abs - reference).exp()
        } else {
            0.0
        }
    };
    let mut panels = opts.initial_panels;
    let mut prev = OrderedRule::new(-half, half, panels, opts.order)
        .integrate_ordered(k, None, &mut integrand);
    let mut change = f64::INFINITY;
    while panels * 2 <= opts.max_panels {
        panels *= 2;
        let cur = OrderedRule::new(-half, half, panels, opts.order)
            .integrate_ordered(k, None, &mut integrand);
        change = ((cur - prev) / cur).abs();
        prev = cur;
        if change < opts.rel_tol {
            return Ok(prev.ln() + reference);
        }
    }
    Err(LimitError::QuadratureNonConvergence { tol: opts.rel_tol, change })
}

/// `Z_c = ∫_{W_k} H` by adaptive quadrature over the ordered region.
pub fn normalizing_constant_quadrature(
    spec: &LimitSpec,
    opts: &QuadratureOptions,
) -> Result<f64, LimitError> {
    ln_zc_quadrature(spec, opts).map(f64::exp)
}

/// Closed form when all entries are distinct, quadrature otherwise.
pub fn normalizing_constant(spec: &LimitSpec) -> Result<f64, LimitError> {
    if spec.is_distinct() {
        normalizing_constant_closed_form(spec)
    } else {
        normalizing_constant_quadrature(spec, &QuadratureOptions::default())
    }
}

/// One evaluation of the density: `rho = H / Zc` on the open chamber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEval {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "Zc")]
    pub zc: f64,
    pub rho: f64,
}

/// `ρ` with its normalizing constant computed once.
#[derive(Debug, Clone)]
pub struct LimitDensity {
    spec: LimitSpec,
    ln_zc: f64,
}

fn strictly_decreasing(z: &[f64]) -> bool {
    z.windows(2).all(|w| w[0] > w[1])
}

impl LimitDensity {
    pub fn new(spec: LimitSpec) -> Result<Self, LimitError> {
        Self::with_options(spec, &QuadratureOptions::default())
    }

    pub fn with_options(spec: LimitSpec, opts: &QuadratureOptions) -> Result<Self, LimitError> {
        let ln_zc = if spec.is_distinct() {
            ln_zc_closed_form(&spec)?
        } else {
            ln_zc_quadrature(&spec, opts)?
        };
        Ok(Self { spec, ln_zc })
    }

    pub fn spec(&self) -> &LimitSpec {
        &self.spec
    }

    pub fn ln_zc(&self) -> f64 {
        self.ln_zc
    }

    pub fn zc(&self) -> f64 {
        self.ln_zc.exp()
    }

    /// `ρ(z)`, computed as `exp(ln H - ln Z_c)` so it stays finite when `H` and `Z_c` do not.
    pub fn rho(&self, z: &[f64]) -> f64 {
        if !strictly_decreasing(z) {
            return 0.0;
        }
        let h = ln_h_density(&self.spec, z);
        if h.sign > 0.0 {
            (h.ln_abs - self.ln_zc).exp()
        } else {
            0.0
        }
    }

    pub fn eval(&self, z: &[f64]) -> DensityEval {
        DensityEval {
            h: h_density(&self.spec, z),
            zc: self.zc(),
            rho: self.rho(z),
        }
    }

    /// `∫ ρ` over the ordered region by quadrature with `panels` panels.
    pub fn total_mass(&self, panels: usize, order: usize) -> f64 {
        let half = envelope_half_width(&self.spec, &QuadratureOptions::default());
        OrderedRule::new(-half, half, panels, order)
            .integrate_ordered(self.spec.k(), None, &mut |z| self.rho(z))
    }

    /// `∫ ρ` computed independently of the ordered rule: `H` is symmetric in `z`, so the
    /// chamber integral is `1/k!` of the tensor-product integral over the whole box.
    pub fn total_mass_symmetric(&self, panels: usize, order: usize) -> f64 {
        let half = envelope_half_width(&self.spec, &QuadratureOptions::default());
        let k = self.spec.k();
        let kfact: f64 = (1..=k).map(|i| i as f64).product();
        let full = OrderedRule::new(-half, half, panels, order).integrate_box(k, &mut |z| {
            let h = ln_h_density(&self.spec, z);
            if h.sign > 0.0 {
                (h.ln_abs - self.ln_zc).exp()
            } else {
                0.0
            }
        });
        full / kfact
    }

    /// Density of the `i`-th coordinate (0-based) at `v`.
    pub fn marginal_density(&self, i: usize, v: f64, panels: usize, order: usize) -> f64 {
        let half = envelope_half_width(&self.spec, &QuadratureOptions::default());
        OrderedRule::new(-half, half, panels, order).integrate_ordered(
            self.spec.k(),
            Some((i, v)),
            &mut |z| self.rho(z),
        )
    }

    /// Tabulated CDF of coordinate `i` on `grid_points` equally spaced points.
    pub fn marginal_cdf(&self, i: usize, grid_points: usize) -> MarginalCdf {
        assert!(i < self.spec.k() && grid_points >= 3);
        let half = envelope_half_width(&self.spec, &QuadratureOptions::default());
        let h = 2.0 * half / (grid_points - 1) as f64;
        let grid: Vec<f64> = (0..grid_points).map(|j| -half + j as f64 * h).collect();
        let dens: Vec<f64> = if self.spec.k() == 1 {
            grid.iter().map(|&v| self.rho(&[v])).collect()
        } else {
            grid.iter()
                .map(|&v| self.marginal_density(i, v, 16, 16))
                .collect()
        };
        let mut cdf = vec![0.0; grid_points];
        for j in 1..grid_points {
            cdf[j] = cdf[j - 1] + 0.5 * h * (dens[j] + dens[j - 1]);
        }
        let total = cdf[grid_points - 1];
        for c in &mut cdf {
            *c /= total;
        }
        MarginalCdf { grid, density: dens, cdf, raw_mass: total }
    }
}

/// Piecewise-linear CDF on a uniform grid.
#[derive(Debug, Clone)]
pub struct MarginalCdf {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Integral of the tabulated density before renormalization.
    pub raw_mass: f64,
}

impl MarginalCdf {
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len();
        if x <= self.grid[0] {
            return 0.0;
        }
        if x >= self.grid[n - 1] {
            return 1.0;
        }
        let h = self.grid[1] - self.grid[0];
        let pos = (x - self.grid[0]) / h;
        let j = (pos.floor() as usize).min(n - 2);
        let frac = pos - j as f64;
        self.cdf[j] + frac * (self.cdf[j + 1] - self.cdf[j])
    }
}

/// `1{z strictly decreasing} H(z) / Z_c`.
pub fn rho(spec: &LimitSpec, z: &[f64]) -> Result<f64, LimitError> {
    Ok(LimitDensity::new(spec.clone())?.rho(z))
}

/// Which perturbation of the blocks to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfluentSign {
    Plus,
    Minus,
}

fn perturb(blocks: &Blocks, eps: f64, sign: ConfluentSign) -> Vec<f64> {
    let mut out = Vec::new();
    for (&v, &m) in blocks.values.iter().zip(&blocks.mult) {
        for j in 1..=m {
            out.push(match sign {
                ConfluentSign::Plus => v + (m - j + 1) as f64 * eps,
                ConfluentSign::Minus => v - j as f64 * eps,
            });
        }
    }
    out
}

/// `ε^{-u-v} H^±_ε(z) / H(z)` with `u = Σ C(m_i, 2)`, `v = Σ C(n_i, 2)`.
///
/// `H^±_ε` is the distinct-entry density for the split vectors `α_i + (m_i - j + 1)ε`
/// (plus) or `α_i - jε` (minus). The ratio tends to one, with error `O(ε)`.
pub fn confluent_check(
    spec: &LimitSpec,
    z: &[f64],
    eps: f64,
    sign: ConfluentSign,
) -> Result<f64, LimitError> {
    if !(eps > 0.0) {
        return Err(LimitError::Domain(format!("eps = {eps} must be positive")));
    }
    let a = perturb(spec.blocks_a(), eps, sign);
    let b = perturb(spec.blocks_b(), eps, sign);
    if !strictly_decreasing(&a) || !strictly_decreasing(&b) {
        return Err(LimitError::Domain(format!(
            "eps = {eps} too large: perturbed blocks overlap"
        )));
    }
    let split = LimitSpec::new(spec.p(), spec.t(), a, b)?;
    if !split.is_distinct() {
        return Err(LimitError::Domain(format!("eps = {eps} below the block tolerance")));
    }
    let h = ln_h_density(spec, z);
    if h.sign <= 0.0 {
        return Err(LimitError::DegenerateH);
    }
    let h_eps = ln_h_density(&split, z);
    let power = (spec.blocks_a().pair_count() + spec.blocks_b().pair_count()) as f64;
    Ok(h_eps.sign * (h_eps.ln_abs - power * eps.ln() - h.ln_abs).exp())
}
