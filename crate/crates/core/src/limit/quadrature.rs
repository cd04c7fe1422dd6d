//! Composite Gauss–Legendre integration over ordered regions `hi ≥ z_1 ≥ ... ≥ z_k ≥ lo`.
//!
//! Panels sit on one fixed set of breakpoints shared by every level, and a level whose
//! upper limit falls inside a panel integrates over the truncated panel. The resolution is
//! therefore the same everywhere, however the inner limits move.

use crate::linalg::gauss_legendre;

/// Controls the adaptive rules in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    pub initial_panels: usize,
    pub max_panels: usize,
    /// Stop once two successive panel doublings agree to this relative accuracy.
    pub rel_tol: f64,
    /// Half-width of the box in envelope standard deviations past the envelope peak.
    pub tail_sigmas: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            order: 16,
            initial_panels: 4,
            max_panels: 128,
            rel_tol: 1e-6,
            tail_sigmas: 6.0,
        }
    }
}

pub(crate) struct OrderedRule {
    breaks: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl OrderedRule {
    pub(crate) fn new(lo: f64, hi: f64, panels: usize, order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        let breaks = (0..=panels)
            .map(|j| lo + (hi - lo) * j as f64 / panels as f64)
            .collect();
        Self { breaks, nodes, weights }
    }

    fn lo(&self) -> f64 {
        self.breaks[0]
    }

    fn hi(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// Calls `g(x, w)` for every node of the rule restricted to `[lower, upper]`.
    fn for_nodes(&self, lower: f64, upper: f64, mut g: impl FnMut(f64, f64)) {
        for win in self.breaks.windows(2) {
            let a = win[0].max(lower);
            let b = win[1].min(upper);
            if b <= a {
                continue;
            }
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                g(mid + half * x, half * w);
            }
        }
    }

    /// `∫ f` over `hi ≥ z_1 ≥ ... ≥ z_k ≥ lo`, optionally with coordinate `fixed.0` pinned
    /// to `fixed.1` (which then integrates the remaining `k - 1` coordinates).
    pub(crate) fn integrate_ordered(
        &self,
        k: usize,
        fixed: Option<(usize, f64)>,
        f: &mut dyn FnMut(&[f64]) -> f64,
    ) -> f64 {
        let mut z = vec![0.0; k];
        self.level(0, k, self.hi(), fixed, &mut z, f)
    }

    fn level(
        &self,
        d: usize,
        k: usize,
        upper: f64,
        fixed: Option<(usize, f64)>,
        z: &mut Vec<f64>,
        f: &mut dyn FnMut(&[f64]) -> f64,
    ) -> f64 {
        if d == k {
            return f(z);
        }
        if let Some((i, v)) = fixed {
            if i == d {
                if v > upper {
                    return 0.0;
                }
                z[d] = v;
                return self.level(d + 1, k, v, fixed, z, f);
            }
        }
        let lower = match fixed {
            Some((i, v)) if d < i => v,
            _ => self.lo(),
        };
        let mut acc = 0.0;
        self.for_nodes(lower, upper, |x, w| {
            z[d] = x;
            acc += w * self.level(d + 1, k, x, fixed, z, f);
        });
        acc
    }

    /// Tensor-product rule over the full box `[lo, hi]^k`.
    pub(crate) fn integrate_box(&self, k: usize, f: &mut dyn FnMut(&[f64]) -> f64) -> f64 {
        fn rec(
            rule: &OrderedRule,
            d: usize,
            z: &mut Vec<f64>,
            f: &mut dyn FnMut(&[f64]) -> f64,
        ) -> f64 {
            if d == z.len() {
                return f(z);
            }
            let mut acc = 0.0;
            rule.for_nodes(rule.lo(), rule.hi(), |x, w| {
                z[d] = x;
                acc += w * rec(rule, d + 1, z, f);
            });
            acc
        }
        let mut z = vec![0.0; k];
        rec(self, 0, &mut z, f)
    }
}
