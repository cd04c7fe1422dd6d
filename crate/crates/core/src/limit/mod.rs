//! The limiting density of the diffusively rescaled fixed-time column, and the
//! Brownian-bridge formulas used alongside it.
//!
//! All determinants are evaluated in log space with row rescaling, since entries such as
//! `e^{c α z}` easily exceed the `f64` range.

pub mod brownian;
pub mod density;
pub mod quadrature;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use brownian::{
    bb_abs_max_tail, bb_max_tail, bridge_covariance, sample_brownian_bridge, sample_two_bridge,
};
pub use density::{
    confluent_check, h_density, ln_h_density, normalizing_constant,
    normalizing_constant_closed_form, normalizing_constant_quadrature, rho, ConfluentSign,
    DensityEval, LimitDensity, MarginalCdf,
};
pub use quadrature::QuadratureOptions;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} is not weakly decreasing")]
    NotWeaklyDecreasing(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("H vanishes at the evaluation point")]
    DegenerateH,
    #[error("quadrature did not reach relative tolerance {tol:e} (last change {change:e})")]
    QuadratureNonConvergence { tol: f64, change: f64 },
}

/// `(c1, c2, c3) = (1/(p(1-p)t), 1/(p(1-p)(1-t)), 1/(2p(1-p)t(1-t)))`.
pub fn limit_constants(p: f64, t: f64) -> Result<(f64, f64, f64), LimitError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LimitError::Domain(format!("p = {p} must lie in (0, 1)")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(LimitError::Domain(format!("t = {t} must lie in (0, 1)")));
    }
    let v = p * (1.0 - p);
    Ok((1.0 / (v * t), 1.0 / (v * (1.0 - t)), 1.0 / (2.0 * v * t * (1.0 - t))))
}

/// Default tolerance for treating two float entries as one block.
pub fn block_tolerance(v: f64) -> f64 {
    1e-12 * v.abs().max(1.0)
}

/// Run-length encoding of a weakly decreasing vector; entries within `tol` of the
/// previous entry of the run join it.
pub fn block_structure(v: &[f64], tol: f64) -> Result<(Vec<f64>, Vec<usize>), LimitError> {
    if v.windows(2).any(|w| w[1] > w[0] + tol) {
        return Err(LimitError::NotWeaklyDecreasing("vector"));
    }
    let mut values: Vec<f64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    for &x in v {
        match values.last() {
            Some(&last) if (last - x).abs() <= tol => *mult.last_mut().unwrap() += 1,
            _ => {
                values.push(x);
                mult.push(1);
            }
        }
    }
    Ok((values, mult))
}

/// Distinct values and their multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Blocks {
    pub values: Vec<f64>,
    pub mult: Vec<usize>,
}

impl Blocks {
    fn of(v: &[f64], name: &'static str) -> Result<Self, LimitError> {
        let tol = v.iter().map(|x| block_tolerance(*x)).fold(0.0, f64::max);
        let (values, mult) =
            block_structure(v, tol).map_err(|_| LimitError::NotWeaklyDecreasing(name))?;
        Ok(Self { values, mult })
    }

    pub fn all_simple(&self) -> bool {
        self.mult.iter().all(|&m| m == 1)
    }

    /// `Σ C(m_i, 2)`.
    pub fn pair_count(&self) -> usize {
        self.mult.iter().map(|m| m * (m - 1) / 2).sum()
    }

    /// Expands back to the full vector.
    pub fn expand(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.mult)
            .flat_map(|(&v, &m)| std::iter::repeat(v).take(m))
            .collect()
    }
}

/// Parameters `(p, t, a, b)` of the limit density, with block structures of `a` and `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSpec {
    p: f64,
    t: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    blocks_a: Blocks,
    blocks_b: Blocks,
}

impl LimitSpec {
    pub fn new(p: f64, t: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self, LimitError> {
        limit_constants(p, t)?;
        if a.is_empty() || a.len() != b.len() {
            return Err(LimitError::Dimension(format!(
                "a has {} entries, b has {}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(LimitError::Domain("entries of a and b must be finite".into()));
        }
        let blocks_a = Blocks::of(&a, "a")?;
        let blocks_b = Blocks::of(&b, "b")?;
        Ok(Self { p, t, a, b, blocks_a, blocks_b })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn k(&self) -> usize {
        self.a.len()
    }
    pub fn a(&self) -> &[f64] {
        &self.a
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn blocks_a(&self) -> &Blocks {
        &self.blocks_a
    }
    pub fn blocks_b(&self) -> &Blocks {
        &self.blocks_b
    }

    pub fn constants(&self) -> (f64, f64, f64) {
        limit_constants(self.p, self.t).expect("validated at construction")
    }

    /// True when both `a` and `b` have pairwise distinct entries.
    pub fn is_distinct(&self) -> bool {
        self.blocks_a.all_simple() && self.blocks_b.all_simple()
    }

    /// Variance `p(1-p)t(1-t)` of each coordinate when `k = 1`.
    pub fn single_variance(&self) -> f64 {
        self.p * (1.0 - self.p) * self.t * (1.0 - self.t)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, LimitError> {
        let doc: LimitSpecDoc =
            toml::from_str(text).map_err(|e| LimitError::Domain(e.to_string()))?;
        Self::new(doc.p, doc.t, doc.a, doc.b)
    }

    pub fn to_doc(&self) -> LimitSpecDoc {
        LimitSpecDoc {
            p: self.p,
            t: self.t,
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }
}

/// Serialized form of a [`LimitSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSpecDoc {
    pub p: f64,
    pub t: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}
