//! Counting non-crossing Bernoulli ensembles: product of binomials, Jacobi–Trudi
//! determinants, and an exhaustive enumeration oracle that handles barriers.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::binomial::{elem_sym, BinomialCache};
use super::det::bareiss_det;
use super::ExactError;
use crate::ensemble::{is_admissible, BernoulliLineEnsemble, EnsembleSpec, UpRightPath};

/// Default limit on the number of unconstrained tuples the enumerator visits.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Exact non-negative count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactCount(pub BigUint);

impl ExactCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<u64> for ExactCount {
    fn from(v: u64) -> Self {
        ExactCount(BigUint::from(v))
    }
}

impl fmt::Display for ExactCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduced rational with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(pub BigRational);

impl ExactProb {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        ExactProb(BigRational::new(num, den))
    }
    pub fn ratio(num: &BigUint, den: &BigUint) -> Self {
        Self::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
    }
    pub fn zero() -> Self {
        ExactProb(BigRational::zero())
    }
    pub fn one() -> Self {
        ExactProb(BigRational::one())
    }
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    pub fn is_probability(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl Serialize for ExactProb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub(crate) fn to_biguint(v: BigInt) -> BigUint {
    match v.sign() {
        Sign::Minus => panic!("negative count {v}"),
        _ => v.into_parts().1,
    }
}

/// `∏_i C(T1 - T0, y_i - x_i)`: the number of unconstrained bridge tuples.
pub fn count_free(spec: &EnsembleSpec) -> ExactCount {
    let t = spec.duration();
    ExactCount(
        spec.x()
            .iter()
            .zip(spec.y())
            .map(|(&x, &y)| elem_sym(y - x, t))
            .product(),
    )
}

/// `det[e_{y_i - x_j - i + j}(1^T)]`, reusing a binomial cache.
pub fn lgv_det_cached(x: &[i64], y: &[i64], t: i64, cache: &mut BinomialCache) -> BigInt {
    let k = x.len();
    debug_assert_eq!(k, y.len());
    let m: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| cache.get(y[i] - x[j] - i as i64 + j as i64, t))
                .collect()
        })
        .collect();
    match k {
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => bareiss_det(m),
    }
}

/// Number of non-crossing `k`-tuples of up-right paths from `x` to `y` in `T` steps,
/// via the dual Jacobi–Trudi determinant. Returns zero for infeasible data.
pub fn count_avoid_lgv(x: &[i64], y: &[i64], t: i64) -> ExactCount {
    if x.len() != y.len() || x.is_empty() || t < 0 {
        return ExactCount(BigUint::zero());
    }
    let d = lgv_det_cached(x, y, t, &mut BinomialCache::new());
    ExactCount(if d.is_negative() { BigUint::zero() } else { to_biguint(d) })
}

/// All up-right paths from `(t0, x)` to `(t1, y)`, in lexicographic order.
pub fn enumerate_bridges(t0: i64, t1: i64, x: i64, y: i64) -> Vec<UpRightPath> {
    let steps = (t1 - t0) as usize;
    let ups = y - x;
    let mut out = Vec::new();
    if ups < 0 || ups as usize > steps {
        return out;
    }
    let mut buf = Vec::with_capacity(steps + 1);
    buf.push(x);
    fn rec(buf: &mut Vec<i64>, left: usize, ups: usize, t0: i64, out: &mut Vec<UpRightPath>) {
        if left == 0 {
            out.push(UpRightPath::from_raw(t0, buf.clone()));
            return;
        }
        let last = *buf.last().unwrap();
        if ups < left {
            buf.push(last);
            rec(buf, left - 1, ups, t0, out);
            buf.pop();
        }
        if ups > 0 {
            buf.push(last + 1);
            rec(buf, left - 1, ups - 1, t0, out);
            buf.pop();
        }
    }
    rec(&mut buf, steps, ups as usize, t0, &mut out);
    out
}

/// Visits every element of `Ω_avoid(spec)` in lexicographic order.
///
/// Fails with [`ExactError::CapExceeded`] when `count_free(spec) > cap`.
pub fn for_each_admissible<F: FnMut(&BernoulliLineEnsemble)>(
    spec: &EnsembleSpec,
    cap: u64,
    mut visit: F,
) -> Result<(), ExactError> {
    let free = count_free(spec);
    if free.0 > BigUint::from(cap) {
        return Err(ExactError::CapExceeded { size: free.0, cap });
    }
    if free.is_zero() {
        return Ok(());
    }
    let bridges: Vec<Vec<UpRightPath>> = (0..spec.k())
        .map(|i| enumerate_bridges(spec.t0(), spec.t1(), spec.x()[i], spec.y()[i]))
        .collect();
    let times: Vec<i64> = spec.avoid_set().iter().copied().collect();
    let mut chosen: Vec<UpRightPath> = Vec::with_capacity(spec.k());

    // Prunes a partial tuple as soon as the newest path breaks an ordering on S.
    fn fits(spec: &EnsembleSpec, times: &[i64], chosen: &[UpRightPath], cand: &UpRightPath) -> bool {
        let j = chosen.len();
        let k = spec.k();
        times.iter().all(|&t| {
            let v = cand.at(t).unwrap();
            let above_ok = if j == 0 {
                spec.top().bounds_from_above(t, v)
            } else {
                chosen[j - 1].at(t).unwrap() >= v
            };
            let below_ok = j + 1 < k || spec.bottom().bounds_from_below(t, v);
            above_ok && below_ok
        })
    }

    fn rec<F: FnMut(&BernoulliLineEnsemble)>(
        spec: &EnsembleSpec,
        times: &[i64],
        bridges: &[Vec<UpRightPath>],
        chosen: &mut Vec<UpRightPath>,
        visit: &mut F,
    ) {
        let j = chosen.len();
        if j == bridges.len() {
            let ens = BernoulliLineEnsemble::from_paths_unchecked(chosen.clone());
            debug_assert!(is_admissible(spec, &ens).unwrap());
            visit(&ens);
            return;
        }
        for cand in &bridges[j] {
            if fits(spec, times, chosen, cand) {
                chosen.push(cand.clone());
                rec(spec, times, bridges, chosen, visit);
                chosen.pop();
            }
        }
    }

    rec(spec, &times, &bridges, &mut chosen, &mut visit);
    Ok(())
}

/// Collects `Ω_avoid(spec)` into a vector (enumeration order).
pub fn enumerate_admissible(
    spec: &EnsembleSpec,
    cap: u64,
) -> Result<Vec<BernoulliLineEnsemble>, ExactError> {
    let mut out = Vec::new();
    for_each_admissible(spec, cap, |e| out.push(e.clone()))?;
    Ok(out)
}

/// Brute-force `|Ω_avoid(spec)|`; handles arbitrary barriers and avoidance sets.
pub fn count_avoid_enum(spec: &EnsembleSpec, cap: u64) -> Result<ExactCount, ExactError> {
    let mut n: u64 = 0;
    for_each_admissible(spec, cap, |_| n += 1)?;
    Ok(ExactCount::from(n))
}

/// `Z = |Ω_avoid| / ∏_i |Ω(T0, T1, x_i, y_i)|`.
///
/// Uses the determinant when the spec has no barriers and full avoidance, else enumeration.
pub fn acceptance_probability(spec: &EnsembleSpec, cap: u64) -> Result<ExactProb, ExactError> {
    let free = count_free(spec);
    if free.is_zero() {
        return Err(ExactError::DegenerateDenominator);
    }
    let avoid = if spec.is_unconstrained() {
        count_avoid_lgv(spec.x(), spec.y(), spec.duration())
    } else {
        count_avoid_enum(spec, cap)?
    };
    Ok(ExactProb::ratio(&avoid.0, &free.0))
}
