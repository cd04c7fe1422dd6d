//! The exact law of the column `L(m)` of an avoiding ensemble without barriers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::binomial::BinomialCache;
use super::count::{lgv_det_cached, ExactProb};
use super::ExactError;

/// Probability of each weakly decreasing column value; only non-zero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PmfTable {
    entries: BTreeMap<Vec<i64>, ExactProb>,
}

impl PmfTable {
    pub fn get(&self, lambda: &[i64]) -> ExactProb {
        self.entries
            .get(lambda)
            .cloned()
            .unwrap_or_else(ExactProb::zero)
    }
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &ExactProb)> {
        self.entries.iter()
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn total(&self) -> ExactProb {
        ExactProb(
            self.entries
                .values()
                .fold(BigRational::zero(), |acc, p| acc + &p.0),
        )
    }
}

/// Calls `f` on every weakly decreasing integer vector with `lo[i] <= v[i] <= hi[i]`.
pub(crate) fn for_each_decreasing_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let k = lo.len();
    let mut cur = vec![0i64; k];
    fn rec(i: usize, lo: &[i64], hi: &[i64], cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if i == lo.len() {
            f(cur);
            return;
        }
        let upper = if i == 0 { hi[0] } else { hi[i].min(cur[i - 1]) };
        let mut v = lo[i];
        while v <= upper {
            cur[i] = v;
            rec(i + 1, lo, hi, cur, f);
            v += 1;
        }
    }
    if k > 0 {
        rec(0, lo, hi, &mut cur, &mut f);
    }
}

/// `P(L(m) = λ)` for the uniform avoiding ensemble from `x` (time 0) to `y` (time `T`).
///
/// `λ_i` is restricted to `[max(x_i, y_i - n), min(x_i + m, y_i)]` with `n = T - m`; the
/// determinant vanishes everywhere else.
pub fn fixed_time_pmf(x: &[i64], y: &[i64], t: i64, m: i64) -> Result<PmfTable, ExactError> {
    if x.len() != y.len() || x.is_empty() {
        return Err(ExactError::Dimension(format!(
            "entry has {} coordinates, exit has {}",
            x.len(),
            y.len()
        )));
    }
    if !(0 < m && m < t) {
        return Err(ExactError::Domain(format!("split time {m} not inside (0, {t})")));
    }
    let n = t - m;
    let mut cache = BinomialCache::new();
    let total = lgv_det_cached(x, y, t, &mut cache);
    if !total.is_positive() {
        return Err(ExactError::DegenerateDenominator);
    }
    let k = x.len();
    let lo: Vec<i64> = (0..k).map(|i| x[i].max(y[i] - n)).collect();
    let hi: Vec<i64> = (0..k).map(|i| (x[i] + m).min(y[i])).collect();
    let mut entries = BTreeMap::new();
    for_each_decreasing_in_box(&lo, &hi, |lambda| {
        let left = lgv_det_cached(x, lambda, m, &mut cache);
        if left.is_zero() {
            return;
        }
        let right = lgv_det_cached(lambda, y, n, &mut cache);
        if right.is_zero() {
            return;
        }
        let num: BigInt = left * right;
        entries.insert(lambda.to_vec(), ExactProb::new(num, total.clone()));
    });
    Ok(PmfTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn single_bridge_midpoint() {
        let pmf = fixed_time_pmf(&[0], &[1], 2, 1).unwrap();
        assert_eq!(pmf.len(), 2);
        assert_eq!(pmf.get(&[0]).to_string(), "1/2");
        assert_eq!(pmf.get(&[1]).to_string(), "1/2");
    }

    #[test]
    fn two_paths_midpoint() {
        let pmf = fixed_time_pmf(&[0, 0], &[1, 1], 2, 1).unwrap();
        assert_eq!(pmf.len(), 3);
        for lam in [[1, 0], [0, 0], [1, 1]] {
            assert_eq!(pmf.get(&lam).to_string(), "1/3");
        }
        assert_eq!(pmf.total().0, BigRational::one());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            fixed_time_pmf(&[0], &[5], 2, 1),
            Err(ExactError::DegenerateDenominator)
        ));
        assert!(matches!(fixed_time_pmf(&[0], &[1], 2, 2), Err(ExactError::Domain(_))));
        assert!(matches!(
            fixed_time_pmf(&[0, 0], &[1], 2, 1),
            Err(ExactError::Dimension(_))
        ));
    }

    #[test]
    fn decreasing_box_enumeration() {
        let mut seen = Vec::new();
        for_each_decreasing_in_box(&[0, 0], &[2, 2], |v| seen.push(v.to_vec()));
        assert_eq!(seen.len(), 6);
        assert!(seen.iter().all(|v| v[0] >= v[1]));
    }
}
