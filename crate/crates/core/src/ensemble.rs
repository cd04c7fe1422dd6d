//! Paths, boundary data and the constructive feasibility algorithm.
//!
//! Paths are indexed from the top: `paths[0]` is the highest curve `L_1`.
//! Every type here is an immutable value once constructed.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnsembleError {
    #[error("path is empty")]
    EmptyPath,
    #[error("step at index {index} is {step}, expected 0 or 1")]
    StepViolation { index: usize, step: i64 },
    #[error("invalid time interval [{t0}, {t1}]")]
    BadInterval { t0: i64, t1: i64 },
    #[error("need at least one path")]
    NoPaths,
    #[error("entry and exit vectors have lengths {x} and {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("{which} vector is not weakly decreasing")]
    NotWeaklyDecreasing { which: &'static str },
    #[error("{which} barrier must span [{t0}, {t1}]")]
    BarrierSpan { which: &'static str, t0: i64, t1: i64 },
    #[error("{which} barrier cannot be {kind}")]
    BarrierKind { which: &'static str, kind: &'static str },
    #[error("avoidance time {0} lies outside the interval")]
    AvoidTimeOutOfRange(i64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("boundary data infeasible: {0}")]
    Infeasible(Infeasibility),
    #[error("malformed spec document: {0}")]
    Parse(String),
}

/// An integer trajectory with increments in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpRightPath {
    t0: i64,
    values: Vec<i64>,
}

impl UpRightPath {
    pub fn new(t0: i64, values: Vec<i64>) -> Result<Self, EnsembleError> {
        if values.is_empty() {
            return Err(EnsembleError::EmptyPath);
        }
        if let Some((index, w)) = values
            .windows(2)
            .enumerate()
            .find(|(_, w)| !matches!(w[1] - w[0], 0 | 1))
        {
            return Err(EnsembleError::StepViolation {
                index,
                step: w[1] - w[0],
            });
        }
        Ok(Self { t0, values })
    }

    /// Builds a path without checking the step rule. Callers guarantee it.
    pub(crate) fn from_raw(t0: i64, values: Vec<i64>) -> Self {
        debug_assert!(values.windows(2).all(|w| matches!(w[1] - w[0], 0 | 1)));
        Self { t0, values }
    }

    /// Constant path at `level` over `[t0, t1]`.
    pub fn constant(t0: i64, t1: i64, level: i64) -> Self {
        Self::from_raw(t0, vec![level; (t1 - t0 + 1) as usize])
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    pub fn t1(&self) -> i64 {
        self.t0 + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn at(&self, t: i64) -> Option<i64> {
        let idx = t.checked_sub(self.t0)?;
        usize::try_from(idx).ok().and_then(|i| self.values.get(i).copied())
    }

    pub fn start(&self) -> i64 {
        self.values[0]
    }

    pub fn end(&self) -> i64 {
        *self.values.last().unwrap()
    }

    /// Increments `value[i+1] - value[i]`.
    pub fn steps(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    pub(crate) fn values_mut(&mut self) -> &mut [i64] {
        &mut self.values
    }
}

/// `make_path(t0, values)`; identical to [`UpRightPath::new`].
pub fn make_path(t0: i64, values: Vec<i64>) -> Result<UpRightPath, EnsembleError> {
    UpRightPath::new(t0, values)
}

/// Top (`f`) or bottom (`g`) boundary of an ensemble.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Barrier {
    PlusInfinity,
    MinusInfinity,
    Path(UpRightPath),
}

impl Barrier {
    pub fn is_infinite(&self) -> bool {
        !matches!(self, Barrier::Path(_))
    }

    /// Finite value at `t`, `None` for the infinite barriers.
    pub fn finite_at(&self, t: i64) -> Option<i64> {
        match self {
            Barrier::Path(p) => p.at(t),
            _ => None,
        }
    }

    /// True when `v` lies weakly below this barrier at `t`.
    pub fn bounds_from_above(&self, t: i64, v: i64) -> bool {
        match self {
            Barrier::PlusInfinity => true,
            Barrier::MinusInfinity => false,
            Barrier::Path(p) => p.at(t).is_some_and(|f| v <= f),
        }
    }

    /// True when `v` lies weakly above this barrier at `t`.
    pub fn bounds_from_below(&self, t: i64, v: i64) -> bool {
        match self {
            Barrier::MinusInfinity => true,
            Barrier::PlusInfinity => false,
            Barrier::Path(p) => p.at(t).is_some_and(|g| v >= g),
        }
    }
}

/// Which hypothesis of the non-emptiness criterion failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infeasibility {
    /// `0 <= y_i - x_i <= T1 - T0` fails for path `index` (0-based).
    EndpointSlope { index: usize },
    /// A barrier has a step outside `{0, 1}` (only possible for hand-built barriers).
    BarrierStep { which: &'static str },
    /// Barrier/endpoint ordering or `f >= g` fails.
    Ordering { detail: String },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::EndpointSlope { index } => {
                write!(f, "condition (1): endpoint slope of path {} out of range", index + 1)
            }
            Infeasibility::BarrierStep { which } => {
                write!(f, "condition (2): {which} barrier is not an up-right path")
            }
            Infeasibility::Ordering { detail } => write!(f, "condition (3): {detail}"),
        }
    }
}

fn weakly_decreasing(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

/// Boundary data defining `Ω_avoid(T0, T1, x, y, f, g; S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleSpec {
    t0: i64,
    t1: i64,
    x: Vec<i64>,
    y: Vec<i64>,
    top: Barrier,
    bottom: Barrier,
    avoid: BTreeSet<i64>,
}

impl EnsembleSpec {
    /// No barriers, avoidance required at every time.
    pub fn new(t0: i64, t1: i64, x: Vec<i64>, y: Vec<i64>) -> Result<Self, EnsembleError> {
        Self::with_all(t0, t1, x, y, Barrier::PlusInfinity, Barrier::MinusInfinity, None)
    }

    pub fn with_all(
        t0: i64,
        t1: i64,
        x: Vec<i64>,
        y: Vec<i64>,
        top: Barrier,
        bottom: Barrier,
        avoid: Option<BTreeSet<i64>>,
    ) -> Result<Self, EnsembleError> {
        if t0 >= t1 {
            return Err(EnsembleError::BadInterval { t0, t1 });
        }
        if x.len() != y.len() {
            return Err(EnsembleError::LengthMismatch { x: x.len(), y: y.len() });
        }
        if x.is_empty() {
            return Err(EnsembleError::NoPaths);
        }
        if !weakly_decreasing(&x) {
            return Err(EnsembleError::NotWeaklyDecreasing { which: "entry" });
        }
        if !weakly_decreasing(&y) {
            return Err(EnsembleError::NotWeaklyDecreasing { which: "exit" });
        }
        for (which, b, forbidden, name) in [
            ("top", &top, Barrier::MinusInfinity, "-inf"),
            ("bottom", &bottom, Barrier::PlusInfinity, "+inf"),
        ] {
            if *b == forbidden {
                return Err(EnsembleError::BarrierKind { which, kind: name });
            }
            if let Barrier::Path(p) = b {
                if p.t0() != t0 || p.t1() != t1 {
                    return Err(EnsembleError::BarrierSpan { which, t0, t1 });
                }
            }
        }
        let avoid = match avoid {
            Some(s) => {
                if let Some(&bad) = s.iter().find(|&&r| r < t0 || r > t1) {
                    return Err(EnsembleError::AvoidTimeOutOfRange(bad));
                }
                s
            }
            None => (t0..=t1).collect(),
        };
        Ok(Self { t0, t1, x, y, top, bottom, avoid })
    }

    pub fn with_top(mut self, top: Barrier) -> Result<Self, EnsembleError> {
        self.top = top;
        Self::with_all(self.t0, self.t1, self.x, self.y, self.top, self.bottom, Some(self.avoid))
    }

    pub fn with_bottom(mut self, bottom: Barrier) -> Result<Self, EnsembleError> {
        self.bottom = bottom;
        Self::with_all(self.t0, self.t1, self.x, self.y, self.top, self.bottom, Some(self.avoid))
    }

    pub fn with_avoid_set(self, avoid: BTreeSet<i64>) -> Result<Self, EnsembleError> {
        Self::with_all(self.t0, self.t1, self.x, self.y, self.top, self.bottom, Some(avoid))
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }
    pub fn t1(&self) -> i64 {
        self.t1
    }
    /// `T1 - T0`.
    pub fn duration(&self) -> i64 {
        self.t1 - self.t0
    }
    pub fn k(&self) -> usize {
        self.x.len()
    }
    pub fn x(&self) -> &[i64] {
        &self.x
    }
    pub fn y(&self) -> &[i64] {
        &self.y
    }
    pub fn top(&self) -> &Barrier {
        &self.top
    }
    pub fn bottom(&self) -> &Barrier {
        &self.bottom
    }
    pub fn avoid_set(&self) -> &BTreeSet<i64> {
        &self.avoid
    }
    pub fn avoids_at(&self, t: i64) -> bool {
        self.avoid.contains(&t)
    }
    pub fn full_avoidance(&self) -> bool {
        self.avoid.len() as i64 == self.t1 - self.t0 + 1
    }
    /// No barriers and avoidance everywhere: the determinantal formulas apply.
    pub fn is_unconstrained(&self) -> bool {
        self.top == Barrier::PlusInfinity
            && self.bottom == Barrier::MinusInfinity
            && self.full_avoidance()
    }

    /// Checks the three hypotheses of the non-emptiness criterion, reporting the first failure.
    pub fn check_feasible(&self) -> Result<(), Infeasibility> {
        let span = self.duration();
        if let Some(index) = (0..self.k()).find(|&i| {
            let d = self.y[i] - self.x[i];
            !(0..=span).contains(&d)
        }) {
            return Err(Infeasibility::EndpointSlope { index });
        }
        for (which, b) in [("top", &self.top), ("bottom", &self.bottom)] {
            if let Barrier::Path(p) = b {
                if p.steps().any(|s| !matches!(s, 0 | 1)) {
                    return Err(Infeasibility::BarrierStep { which });
                }
            }
        }
        let k = self.k();
        if let Barrier::Path(f) = &self.top {
            if f.start() < self.x[0] || f.end() < self.y[0] {
                return Err(Infeasibility::Ordering {
                    detail: "top barrier below the entry or exit of path 1".into(),
                });
            }
        }
        if let Barrier::Path(g) = &self.bottom {
            if g.start() > self.x[k - 1] || g.end() > self.y[k - 1] {
                return Err(Infeasibility::Ordering {
                    detail: format!("bottom barrier above the entry or exit of path {k}"),
                });
            }
        }
        if let (Barrier::Path(f), Barrier::Path(g)) = (&self.top, &self.bottom) {
            if let Some(t) = (self.t0..=self.t1).find(|&t| f.at(t) < g.at(t)) {
                return Err(Infeasibility::Ordering {
                    detail: format!("top barrier below bottom barrier at time {t}"),
                });
            }
        }
        Ok(())
    }
}

/// True iff the hypotheses guaranteeing a non-empty `Ω_avoid` hold.
pub fn boundary_feasible(spec: &EnsembleSpec) -> bool {
    spec.check_feasible().is_ok()
}

/// `k` up-right paths on a common interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BernoulliLineEnsemble {
    paths: Vec<UpRightPath>,
}

impl BernoulliLineEnsemble {
    pub fn new(paths: Vec<UpRightPath>) -> Result<Self, EnsembleError> {
        let first = paths.first().ok_or(EnsembleError::NoPaths)?;
        let (t0, len) = (first.t0(), first.len());
        if paths.iter().any(|p| p.t0() != t0 || p.len() != len) {
            return Err(EnsembleError::DimensionMismatch(
                "paths do not share a time interval".into(),
            ));
        }
        Ok(Self { paths })
    }

    /// Builds an ensemble from per-path value vectors starting at `t0`.
    pub fn from_values(t0: i64, rows: Vec<Vec<i64>>) -> Result<Self, EnsembleError> {
        let paths = rows
            .into_iter()
            .map(|v| UpRightPath::new(t0, v))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(paths)
    }

    pub(crate) fn from_paths_unchecked(paths: Vec<UpRightPath>) -> Self {
        Self { paths }
    }

    pub fn k(&self) -> usize {
        self.paths.len()
    }
    pub fn t0(&self) -> i64 {
        self.paths[0].t0()
    }
    pub fn t1(&self) -> i64 {
        self.paths[0].t1()
    }
    pub fn paths(&self) -> &[UpRightPath] {
        &self.paths
    }
    pub fn path(&self, i: usize) -> &UpRightPath {
        &self.paths[i]
    }
    /// Value of path `i` (0-based) at time `t`.
    pub fn value(&self, i: usize, t: i64) -> i64 {
        self.paths[i].values()[(t - self.t0()) as usize]
    }
    /// `(L_1(t), ..., L_k(t))`.
    pub fn column(&self, t: i64) -> Vec<i64> {
        let idx = (t - self.t0()) as usize;
        self.paths.iter().map(|p| p.values()[idx]).collect()
    }

    pub(crate) fn set_value(&mut self, i: usize, t: i64, v: i64) {
        let idx = (t - self.t0()) as usize;
        self.paths[i].values_mut()[idx] = v;
    }

    pub fn into_paths(self) -> Vec<UpRightPath> {
        self.paths
    }
}

/// Pointwise ordering check for a single time.
fn ordered_at(spec: &EnsembleSpec, ens: &BernoulliLineEnsemble, t: i64) -> bool {
    let k = ens.k();
    if !spec.top().bounds_from_above(t, ens.value(0, t)) {
        return false;
    }
    if !spec.bottom().bounds_from_below(t, ens.value(k - 1, t)) {
        return false;
    }
    (1..k).all(|i| ens.value(i - 1, t) >= ens.value(i, t))
}

/// True iff `ens` has the spec's endpoints and respects `f >= L_1 >= ... >= L_k >= g` on `S`.
pub fn is_admissible(
    spec: &EnsembleSpec,
    ens: &BernoulliLineEnsemble,
) -> Result<bool, EnsembleError> {
    if ens.k() != spec.k() || ens.t0() != spec.t0() || ens.t1() != spec.t1() {
        return Err(EnsembleError::DimensionMismatch(format!(
            "ensemble has {} paths on [{}, {}], spec wants {} on [{}, {}]",
            ens.k(),
            ens.t0(),
            ens.t1(),
            spec.k(),
            spec.t0(),
            spec.t1()
        )));
    }
    if ens.column(spec.t0()) != spec.x() || ens.column(spec.t1()) != spec.y() {
        return Ok(false);
    }
    Ok(spec.avoid_set().iter().all(|&t| ordered_at(spec, ens, t)))
}

/// The greedy ensemble: each path steps up as soon as the path above and its exit value allow.
///
/// The result is admissible for the full avoidance set, hence for every `S`.
pub fn maximal_ensemble(spec: &EnsembleSpec) -> Result<BernoulliLineEnsemble, EnsembleError> {
    spec.check_feasible().map_err(EnsembleError::Infeasible)?;
    let len = (spec.duration() + 1) as usize;
    let mut paths: Vec<UpRightPath> = Vec::with_capacity(spec.k());
    for j in 0..spec.k() {
        let mut vals = Vec::with_capacity(len);
        vals.push(spec.x()[j]);
        for i in 0..len - 1 {
            let cur = vals[i];
            let t_next = spec.t0() + i as i64 + 1;
            let above = if j == 0 {
                spec.top().finite_at(t_next)
            } else {
                Some(paths[j - 1].values()[i + 1])
            };
            let cap = above.map_or(spec.y()[j], |a| a.min(spec.y()[j]));
            vals.push(if cur + 1 <= cap { cur + 1 } else { cur });
        }
        paths.push(UpRightPath::from_raw(spec.t0(), vals));
    }
    Ok(BernoulliLineEnsemble::from_paths_unchecked(paths))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2() -> EnsembleSpec {
        EnsembleSpec::new(0, 2, vec![1, 0], vec![2, 1]).unwrap()
    }

    #[test]
    fn make_path_step_rule() {
        assert!(make_path(0, vec![0, 1, 1, 2]).is_ok());
        assert_eq!(
            make_path(0, vec![0, 2]),
            Err(EnsembleError::StepViolation { index: 0, step: 2 })
        );
        assert_eq!(
            make_path(0, vec![0, 1, 0]),
            Err(EnsembleError::StepViolation { index: 1, step: -1 })
        );
        let p = make_path(5, vec![3]).unwrap();
        assert_eq!((p.t0(), p.t1(), p.at(5)), (5, 5, Some(3)));
        assert_eq!(make_path(0, vec![]), Err(EnsembleError::EmptyPath));
    }

    #[test]
    fn admissibility_examples() {
        let spec = spec2();
        let ok = BernoulliLineEnsemble::from_values(0, vec![vec![1, 1, 2], vec![0, 1, 1]]).unwrap();
        assert!(is_admissible(&spec, &ok).unwrap());
        let bad_end =
            BernoulliLineEnsemble::from_values(0, vec![vec![1, 1, 2], vec![0, 1, 2]]).unwrap();
        assert!(!is_admissible(&spec, &bad_end).unwrap());
    }

    #[test]
    fn crossing_outside_avoidance_set_is_allowed() {
        let spec = EnsembleSpec::new(0, 2, vec![0, 0], vec![1, 1])
            .unwrap()
            .with_avoid_set([0, 2].into_iter().collect())
            .unwrap();
        let crossing =
            BernoulliLineEnsemble::from_values(0, vec![vec![0, 0, 1], vec![0, 1, 1]]).unwrap();
        assert!(is_admissible(&spec, &crossing).unwrap());
        let full = EnsembleSpec::new(0, 2, vec![0, 0], vec![1, 1]).unwrap();
        assert!(!is_admissible(&full, &crossing).unwrap());
    }

    #[test]
    fn admissibility_dimension_mismatch() {
        let spec = spec2();
        let one = BernoulliLineEnsemble::from_values(0, vec![vec![1, 1, 2]]).unwrap();
        assert!(matches!(
            is_admissible(&spec, &one),
            Err(EnsembleError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn maximal_ensemble_examples() {
        let s1 = EnsembleSpec::new(0, 2, vec![0], vec![1]).unwrap();
        assert_eq!(maximal_ensemble(&s1).unwrap().path(0).values(), &[0, 1, 1]);

        let flat = EnsembleSpec::new(3, 9, vec![4], vec![4]).unwrap();
        assert!(maximal_ensemble(&flat)
            .unwrap()
            .path(0)
            .values()
            .iter()
            .all(|&v| v == 4));

        let m = maximal_ensemble(&spec2()).unwrap();
        assert_eq!(m.path(0).values(), &[1, 2, 2]);
        assert_eq!(m.path(1).values(), &[0, 1, 1]);
        assert!(is_admissible(&spec2(), &m).unwrap());
    }

    #[test]
    fn maximal_ensemble_respects_top_barrier() {
        let f = Barrier::Path(make_path(0, vec![1, 1, 1, 2]).unwrap());
        let spec = EnsembleSpec::new(0, 3, vec![1, 0], vec![2, 2])
            .unwrap()
            .with_top(f)
            .unwrap();
        let m = maximal_ensemble(&spec).unwrap();
        assert_eq!(m.path(0).values(), &[1, 1, 1, 2]);
        assert_eq!(m.path(1).values(), &[0, 1, 1, 2]);
        assert!(is_admissible(&spec, &m).unwrap());
    }

    #[test]
    fn feasibility_conditions() {
        assert!(boundary_feasible(&spec2()));
        let steep = EnsembleSpec::new(0, 2, vec![0], vec![3]).unwrap();
        assert_eq!(
            steep.check_feasible(),
            Err(Infeasibility::EndpointSlope { index: 0 })
        );
        let g = Barrier::Path(UpRightPath::constant(0, 2, 1));
        let high_floor = spec2().with_bottom(g).unwrap();
        assert!(matches!(
            high_floor.check_feasible(),
            Err(Infeasibility::Ordering { .. })
        ));
        assert!(matches!(
            maximal_ensemble(&high_floor),
            Err(EnsembleError::Infeasible(_))
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            EnsembleSpec::new(2, 2, vec![0], vec![0]),
            Err(EnsembleError::BadInterval { .. })
        ));
        assert!(matches!(
            EnsembleSpec::new(0, 2, vec![0, 1], vec![1, 1]),
            Err(EnsembleError::NotWeaklyDecreasing { which: "entry" })
        ));
        assert!(matches!(
            spec2().with_top(Barrier::MinusInfinity),
            Err(EnsembleError::BarrierKind { .. })
        ));
        assert!(matches!(
            spec2().with_bottom(Barrier::Path(UpRightPath::constant(0, 3, 0))),
            Err(EnsembleError::BarrierSpan { .. })
        ));
        assert!(matches!(
            spec2().with_avoid_set([5].into_iter().collect()),
            Err(EnsembleError::AvoidTimeOutOfRange(5))
        ));
    }
}

/// Serialized form of an [`EnsembleSpec`].
///
/// ```toml
/// T0 = 0
/// T1 = 2
/// k = 2
/// x = [0, 0]
/// y = [1, 1]
/// top = "+inf"
/// bottom = [0, 0, 0]
/// S = [0, 2]      # optional, defaults to the whole interval
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpecDoc {
    #[serde(rename = "T0")]
    pub t0: i64,
    #[serde(rename = "T1")]
    pub t1: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    #[serde(default = "BarrierDoc::plus")]
    pub top: BarrierDoc,
    #[serde(default = "BarrierDoc::minus")]
    pub bottom: BarrierDoc,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum BarrierDoc {
    Infinite(String),
    Values(Vec<i64>),
}

impl BarrierDoc {
    fn plus() -> Self {
        BarrierDoc::Infinite("+inf".into())
    }
    fn minus() -> Self {
        BarrierDoc::Infinite("-inf".into())
    }

    fn to_barrier(&self, t0: i64) -> Result<Barrier, EnsembleError> {
        match self {
            BarrierDoc::Infinite(s) => match s.trim() {
                "+inf" | "inf" | "+infinity" => Ok(Barrier::PlusInfinity),
                "-inf" | "-infinity" => Ok(Barrier::MinusInfinity),
                other => Err(EnsembleError::Parse(format!("unknown barrier {other:?}"))),
            },
            BarrierDoc::Values(v) => Ok(Barrier::Path(UpRightPath::new(t0, v.clone())?)),
        }
    }

    fn from_barrier(b: &Barrier) -> Self {
        match b {
            Barrier::PlusInfinity => Self::plus(),
            Barrier::MinusInfinity => Self::minus(),
            Barrier::Path(p) => BarrierDoc::Values(p.values().to_vec()),
        }
    }
}

impl EnsembleSpecDoc {
    pub fn into_spec(self) -> Result<EnsembleSpec, EnsembleError> {
        if let Some(k) = self.k {
            if k != self.x.len() || k != self.y.len() {
                return Err(EnsembleError::DimensionMismatch(format!(
                    "k = {k} but x has {} entries and y has {}",
                    self.x.len(),
                    self.y.len()
                )));
            }
        }
        let top = self.top.to_barrier(self.t0)?;
        let bottom = self.bottom.to_barrier(self.t0)?;
        let s = self.s.map(|v| v.into_iter().collect());
        EnsembleSpec::with_all(self.t0, self.t1, self.x, self.y, top, bottom, s)
    }

    pub fn from_spec(spec: &EnsembleSpec) -> Self {
        Self {
            t0: spec.t0(),
            t1: spec.t1(),
            k: Some(spec.k()),
            x: spec.x().to_vec(),
            y: spec.y().to_vec(),
            top: BarrierDoc::from_barrier(spec.top()),
            bottom: BarrierDoc::from_barrier(spec.bottom()),
            s: (!spec.full_avoidance()).then(|| spec.avoid_set().iter().copied().collect()),
        }
    }
}

impl EnsembleSpec {
    /// Parses the TOML spec document.
    pub fn from_toml_str(text: &str) -> Result<Self, EnsembleError> {
        let doc: EnsembleSpecDoc =
            toml::from_str(text).map_err(|e| EnsembleError::Parse(e.to_string()))?;
        doc.into_spec()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&EnsembleSpecDoc::from_spec(self)).expect("spec document serializes")
    }
}
