//! Single-site heat-bath dynamics on `Ω_avoid` and its monotone coupling.
//!
//! A move is a triple `(i, t, z)` and a fair coin. Path `i` may only change at an interior
//! time `t` where it looks like `z, ·, z+1` on `t-1, t, t+1`; heads puts it at `z+1`, tails
//! at `z`. At times in `S` the update is dropped if it would leave the ordering
//! `f ≥ L_1 ≥ ... ≥ L_k ≥ g`. Both neighbours are checked: the lower one (or `g`) for a
//! tails move and the upper one (or `f`) for a heads move.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SamplingError;
use crate::ensemble::{
    is_admissible, maximal_ensemble, Barrier, BernoulliLineEnsemble, EnsembleSpec,
};

/// One proposed update. `i` is 0-based from the top path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlauberMove {
    pub i: usize,
    pub t: i64,
    pub z: i64,
    pub heads: bool,
}

/// The range of `z` levels moves are drawn from, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelWindow {
    pub lo: i64,
    pub hi: i64,
}

impl LevelWindow {
    /// `⟦min(x_k, finite g values), y_1 - 1⟧`.
    pub fn for_spec(spec: &EnsembleSpec) -> Self {
        let mut lo = spec.x()[spec.k() - 1];
        if let Barrier::Path(g) = spec.bottom() {
            lo = lo.min(g.values().iter().copied().min().unwrap_or(lo));
        }
        Self {
            lo,
            hi: spec.y()[0] - 1,
        }
    }

    pub fn union(self, other: Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Number of levels, at least one so that move sampling is always defined.
    pub fn width(&self) -> i64 {
        (self.hi - self.lo + 1).max(1)
    }
}

/// `10 · k · (T1 - T0) · window width`.
pub fn default_burn_in(spec: &EnsembleSpec) -> u64 {
    10 * spec.k() as u64 * spec.duration() as u64 * LevelWindow::for_spec(spec).width() as u64
}

fn random_move<R: Rng + ?Sized>(rng: &mut R, k: usize, t0: i64, t1: i64, w: LevelWindow) -> GlauberMove {
    GlauberMove {
        i: rng.random_range(0..k),
        t: rng.random_range(t0..=t1),
        z: w.lo + rng.random_range(0..w.width()),
        heads: rng.random::<bool>(),
    }
}

/// Applies `mv` in place, assuming `state` is admissible. Returns whether a value changed.
fn apply_move(state: &mut BernoulliLineEnsemble, spec: &EnsembleSpec, mv: GlauberMove) -> bool {
    let GlauberMove { i, t, z, heads } = mv;
    if t <= spec.t0() || t >= spec.t1() {
        return false;
    }
    if state.value(i, t - 1) != z || state.value(i, t + 1) != z + 1 {
        return false;
    }
    let new = if heads { z + 1 } else { z };
    if state.value(i, t) == new {
        return false;
    }
    if spec.avoids_at(t) {
        let ok = if heads {
            if i == 0 {
                spec.top().bounds_from_above(t, new)
            } else {
                state.value(i - 1, t) >= new
            }
        } else if i + 1 == spec.k() {
            spec.bottom().bounds_from_below(t, new)
        } else {
            new >= state.value(i + 1, t)
        };
        if !ok {
            return false;
        }
    }
    state.set_value(i, t, new);
    true
}

fn check_state(spec: &EnsembleSpec, state: &BernoulliLineEnsemble) -> Result<(), SamplingError> {
    if is_admissible(spec, state)? {
        Ok(())
    } else {
        Err(SamplingError::InadmissibleState)
    }
}

/// Deterministic application of one move to an admissible state.
pub fn glauber_step(
    state: &BernoulliLineEnsemble,
    spec: &EnsembleSpec,
    mv: GlauberMove,
) -> Result<BernoulliLineEnsemble, SamplingError> {
    check_state(spec, state)?;
    if mv.i >= spec.k() {
        return Err(SamplingError::IncompatibleSpecs(format!(
            "move addresses path {} of {}",
            mv.i,
            spec.k()
        )));
    }
    let mut next = state.clone();
    apply_move(&mut next, spec, mv);
    Ok(next)
}

/// A single chain owning its state.
#[derive(Debug, Clone)]
pub struct GlauberChain {
    spec: EnsembleSpec,
    state: BernoulliLineEnsemble,
    window: LevelWindow,
}

impl GlauberChain {
    /// Starts at `init`, or at the maximal ensemble when `init` is `None`.
    pub fn new(spec: EnsembleSpec, init: Option<BernoulliLineEnsemble>) -> Result<Self, SamplingError> {
        let state = match init {
            Some(s) => {
                check_state(&spec, &s)?;
                s
            }
            None => maximal_ensemble(&spec)?,
        };
        let window = LevelWindow::for_spec(&spec);
        Ok(Self { spec, state, window })
    }

    pub fn state(&self) -> &BernoulliLineEnsemble {
        &self.state
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn window(&self) -> LevelWindow {
        self.window
    }

    /// Draws and applies one move; returns it.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> GlauberMove {
        let mv = random_move(rng, self.spec.k(), self.spec.t0(), self.spec.t1(), self.window);
        apply_move(&mut self.state, &self.spec, mv);
        mv
    }

    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R, n_steps: u64) {
        for _ in 0..n_steps {
            self.step(rng);
        }
    }

    pub fn into_state(self) -> BernoulliLineEnsemble {
        self.state
    }
}

/// `n_steps` random moves from `init` (default: the maximal ensemble).
pub fn glauber_run<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &EnsembleSpec,
    n_steps: u64,
    init: Option<BernoulliLineEnsemble>,
) -> Result<BernoulliLineEnsemble, SamplingError> {
    let mut chain = GlauberChain::new(spec.clone(), init)?;
    chain.run(rng, n_steps);
    Ok(chain.into_state())
}

fn barrier_leq_on(low: &Barrier, high: &Barrier, spec: &EnsembleSpec) -> bool {
    spec.avoid_set().iter().all(|&t| match (low, high) {
        (Barrier::MinusInfinity, _) | (_, Barrier::PlusInfinity) => true,
        (Barrier::PlusInfinity, _) | (_, Barrier::MinusInfinity) => false,
        (Barrier::Path(a), Barrier::Path(b)) => a.at(t) <= b.at(t),
    })
}

/// Two chains driven by the same moves, the lower one started below the higher one.
#[derive(Debug, Clone)]
pub struct CoupledChain {
    low: GlauberChain,
    high: GlauberChain,
    window: LevelWindow,
}

impl CoupledChain {
    /// Requires shared `(T0, T1, k, S)`, `x ≤ x'`, `y ≤ y'`, and both barriers ordered on `S`.
    pub fn new(low: EnsembleSpec, high: EnsembleSpec) -> Result<Self, SamplingError> {
        if low.t0() != high.t0() || low.t1() != high.t1() || low.k() != high.k() {
            return Err(SamplingError::IncompatibleSpecs(
                "interval or number of paths differ".into(),
            ));
        }
        if low.avoid_set() != high.avoid_set() {
            return Err(SamplingError::IncompatibleSpecs("avoidance sets differ".into()));
        }
        let ordered = |a: &[i64], b: &[i64]| a.iter().zip(b).all(|(p, q)| p <= q);
        if !ordered(low.x(), high.x()) || !ordered(low.y(), high.y()) {
            return Err(SamplingError::IncompatibleSpecs(
                "endpoints of the lower spec must lie below the higher spec".into(),
            ));
        }
        if !barrier_leq_on(low.bottom(), high.bottom(), &low) {
            return Err(SamplingError::IncompatibleSpecs("bottom barriers not ordered on S".into()));
        }
        if !barrier_leq_on(low.top(), high.top(), &low) {
            return Err(SamplingError::IncompatibleSpecs("top barriers not ordered on S".into()));
        }
        let window = LevelWindow::for_spec(&low).union(LevelWindow::for_spec(&high));
        Ok(Self {
            low: GlauberChain::new(low, None)?,
            high: GlauberChain::new(high, None)?,
            window,
        })
    }

    pub fn low(&self) -> &BernoulliLineEnsemble {
        self.low.state()
    }

    pub fn high(&self) -> &BernoulliLineEnsemble {
        self.high.state()
    }

    pub fn window(&self) -> LevelWindow {
        self.window
    }

    /// True when `low ≤ high` at every site.
    pub fn is_ordered(&self) -> bool {
        let (a, b) = (self.low(), self.high());
        a.paths()
            .iter()
            .zip(b.paths())
            .all(|(p, q)| p.values().iter().zip(q.values()).all(|(u, v)| u <= v))
    }

    /// Applies one shared move. Only site `(i, t)` can change, so the returned flag says
    /// whether the ordering still holds everywhere given that it held before.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (GlauberMove, bool) {
        let spec = self.low.spec();
        let mv = random_move(rng, spec.k(), spec.t0(), spec.t1(), self.window);
        apply_move(&mut self.low.state, &self.low.spec, mv);
        apply_move(&mut self.high.state, &self.high.spec, mv);
        let ok = self.low.state.value(mv.i, mv.t) <= self.high.state.value(mv.i, mv.t);
        (mv, ok)
    }

    pub fn into_states(self) -> (BernoulliLineEnsemble, BernoulliLineEnsemble) {
        (self.low.into_state(), self.high.into_state())
    }
}

/// Runs the coupled chain from both maximal ensembles for `n_steps` shared moves.
pub fn coupled_glauber_run<R: Rng + ?Sized>(
    rng: &mut R,
    spec_low: &EnsembleSpec,
    spec_high: &EnsembleSpec,
    n_steps: u64,
) -> Result<(BernoulliLineEnsemble, BernoulliLineEnsemble), SamplingError> {
    let mut chain = CoupledChain::new(spec_low.clone(), spec_high.clone())?;
    for _ in 0..n_steps {
        chain.step(rng);
    }
    Ok(chain.into_states())
}
