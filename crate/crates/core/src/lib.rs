//! Avoiding Bernoulli line ensembles: `k` non-crossing up-right lattice paths with
//! prescribed endpoints, optional barriers, and an avoidance set.
//!
//! * [`ensemble`]: paths, boundary data, admissibility and the greedy maximal ensemble.
//! * [`exact`]: exact counts and laws through Jacobi–Trudi determinants, with a
//!   brute-force enumerator as oracle.
//! * [`sampling`]: uniform bridges, rejection, exact sequential sampling and Glauber
//!   dynamics with its monotone coupling.
//! * [`limit`]: the limiting density of the diffusively rescaled column and the
//!   Brownian-bridge formulas that go with it.
//! * [`experiments`]: reproducible convergence, coupling, Gibbs-invariance and
//!   min-gap experiments.

pub mod ensemble;
pub mod exact;
pub mod experiments;
pub mod limit;
pub mod linalg;
pub mod sampling;
pub mod stats;

pub use ensemble::{
    boundary_feasible, is_admissible, make_path, maximal_ensemble, Barrier,
    BernoulliLineEnsemble, EnsembleError, EnsembleSpec, UpRightPath,
};
pub use exact::{ExactCount, ExactError, ExactProb, PmfTable};

pub use limit::{DensityEval, LimitSpec};
pub use sampling::{GlauberMove, RngHandle};
