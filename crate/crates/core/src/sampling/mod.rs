//! Samplers for the uniform measure on `Ω_avoid`.

pub mod bridge;
pub mod glauber;
pub mod rng;
pub mod sequential;

use thiserror::Error;

use crate::ensemble::EnsembleError;
use crate::exact::ExactError;

pub use bridge::{rejection_sample, sample_bridge, sample_free_tuple};
pub use glauber::{
    coupled_glauber_run, default_burn_in, glauber_run, glauber_step, CoupledChain, GlauberChain,
    GlauberMove, LevelWindow,
};
pub use rng::RngHandle;
pub use sequential::{sequential_exact_sample, SequentialSampler};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("no up-right path joins ({t0}, {x}) to ({t1}, {y})")]
    InfeasibleEndpoints { t0: i64, t1: i64, x: i64, y: i64 },
    #[error("no admissible tuple after {tries} tries")]
    MaxTriesExceeded { tries: u64 },
    #[error("state is not admissible for the spec")]
    InadmissibleState,
    #[error("incompatible specs: {0}")]
    IncompatibleSpecs(String),
    #[error("boundary data admits no ensemble")]
    EmptyStateSpace,
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
