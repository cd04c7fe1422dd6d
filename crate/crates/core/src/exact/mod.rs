//! Exact arbitrary-precision counting and probabilities. No floating point is used
//! except in the asymptotic comparisons of [`asymptotic`].

pub mod asymptotic;
pub mod binomial;
pub mod count;
pub mod det;
pub mod pmf;

use num_bigint::BigUint;
use thiserror::Error;

pub use asymptotic::{
    asymptotic_relative_error, calibrate_upper_bound, elem_sym_asymptotic, elem_sym_upper_bound,
    ln_elem_sym_asymptotic, upper_bound_holds_for_all,
};
pub use binomial::{elem_sym, BinomialCache};
pub use count::{
    acceptance_probability, count_avoid_enum, count_avoid_lgv, count_free, enumerate_admissible,
    enumerate_bridges, for_each_admissible, ExactCount, ExactProb, DEFAULT_ENUM_CAP,
};
pub use pmf::{fixed_time_pmf, PmfTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("enumeration would visit {size} tuples, cap is {cap}")]
    CapExceeded { size: BigUint, cap: u64 },
    #[error("total count is zero")]
    DegenerateDenominator,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
