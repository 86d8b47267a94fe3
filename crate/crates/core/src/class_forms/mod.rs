//! Positive definite binary quadratic forms and Hurwitz class numbers.

pub mod forms;
pub mod hurwitz;

use thiserror::Error;

pub use forms::{enumerate_reduced, equivalent, reduce_form, Discriminant, QuadraticForm};
pub use hurwitz::{
    hurwitz_by_enumeration, hurwitz_h, hurwitz_upper_bound, hurwitz_via_hecke, kronecker_chi, weighted_count_sixths,
    MAX_COUNT_D,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("form {0} is not positive definite")]
    NotPositiveDefinite(String),
    #[error("discriminants differ: {0} vs {1}")]
    DiscriminantMismatch(String, String),
    #[error("-{0} is not a negative discriminant (need D > 0 and D = 0 or 3 mod 4)")]
    InvalidDiscriminant(String),
    #[error("-{0} is not a fundamental discriminant")]
    NotFundamental(u64),
}
