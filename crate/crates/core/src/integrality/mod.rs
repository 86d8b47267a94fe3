//! Factorization, rational torsion and Tamagawa numbers.

pub mod factor;
pub mod tate;
pub mod torsion;

use thiserror::Error;

pub use factor::{factorize, factorize_with, is_prime, FactorConfig, Factorization};
pub use tate::{local_reduction, tamagawa_numbers, Kodaira, LocalReduction, TamagawaData, Weierstrass};
pub use torsion::{torsion_order, torsion_points};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegralityError {
    #[error("cannot factor zero")]
    ZeroInput,
    #[error("factorization effort exceeded on cofactor {0}")]
    EffortExceeded(String),
    #[error("probable prime {0} is too large to certify")]
    Uncertified(String),
    #[error("invalid Tamagawa override: {0}")]
    BadOverride(String),
}
