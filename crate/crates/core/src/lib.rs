//! Certified lower bounds for canonical heights of rational points on
//! `y^2 = x^3 + a4 x + a6`, via Hurwitz class numbers and the ideal class
//! pairing between a curve and its quadratic twists.

pub mod arith;
pub mod bounds;
pub mod class_forms;
pub mod curve;
pub mod heights;
pub mod integrality;
pub mod pairing;

pub use curve::{Curve, CurveError, RationalPoint};
