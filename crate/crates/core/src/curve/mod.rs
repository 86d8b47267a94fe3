//! Short Weierstrass curves `y^2 = x^3 + a4 x + a6` over Q with exact point
//! arithmetic, plus the real geometry of the defining cubic.

pub mod poly;
pub mod roots;

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

pub use poly::{Poly, SturmChain};
pub use roots::{isolate_poly, isolate_real_roots, IsolatingInterval, RealRoot};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("singular curve (discriminant is zero)")]
    Singular,
    #[error("point {0} is not on the curve")]
    OffCurve(String),
    #[error("operation is undefined at the identity")]
    Identity,
    #[error("polynomial has a repeated root")]
    NotSquarefree,
    #[error("coordinates {0} do not have the shape A/C^2, B/C^3")]
    NotWeighted(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Curve {
    a4: Integer,
    a6: Integer,
}

impl Curve {
    pub fn new(a4: impl Into<Integer>, a6: impl Into<Integer>) -> Result<Self, CurveError> {
        let curve = Curve { a4: a4.into(), a6: a6.into() };
        if curve.discriminant() == 0 {
            return Err(CurveError::Singular);
        }
        Ok(curve)
    }

    pub fn a4(&self) -> &Integer {
        &self.a4
    }

    pub fn a6(&self) -> &Integer {
        &self.a6
    }

    /// `4 a4^3 + 27 a6^2`, so that the discriminant is `-16` times this.
    fn cubic_invariant(&self) -> Integer {
        let a4_cubed = Integer::from((&self.a4).pow(3u32));
        let a6_sq = Integer::from(self.a6.square_ref());
        a4_cubed * 4u32 + a6_sq * 27u32
    }

    pub fn discriminant(&self) -> Integer {
        self.cubic_invariant() * -16i32
    }

    /// j = (-48 a4)^3 / discriminant.
    pub fn j_invariant(&self) -> Rational {
        let num = Integer::from((&self.a4).pow(3u32)) * -110592i32;
        Rational::from((num, self.discriminant()))
    }

    /// Coefficients of `x^3 + a4 x + a6`, ascending.
    pub fn cubic_coeffs(&self) -> Vec<Integer> {
        vec![self.a6.clone(), self.a4.clone(), Integer::new(), Integer::from(1)]
    }

    pub fn cubic(&self) -> Poly {
        Poly::from_integers(&self.cubic_coeffs())
    }

    pub fn rhs(&self, x: &Rational) -> Rational {
        let x2 = Rational::from(x.square_ref());
        let inner = x2 + &self.a4;
        Rational::from(x * &inner) + &self.a6
    }

    /// Number of connected components of the real locus.
    pub fn real_components(&self) -> u32 {
        if self.cubic_invariant().cmp0() == Ordering::Less {
            2
        } else {
            1
        }
    }

    /// Real roots of the cubic, ascending.
    pub fn real_roots(&self) -> Vec<RealRoot> {
        let cubic = self.cubic();
        isolate_poly(&cubic)
            .expect("nonsingular cubic is squarefree")
            .into_iter()
            .map(|iv| RealRoot::new(cubic.clone(), iv))
            .collect()
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        match p {
            RationalPoint::Identity => true,
            RationalPoint::Affine { x, y } => Rational::from(y.square_ref()) == self.rhs(x),
        }
    }

    /// Build a point, checking that it lies on the curve.
    pub fn point(&self, x: impl Into<Rational>, y: impl Into<Rational>) -> Result<RationalPoint, CurveError> {
        let p = RationalPoint::Affine { x: x.into(), y: y.into() };
        self.check(&p)?;
        Ok(p)
    }

    fn check(&self, p: &RationalPoint) -> Result<(), CurveError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(CurveError::OffCurve(p.to_string()))
        }
    }

    pub fn add(&self, p: &RationalPoint, q: &RationalPoint) -> Result<RationalPoint, CurveError> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (RationalPoint::Identity, _) => return q.clone(),
            (_, RationalPoint::Identity) => return p.clone(),
            (RationalPoint::Affine { x: x1, y: y1 }, RationalPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if Rational::from(y1 + y2) == 0 {
                return RationalPoint::Identity;
            }
            let num = Rational::from(x1.square_ref()) * 3u32 + &self.a4;
            num / Rational::from(y1 * 2u32)
        } else {
            Rational::from(y2 - y1) / Rational::from(x2 - x1)
        };
        let x3 = Rational::from(lambda.square_ref()) - x1 - x2;
        let y3 = lambda * Rational::from(x1 - &x3) - y1;
        RationalPoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, p: &RationalPoint) -> Result<RationalPoint, CurveError> {
        self.add(p, p)
    }

    pub fn negate(&self, p: &RationalPoint) -> Result<RationalPoint, CurveError> {
        self.check(p)?;
        Ok(p.negate())
    }

    pub fn mul(&self, n: i64, p: &RationalPoint) -> Result<RationalPoint, CurveError> {
        self.check(p)?;
        Ok(self.mul_unchecked(n, p))
    }

    pub(crate) fn mul_unchecked(&self, n: i64, p: &RationalPoint) -> RationalPoint {
        let mut acc = RationalPoint::Identity;
        let mut base = if n < 0 { p.negate() } else { p.clone() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add_unchecked(&base, &base);
            }
        }
        acc
    }

    /// Order of `p` if it is a torsion point of order at most `max_order`.
    /// Non-identity torsion points on an integral model have integer
    /// coordinates, so a non-integral multiple ends the search early.
    pub fn torsion_order_of(&self, p: &RationalPoint, max_order: u32) -> Option<u32> {
        let mut q = p.clone();
        for k in 1..=max_order {
            match &q {
                RationalPoint::Identity => return Some(k),
                RationalPoint::Affine { x, y } => {
                    if *x.denom() != 1 || *y.denom() != 1 {
                        return None;
                    }
                }
            }
            q = self.add_unchecked(&q, p);
        }
        None
    }

    pub fn is_torsion(&self, p: &RationalPoint) -> bool {
        self.torsion_order_of(p, 12).is_some()
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = {}", self.cubic())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RationalPoint {
    Identity,
    Affine { x: Rational, y: Rational },
}

/// `x = A/C^2`, `y = B/C^3` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedCoords {
    pub a: Integer,
    pub b: Integer,
    pub c: Integer,
}

impl RationalPoint {
    pub fn affine(x: impl Into<Rational>, y: impl Into<Rational>) -> Self {
        RationalPoint::Affine { x: x.into(), y: y.into() }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, RationalPoint::Identity)
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            RationalPoint::Identity => None,
            RationalPoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&Rational> {
        match self {
            RationalPoint::Identity => None,
            RationalPoint::Affine { y, .. } => Some(y),
        }
    }

    pub fn negate(&self) -> Self {
        match self {
            RationalPoint::Identity => RationalPoint::Identity,
            RationalPoint::Affine { x, y } => RationalPoint::Affine { x: x.clone(), y: Rational::from(-y) },
        }
    }

    pub fn weighted(&self) -> Result<WeightedCoords, CurveError> {
        let (x, y) = match self {
            RationalPoint::Identity => return Err(CurveError::Identity),
            RationalPoint::Affine { x, y } => (x, y),
        };
        let (c, rem) = x.denom().clone().sqrt_rem(Integer::new());
        if rem != 0 || Integer::from((&c).pow(3u32)) != *y.denom() {
            return Err(CurveError::NotWeighted(self.to_string()));
        }
        Ok(WeightedCoords { a: x.numer().clone(), b: y.numer().clone(), c })
    }

    pub fn from_weighted(w: &WeightedCoords) -> Self {
        let c2 = Integer::from(w.c.square_ref());
        let c3 = Integer::from(&c2 * &w.c);
        RationalPoint::Affine { x: Rational::from((w.a.clone(), c2)), y: Rational::from((w.b.clone(), c3)) }
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalPoint::Identity => write!(f, "O"),
            RationalPoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Curve {
        Curve::new(-3, -4).unwrap()
    }

    #[test]
    fn discriminants() {
        assert_eq!(example().discriminant(), -5184);
        assert_eq!(Curve::new(0, 1).unwrap().discriminant(), -432);
        assert_eq!(Curve::new(-1, 0).unwrap().discriminant(), 64);
        assert_eq!(Curve::new(0, 0), Err(CurveError::Singular));
        assert_eq!(Curve::new(-3, 2), Err(CurveError::Singular));
    }

    #[test]
    fn j_invariants() {
        assert_eq!(example().j_invariant(), -576);
        assert_eq!(Curve::new(0, 1).unwrap().j_invariant(), 0);
        assert_eq!(Curve::new(-1, 0).unwrap().j_invariant(), 1728);
    }

    #[test]
    fn group_law_examples() {
        let e = example();
        let p = e.point(8, 22).unwrap();
        assert_eq!(e.add(&p, &RationalPoint::Identity).unwrap(), p);
        assert_eq!(e.add(&p, &p.negate()).unwrap(), RationalPoint::Identity);
        let two = e.add(&p, &p).unwrap();
        assert_eq!(two.x().unwrap(), &Rational::from((4745, 1936)));
        assert_eq!(e.mul(2, &p).unwrap(), two);
        assert_eq!(e.mul(1, &p).unwrap(), p);
        assert_eq!(e.mul(0, &p).unwrap(), RationalPoint::Identity);
        assert_eq!(e.mul(-3, &p).unwrap(), e.mul(3, &p).unwrap().negate());
        assert!(matches!(e.add(&RationalPoint::affine(8, 23), &p), Err(CurveError::OffCurve(_))));
    }

    #[test]
    fn real_component_counts() {
        assert_eq!(example().real_components(), 1);
        assert_eq!(Curve::new(-1, 0).unwrap().real_components(), 2);
        assert_eq!(Curve::new(0, 1).unwrap().real_components(), 1);
        for (a4, a6) in [(-3, -4), (-1, 0), (0, 1), (-7, 6), (-43, 166)] {
            let e = Curve::new(a4, a6).unwrap();
            let n = e.real_roots().len() as u32;
            assert_eq!(e.real_components(), if n == 3 { 2 } else { 1 });
        }
    }

    #[test]
    fn weighted_round_trip() {
        let e = example();
        let p = e.mul_unchecked(3, &e.point(8, 22).unwrap());
        let w = p.weighted().unwrap();
        assert!(w.c > 1);
        assert_eq!(RationalPoint::from_weighted(&w), p);
        assert!(RationalPoint::affine(Rational::from((1, 2)), 0).weighted().is_err());
    }

    #[test]
    fn torsion_orders() {
        let e = Curve::new(0, 1).unwrap();
        assert_eq!(e.torsion_order_of(&e.point(2, 3).unwrap(), 12), Some(6));
        assert_eq!(e.torsion_order_of(&e.point(0, 1).unwrap(), 12), Some(3));
        assert_eq!(e.torsion_order_of(&e.point(-1, 0).unwrap(), 12), Some(2));
        let ex = example();
        assert_eq!(ex.torsion_order_of(&ex.point(8, 22).unwrap(), 12), None);
    }
}
