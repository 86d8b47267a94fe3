//! Naive, Weil and canonical heights, and upper bounds for the gap between
//! half the Weil height and the canonical height.

use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;

use rug::{Integer, Rational};
use thiserror::Error;

use crate::curve::{Curve, Poly, RationalPoint, RealRoot};
use crate::integrality::TamagawaData;

/// Doublings always performed before the stopping rule is consulted.
pub const MIN_DOUBLINGS: u32 = 4;
/// Doublings after which the requested tolerance is declared out of reach.
pub const MAX_DOUBLINGS: u32 = 12;
/// Additive constant in Silverman's difference bound.
pub const SILVERMAN_CONSTANT: f64 = 0.973;
/// Constant on the other side of the same bound (short Weierstrass models).
pub const SILVERMAN_UPPER_CONSTANT: f64 = 1.07;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeightError {
    #[error("height of the identity is undefined")]
    Identity,
    #[error("point {0} is not on the curve")]
    OffCurve(String),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("x = {0} is a root of the cubic, so the doubled point is the identity")]
    TwoTorsion(String),
    #[error("error radius still {radius:e} after {doublings} doublings")]
    NoConvergence { doublings: u32, radius: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series term z_{0} is not positive")]
    NonPositiveTerm(u32),
    #[error("no Tamagawa data for the part {0} of the discriminant")]
    MissingTamagawa(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeightEstimate {
    pub value: f64,
    pub error_radius: f64,
    pub iterations_used: u32,
}

impl HeightEstimate {
    pub fn exact_zero() -> Self {
        HeightEstimate { value: 0.0, error_radius: 0.0, iterations_used: 0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error_radius
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeltaProvenance {
    ZeroByProposition,
    SilvermanBound,
    /// Given by the caller; only as sound as its source.
    Supplied,
}

impl fmt::Display for DeltaProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeltaProvenance::ZeroByProposition => "ZeroByProposition",
            DeltaProvenance::SilvermanBound => "SilvermanBound",
            DeltaProvenance::Supplied => "Supplied",
        })
    }
}

/// Certified upper bound for `max (h_W(P)/2 - h(P))` over the rational points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaBound {
    pub value: f64,
    pub provenance: DeltaProvenance,
}

/// Natural log of `|n|`, accurate for integers of any size.
pub fn ln_abs(n: &Integer) -> f64 {
    let (mantissa, exp) = n.to_f64_exp();
    mantissa.abs().ln() + exp as f64 * LN_2
}

/// `ln |a / b|` without forming the quotient.
fn ln_ratio(a: &Integer, b: &Integer) -> f64 {
    let (ma, ea) = a.to_f64_exp();
    let (mb, eb) = b.to_f64_exp();
    (ma.abs() / mb.abs()).ln() + (ea as i64 - eb as i64) as f64 * LN_2
}

pub fn naive_height(p: &RationalPoint) -> Result<Integer, HeightError> {
    let x = p.x().ok_or(HeightError::Identity)?;
    Ok(naive_height_of(x))
}

/// `max(|p|, q)` for `x = p/q` in lowest terms.
pub fn naive_height_of(x: &Rational) -> Integer {
    Integer::from(x.numer().abs_ref()).max(x.denom().clone())
}

pub fn weil_height(p: &RationalPoint) -> Result<f64, HeightError> {
    let x = p.x().ok_or(HeightError::Identity)?;
    Ok(weil_height_rational(x))
}

/// `log max(|p|, |q|)`, with `0 = 0/1` mapping to `0`.
pub fn weil_height_rational(x: &Rational) -> f64 {
    ln_abs(&naive_height_of(x))
}

/// One step of the duplication map on x-coordinates. Returns `x(2P)` and
/// `z = 1 - 2a4/x^2 - 8a6/x^3 + a4^2/x^4`; `z` is `None` at `x = 0`.
pub fn x_double(x: &Rational, curve: &Curve) -> Result<(Rational, Option<Rational>), HeightError> {
    let mut state = Doubling::new(x, curve);
    let (num, x4) = state.numerator_and_x4();
    let z = (x4 != 0).then(|| Rational::from((num.clone(), x4)));
    if !state.step() {
        return Err(HeightError::TwoTorsion(x.to_string()));
    }
    Ok((state.x(), z))
}

/// Projective duplication on `x = X/Z` with `gcd(X, Z) = 1` and `Z > 0`.
///
/// The numerator and denominator polynomials of the duplication map have
/// resultant `disc^2`, so the common factor after a step divides `disc^2`;
/// reducing modulo `disc^2` first keeps the gcd cheap.
struct Doubling<'a> {
    curve: &'a Curve,
    x: Integer,
    z: Integer,
    resultant: Integer,
}

impl<'a> Doubling<'a> {
    fn new(x: &Rational, curve: &'a Curve) -> Self {
        let disc = curve.discriminant();
        Doubling {
            curve,
            x: x.numer().clone(),
            z: x.denom().clone(),
            resultant: Integer::from(disc.square_ref()),
        }
    }

    fn x(&self) -> Rational {
        Rational::from((self.x.clone(), self.z.clone()))
    }

    fn log_height(&self) -> f64 {
        let ax = ln_abs(&self.x);
        let az = ln_abs(&self.z);
        if self.x == 0 {
            az
        } else {
            ax.max(az)
        }
    }

    /// `X^4 - 2a4 X^2 Z^2 - 8a6 X Z^3 + a4^2 Z^4` together with `X^4`.
    fn numerator_and_x4(&self) -> (Integer, Integer) {
        let x2 = Integer::from(self.x.square_ref());
        let z2 = Integer::from(self.z.square_ref());
        let xz3 = Integer::from(&self.x * &self.z) * &z2;
        let x4 = Integer::from(x2.square_ref());
        let shifted = x2 - Integer::from(self.curve.a4() * &z2);
        let num = Integer::from(shifted.square_ref()) - xz3 * self.curve.a6() * 8u32;
        (num, x4)
    }

    /// `4Z(X^3 + a4 X Z^2 + a6 Z^3)`.
    fn denominator(&self) -> Integer {
        let z2 = Integer::from(self.z.square_ref());
        let x2 = Integer::from(self.x.square_ref());
        let inner = Integer::from(&self.x * (x2 + Integer::from(self.curve.a4() * &z2)));
        let z3 = z2 * &self.z;
        let g = inner + z3 * self.curve.a6();
        g * &self.z * 4u32
    }

    /// Replace `x` by `x(2P)`. Returns false when `2P` is the identity.
    fn step(&mut self) -> bool {
        let (mut num, _) = self.numerator_and_x4();
        let mut den = self.denominator();
        if den == 0 {
            return false;
        }
        let g = Integer::from(self.resultant.gcd_ref(&Integer::from(&num % &self.resultant)));
        let g = g.gcd(&Integer::from(&den % &self.resultant));
        if g != 1 {
            num.div_exact_mut(&g);
            den.div_exact_mut(&g);
        }
        if den.cmp0() == Ordering::Less {
            num = -num;
            den = -den;
        }
        self.x = num;
        self.z = den;
        true
    }
}

fn check_point(p: &RationalPoint, curve: &Curve) -> Result<Rational, HeightError> {
    let x = p.x().ok_or(HeightError::Identity)?.clone();
    if !curve.contains(p) {
        return Err(HeightError::OffCurve(p.to_string()));
    }
    Ok(x)
}

fn check_tol(tol: f64) -> Result<(), HeightError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(HeightError::InvalidTolerance(tol))
    }
}

/// Silverman's two-sided bound `-lower <= h(P) - h_W(P)/2 <= upper` for a
/// short Weierstrass model, nudged outward.
pub fn height_difference_bounds(curve: &Curve) -> (f64, f64) {
    let hj = weil_height_rational(&curve.j_invariant());
    let hd = weil_height_rational(&Rational::from(curve.discriminant()));
    let nudge = 1.0 + 8.0 * f64::EPSILON;
    (
        (hj / 8.0 + hd / 12.0 + SILVERMAN_CONSTANT) * nudge,
        (hj / 12.0 + hd / 12.0 + SILVERMAN_UPPER_CONSTANT) * nudge,
    )
}

/// Canonical height as the limit of `h_W(2^k P) / (2 4^k)`. Applied to
/// `2^k P`, the two-sided difference bound pins the limit to an interval of
/// width `(lower + upper) / 4^k` around the estimate; doubling continues
/// (at least `MIN_DOUBLINGS` times) until half that width is within `tol`.
pub fn canonical_height(p: &RationalPoint, curve: &Curve, tol: f64) -> Result<HeightEstimate, HeightError> {
    check_tol(tol)?;
    let x = check_point(p, curve)?;
    if curve.is_torsion(p) {
        return Ok(HeightEstimate::exact_zero());
    }
    let (lower, upper) = height_difference_bounds(curve);
    let mut state = Doubling::new(&x, curve);
    let mut scale = 2.0;
    let mut radius = f64::INFINITY;
    for k in 1..=MAX_DOUBLINGS {
        if !state.step() {
            return Ok(HeightEstimate::exact_zero());
        }
        scale *= 4.0;
        let est = state.log_height() / scale;
        let shrink = 2.0 / scale;
        radius = (lower + upper) / 2.0 * shrink + 4.0 * f64::EPSILON * est;
        if k >= MIN_DOUBLINGS && radius <= tol {
            let value = est + (upper - lower) / 2.0 * shrink;
            return Ok(HeightEstimate { value, error_radius: radius, iterations_used: k });
        }
    }
    Err(HeightError::NoConvergence { doublings: MAX_DOUBLINGS, radius })
}

/// `log(1 + 2|a4| + 8|a6| + a4^2)`, an upper bound for every `log z_n` once
/// all `x_n >= 1`.
fn series_term_bound(curve: &Curve) -> f64 {
    let a4 = Integer::from(curve.a4().abs_ref());
    let a6 = Integer::from(curve.a6().abs_ref());
    let total = Integer::from(a4.square_ref()) + Integer::from(&a4 * 2u32) + a6 * 8u32 + 1u32;
    ln_abs(&total)
}

/// Canonical height through the archimedean series, valid when the curve
/// meets the vanishing criterion for the height gap and `x(P) >= 1`.
pub fn archimedean_height(
    p: &RationalPoint,
    curve: &Curve,
    tamagawa: &TamagawaData,
    tol: f64,
) -> Result<HeightEstimate, HeightError> {
    check_tol(tol)?;
    let x = check_point(p, curve)?;
    if !delta_zero_criterion(curve, tamagawa)? {
        return Err(HeightError::Precondition("the curve does not meet the vanishing criterion".into()));
    }
    if x < 1 {
        return Err(HeightError::Precondition(format!("x(P) = {x} is below 1")));
    }
    if curve.is_torsion(p) {
        return Ok(HeightEstimate::exact_zero());
    }
    let bound = series_term_bound(curve);
    let mut terms = 1u32;
    while 4f64.powi(-(terms as i32)) * bound >= tol {
        terms += 1;
    }
    // Coordinates grow fourfold per doubling, so the series shares the
    // doubling budget of the limit method.
    if terms > MAX_DOUBLINGS + 1 {
        let reachable = (4.0 / 3.0) * (1.0 / 8.0) * 4f64.powi(-(MAX_DOUBLINGS as i32 + 1)) * bound;
        return Err(HeightError::NoConvergence { doublings: MAX_DOUBLINGS, radius: reachable });
    }
    let mut state = Doubling::new(&x, curve);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for n in 0..terms {
        if n > 0 && !state.step() {
            return Err(HeightError::Precondition("a multiple of P is 2-torsion".into()));
        }
        if state.x < state.z {
            return Err(HeightError::Precondition(format!("x(2^{n} P) is below 1")));
        }
        let (num, x4) = state.numerator_and_x4();
        if num.cmp0() != Ordering::Greater {
            return Err(HeightError::NonPositiveTerm(n));
        }
        let term = ln_ratio(&num, &x4) * 4f64.powi(-(n as i32));
        sum += term;
        abs_sum += term.abs();
    }
    let half_weil = weil_height_rational(&x) / 2.0;
    let value = half_weil + sum / 8.0;
    let tail = (4.0 / 3.0) * (1.0 / 8.0) * 4f64.powi(-(terms as i32)) * bound;
    let rounding = 64.0 * f64::EPSILON * (half_weil + abs_sum + 1.0);
    Ok(HeightEstimate { value, error_radius: tail + rounding, iterations_used: terms })
}

pub fn silverman_delta_bound(curve: &Curve) -> DeltaBound {
    let j = curve.j_invariant();
    let disc = Rational::from(curve.discriminant());
    let v = weil_height_rational(&j) / 8.0 + weil_height_rational(&disc) / 12.0 + SILVERMAN_CONSTANT;
    DeltaBound { value: v * (1.0 + 8.0 * f64::EPSILON), provenance: DeltaProvenance::SilvermanBound }
}

/// Which real intervals the vanishing criterion inspected, and the result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionReport {
    pub holds: bool,
    pub components: u32,
    pub tamagawa_all_one: bool,
    pub a4_nonpositive: bool,
    pub intervals_negative: bool,
}

/// Exact test of the sufficient condition for the height gap to vanish:
/// every `c_p = 1`, `a4 <= 0`, and with `q(x) = 2a4 x^2 + 8a6 x - a4^2`,
/// `q < 0` on `(alpha, inf)` (and on `(gamma, beta)` when the real locus has
/// two components), where `gamma < beta < alpha` are the real roots of the cubic.
pub fn delta_zero_criterion(curve: &Curve, tamagawa: &TamagawaData) -> Result<bool, HeightError> {
    Ok(delta_zero_report(curve, tamagawa)?.holds)
}

pub fn delta_zero_report(curve: &Curve, tamagawa: &TamagawaData) -> Result<CriterionReport, HeightError> {
    let disc = curve.discriminant();
    if let Err(rest) = tamagawa.covers(&disc) {
        return Err(HeightError::MissingTamagawa(rest.to_string()));
    }
    let tamagawa_all_one = tamagawa.iter().all(|(p, c, _)| c == 1 || !disc.is_divisible(p));
    let a4_nonpositive = curve.a4().cmp0() != Ordering::Greater;
    let components = curve.real_components();
    let intervals_negative = a4_nonpositive && intervals_negative(curve);
    Ok(CriterionReport {
        holds: tamagawa_all_one && a4_nonpositive && intervals_negative,
        components,
        tamagawa_all_one,
        a4_nonpositive,
        intervals_negative,
    })
}

fn intervals_negative(curve: &Curve) -> bool {
    let a4 = Rational::from(curve.a4());
    let a6 = Rational::from(curve.a6());
    let q = Poly::new(vec![-Rational::from(a4.square_ref()), a6 * 8u32, a4 * 2u32]);
    let q_roots = if q.is_zero() { Vec::new() } else { RealRoot::roots_of(&q) };
    let roots = curve.real_roots();
    let alpha = roots.last().expect("a real cubic has a real root");
    if !negative_on(&q, &q_roots, alpha, None) {
        return false;
    }
    if roots.len() == 3 {
        return negative_on(&q, &q_roots, &roots[0], Some(&roots[1]));
    }
    true
}

/// Whether `q < 0` on the open interval `(lo, hi)`, `hi = None` meaning infinity.
fn negative_on(q: &Poly, q_roots: &[RealRoot], lo: &RealRoot, hi: Option<&RealRoot>) -> bool {
    let inside = |r: &RealRoot| {
        r.cmp_root(lo) == Ordering::Greater && hi.is_none_or(|h| r.cmp_root(h) == Ordering::Less)
    };
    if q_roots.iter().any(inside) {
        return false;
    }
    let probe = match hi {
        None => lo.interval().hi().clone(),
        Some(h) => lo.rational_below(h).expect("roots are ordered"),
    };
    q.sign_at(&probe) == Ordering::Less
}

/// Zero when the vanishing criterion holds for the supplied Tamagawa data,
/// Silverman's bound otherwise (including when the data is absent or
/// incomplete).
pub fn delta_upper(curve: &Curve, tamagawa: Option<&TamagawaData>) -> DeltaBound {
    match tamagawa.map(|t| delta_zero_criterion(curve, t)) {
        Some(Ok(true)) => DeltaBound { value: 0.0, provenance: DeltaProvenance::ZeroByProposition },
        _ => silverman_delta_bound(curve),
    }
}
