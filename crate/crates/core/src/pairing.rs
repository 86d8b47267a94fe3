//! Ideal class pairing between a curve and its twist `-D (y/2)^2 = x^3 + a4 x + a6`.
//!
//! The middle coefficient is `(2B + ell a) / (C^3 v)` with `a = alpha/G`.
//! Since `A = u C^2 (mod a)`, the curve equations give `4B^2 = -D C^6 v^2
//! (mod a)`, so this numerator makes `b^2 = -D (mod a)` as required.

use std::cmp::Ordering;

use rug::Integer;
use thiserror::Error;

use crate::class_forms::{Discriminant, FormError, QuadraticForm};
use crate::curve::{Curve, CurveError, RationalPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("D(t) = {0} is not positive")]
    NonPositiveD(String),
    #[error("{0}")]
    Form(#[from] FormError),
    #[error("{0}")]
    Curve(#[from] CurveError),
    #[error("({u}, {v}) is not on the twist by -{d}")]
    NotOnTwist { u: String, v: String, d: u64 },
    #[error("twist point needs v != 0, and v even when -D is odd")]
    BadTwistPoint,
    #[error("x(P) equals u, so alpha = 0")]
    ZeroAlpha,
    #[error("no admissible ell in one full period (alpha/G = {0})")]
    NoAdmissibleEll(String),
}

/// Integral point `(u, v)` on the twist: `-D v^2 / 4 = u^3 + a4 u + a6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistPoint {
    u: Integer,
    v: Integer,
}

impl TwistPoint {
    pub fn new(u: impl Into<Integer>, v: impl Into<Integer>, d: Discriminant, curve: &Curve) -> Result<Self, PairingError> {
        let (u, v) = (u.into(), v.into());
        if v == 0 || (d.value() % 2 == 1 && v.is_odd()) {
            return Err(PairingError::BadTwistPoint);
        }
        let lhs = Integer::from(v.square_ref()) * d.value();
        let u2 = Integer::from(u.square_ref());
        let rhs = Integer::from(&u * (u2 + curve.a4())) + curve.a6();
        if Integer::from(-lhs) != rhs * 4u32 {
            return Err(PairingError::NotOnTwist { u: u.to_string(), v: v.to_string(), d: d.value() });
        }
        Ok(TwistPoint { u, v })
    }

    pub fn u(&self) -> &Integer {
        &self.u
    }

    pub fn v(&self) -> &Integer {
        &self.v
    }
}

/// `D(t) = 4(t^3 + a4 t - a6)`.
pub fn d_of_t(t: &Integer, curve: &Curve) -> Integer {
    let t2 = Integer::from(t.square_ref());
    (Integer::from(t * (t2 + curve.a4())) - curve.a6()) * 4u32
}

/// The twist point `(-t, 1)` and its discriminant `-D(t)`.
pub fn twist_point_from_t(t: u64, curve: &Curve) -> Result<(TwistPoint, Discriminant), PairingError> {
    let d = d_of_t(&Integer::from(t), curve);
    if d.cmp0() != Ordering::Greater {
        return Err(PairingError::NonPositiveD(d.to_string()));
    }
    let disc = Discriminant::from_integer(&d)?;
    let q = TwistPoint::new(-Integer::from(t), 1, disc, curve)?;
    Ok((q, disc))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingForm {
    /// Reduced representative of the class.
    pub reduced: QuadraticForm,
    /// The form as produced by the formula, before reduction.
    pub raw: QuadraticForm,
    pub ell: Integer,
    pub alpha: Integer,
    pub g: Integer,
    /// `alpha / G`, the leading coefficient of the raw form.
    pub a: Integer,
}

/// Choice of `w` in the middle coefficient `(2 w^3 B + ell a) / (C^3 v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MiddleWeight {
    /// `w = 1`: always admits an `ell`.
    #[default]
    One,
    /// `w = C`: agrees with `One` when `C = 1`, but for `C > 1` the
    /// numerator is off by `C^3` modulo `a` and usually has no valid `ell`.
    Denominator,
}

impl std::fmt::Display for MiddleWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MiddleWeight::One => "w = 1",
            MiddleWeight::Denominator => "w = C",
        })
    }
}

pub fn pairing_form(p: &RationalPoint, q: &TwistPoint, d: Discriminant, curve: &Curve) -> Result<PairingForm, PairingError> {
    pairing_form_with(p, q, d, curve, MiddleWeight::One)
}

pub fn pairing_form_with(
    p: &RationalPoint,
    q: &TwistPoint,
    d: Discriminant,
    curve: &Curve,
    weight: MiddleWeight,
) -> Result<PairingForm, PairingError> {
    let dz = Integer::from(d.value());
    if p.is_identity() {
        let ell = Integer::from(d.value() % 2);
        let c = (Integer::from(ell.square_ref()) + &dz) / 4u32;
        let raw = QuadraticForm::new(1, ell.clone(), c)?;
        return Ok(PairingForm {
            reduced: raw.reduce(),
            raw,
            ell,
            alpha: Integer::from(1),
            g: Integer::from(1),
            a: Integer::from(1),
        });
    }
    if !curve.contains(p) {
        return Err(CurveError::OffCurve(p.to_string()).into());
    }
    let w = p.weighted()?;
    let c2 = Integer::from(w.c.square_ref());
    let c3 = Integer::from(&c2 * &w.c);
    let alpha = Integer::from(&w.a - Integer::from(&q.u * &c2)).abs();
    if alpha == 0 {
        return Err(PairingError::ZeroAlpha);
    }
    let v2 = Integer::from(q.v.square_ref());
    let g = Integer::from(alpha.gcd_ref(&v2));
    let a = Integer::from(&alpha / &g);

    // Middle coefficient (2B + ell a) / M with M = C^3 v must be integral,
    // then c = (b^2 + D) / (4a) must be integral too.
    let m = Integer::from(&c3 * &q.v);
    let m_abs = Integer::from(m.abs_ref());
    let base = match weight {
        MiddleWeight::One => Integer::from(&w.b * 2u32),
        MiddleWeight::Denominator => Integer::from(&c3 * &w.b) * 2u32,
    };
    let ell = find_ell(&base, &a, &m, &m_abs, &dz).ok_or_else(|| PairingError::NoAdmissibleEll(a.to_string()))?;
    let b = Integer::from(&base + Integer::from(&ell * &a)) / &m;
    let c = (Integer::from(b.square_ref()) + &dz) / Integer::from(&a * 4u32);
    let raw = QuadraticForm::new(a.clone(), b, c)?;
    debug_assert_eq!(raw.discriminant(), Integer::from(-&dz));
    Ok(PairingForm { reduced: raw.reduce(), raw, ell, alpha, g, a })
}

/// An `ell` in `[0, 2 a |M|)` making both coefficients integral: the smallest
/// even one if any, else the smallest.
///
/// Integrality of the middle coefficient is the congruence
/// `a ell = -base (mod |M|)`, whose solutions form one class modulo `|M|/g`
/// with `g = gcd(a, |M|)`. Along that class the middle coefficient moves in
/// steps of `a/g`, so integrality of the last coefficient (which depends on
/// the middle one modulo `2a`) repeats with period `2g`. Scanning `2g` members
/// of the class is therefore the same as scanning the whole range.
///
/// When `4 | a` two solutions can survive whose middle coefficients differ
/// by `a`, and these need not give the same class. Even `ell` keeps
/// `b C^3 v = 2B (mod 2a)`, which is the choice that commutes with `P -> -P`.
fn find_ell(base: &Integer, a: &Integer, m: &Integer, m_abs: &Integer, d: &Integer) -> Option<Integer> {
    let g = Integer::from(a.gcd_ref(m_abs));
    let neg_base = Integer::from(-base);
    if !neg_base.is_divisible(&g) {
        return None;
    }
    let modulus = Integer::from(m_abs / &g);
    let ell0 = if modulus == 1 {
        Integer::new()
    } else {
        let a_red = Integer::from(a / &g);
        let rhs = Integer::from(&neg_base / &g);
        let inv = a_red.invert(&modulus).ok()?;
        (rhs * inv).modulo(&modulus)
    };
    let four_a = Integer::from(a * 4u32);
    let mut first = None;
    let mut ell = ell0;
    let steps = Integer::from(&g * 2u32);
    let mut k = Integer::new();
    while k < steps {
        let b = Integer::from(base + Integer::from(&ell * a)) / m;
        if (Integer::from(b.square_ref()) + d).is_divisible(&four_a) {
            if ell.is_even() {
                return Some(ell);
            }
            first.get_or_insert_with(|| ell.clone());
        }
        ell += &modulus;
        k += 1u32;
    }
    first
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomyReport {
    pub forms: Vec<PairingForm>,
    /// Index pairs whose forms are equivalent.
    pub equivalent_pairs: Vec<(usize, usize)>,
    /// Equivalent pairs violating `a1 = a2` or `4 a1 a2 >= D`.
    pub violations: Vec<(usize, usize)>,
}

/// For each pair of inputs with equivalent forms, check that the leading
/// coefficients agree or that their product is at least `D/4`. The identity
/// counts with leading coefficient 1.
pub fn dichotomy_check(
    pairs: &[(RationalPoint, TwistPoint)],
    d: Discriminant,
    curve: &Curve,
) -> Result<DichotomyReport, PairingError> {
    let forms = pairs
        .iter()
        .map(|(p, q)| pairing_form(p, q, d, curve))
        .collect::<Result<Vec<_>, _>>()?;
    let mut equivalent_pairs = Vec::new();
    let mut violations = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            if forms[i].reduced != forms[j].reduced {
                continue;
            }
            equivalent_pairs.push((i, j));
            let (a1, a2) = (&forms[i].a, &forms[j].a);
            let big = Integer::from(a1 * a2) * 4u32 >= d.value();
            if a1 != a2 && !big {
                violations.push((i, j));
            }
        }
    }
    Ok(DichotomyReport { forms, equivalent_pairs, violations })
}

/// Multiples `nP` of a non-torsion point with `h(nP) <= bound`, paired with
/// `Q`. `n` runs over `0..=n_max` with `n_max = floor(sqrt(bound / h(P)))`;
/// the full count including negatives is `2 n_max + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultipleCount {
    pub n_max: u64,
    pub count: u64,
    pub forms: Vec<QuadraticForm>,
    /// Whether the forms for distinct `n >= 0` lie in distinct classes.
    pub distinct: bool,
}

pub fn small_multiples(
    p: &RationalPoint,
    height: f64,
    bound: f64,
    q: &TwistPoint,
    d: Discriminant,
    curve: &Curve,
) -> Result<MultipleCount, PairingError> {
    let n_max = if height > 0.0 && bound >= 0.0 { (bound / height).sqrt().floor() as u64 } else { 0 };
    let mut forms = Vec::new();
    for n in 0..=n_max {
        let point = curve.mul(n as i64, p)?;
        forms.push(pairing_form(&point, q, d, curve)?.reduced);
    }
    let mut sorted = forms.clone();
    sorted.sort();
    sorted.dedup();
    Ok(MultipleCount { n_max, count: 2 * n_max + 1, distinct: sorted.len() == forms.len(), forms })
}
