use std::cmp::Ordering;

use rug::Integer;

use super::factor::factorize;
use super::IntegralityError;
use crate::curve::{Curve, RationalPoint};

/// Largest order a rational torsion point can have.
const MAX_ORDER: u32 = 12;

/// Rational torsion points (identity first) by Lutz–Nagell: a non-identity
/// torsion point has integer coordinates with `y = 0` or `y^2 | disc`.
pub fn torsion_points(curve: &Curve) -> Result<Vec<RationalPoint>, IntegralityError> {
    let disc = curve.discriminant();
    let fac = factorize(&disc)?;
    let mut ys = vec![Integer::new()];
    let mut square_divisors = vec![Integer::from(1)];
    for (p, k) in fac.factors() {
        let len = square_divisors.len();
        let mut pk = Integer::from(1);
        for _ in 0..k / 2 {
            pk *= p;
            for i in 0..len {
                square_divisors.push(Integer::from(&square_divisors[i] * &pk));
            }
        }
    }
    ys.extend(square_divisors);

    let mut points = vec![RationalPoint::Identity];
    for y in ys {
        let c0 = Integer::from(curve.a6() - Integer::from(y.square_ref()));
        for x in integer_roots_of_cubic(curve.a4(), &c0) {
            let candidates = if y == 0 {
                vec![RationalPoint::affine(x.clone(), 0)]
            } else {
                vec![RationalPoint::affine(x.clone(), y.clone()), RationalPoint::affine(x.clone(), Integer::from(-&y))]
            };
            for p in candidates {
                if curve.torsion_order_of(&p, MAX_ORDER).is_some() {
                    points.push(p);
                }
            }
        }
    }
    Ok(points)
}

pub fn torsion_order(curve: &Curve) -> Result<u32, IntegralityError> {
    Ok(torsion_points(curve)?.len() as u32)
}

/// Distinct integer roots of `x^3 + a x + b`.
pub fn integer_roots_of_cubic(a: &Integer, b: &Integer) -> Vec<Integer> {
    let f = |x: &Integer| -> Integer {
        let x2 = Integer::from(x.square_ref());
        Integer::from(x * Integer::from(&x2 + a)) + b
    };
    // Critical points sit in [-s-1, -s] and [s, s+1] with s = isqrt(-a/3); the
    // windows between the remaining knots are monotone.
    let mut breaks: Vec<Integer> = Vec::new();
    if a.cmp0() == Ordering::Less {
        let r = Integer::from(-a) / 3u32;
        let s = r.sqrt();
        breaks.push(Integer::from(-&s) - 1u32);
        breaks.push(Integer::from(-&s));
        breaks.push(Integer::from(-&s) + 1u32);
        breaks.push(Integer::from(&s) - 1u32);
        breaks.push(s.clone());
        breaks.push(Integer::from(&s) + 1u32);
    }
    // Any root satisfies |x| <= 1 + max(|a|, |b|).
    let bound = Integer::from(a.abs_ref()).max(Integer::from(b.abs_ref())) + 1u32;
    let mut knots = vec![Integer::from(-&bound)];
    knots.extend(breaks.into_iter().filter(|k| k.clone().abs() < bound));
    knots.push(bound);
    knots.sort();

    let mut roots: Vec<Integer> = Vec::new();
    for k in &knots {
        if f(k) == 0 {
            roots.push(k.clone());
        }
    }
    for w in knots.windows(2) {
        if let Some(r) = bisect_root(&f, &w[0], &w[1]) {
            roots.push(r);
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn bisect_root(f: &impl Fn(&Integer) -> Integer, lo: &Integer, hi: &Integer) -> Option<Integer> {
    let (flo, fhi) = (f(lo).cmp0(), f(hi).cmp0());
    if flo == Ordering::Equal || fhi == Ordering::Equal || flo == fhi {
        return None;
    }
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    while Integer::from(&hi - &lo) > 1 {
        let mid = Integer::from(&lo + &hi) >> 1u32;
        match f(&mid).cmp0() {
            Ordering::Equal => return Some(mid),
            s if s == flo => lo = mid,
            _ => hi = mid,
        }
    }
    None
}

/// Whether every coordinate of `p` is an integer.
pub fn is_integral(p: &RationalPoint) -> bool {
    match p {
        RationalPoint::Identity => true,
        RationalPoint::Affine { x, y } => *x.denom() == 1 && *y.denom() == 1,
    }
}
