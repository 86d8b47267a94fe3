use std::cmp::Ordering;
use std::fmt;

use rug::{Integer, Rational};

use super::poly::{Poly, SturmChain};
use super::CurveError;

/// Open interval `(lo, hi)` with rational endpoints holding exactly one simple
/// real root of its polynomial; neither endpoint is a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatingInterval {
    lo: Rational,
    hi: Rational,
}

impl IsolatingInterval {
    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn multiplicity(&self) -> u32 {
        1
    }

    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    /// Halve the interval, keeping the half with the root. If the midpoint is
    /// itself the root the interval is recentred on it.
    pub fn bisect(&mut self, poly: &Poly) {
        let mid = Rational::from(&self.lo + &self.hi) / 2u32;
        match poly.sign_at(&mid) {
            Ordering::Equal => {
                let quarter = self.width() / 4u32;
                self.lo = Rational::from(&mid - &quarter);
                self.hi = mid + quarter;
            }
            s if s == poly.sign_at(&self.lo) => self.lo = mid,
            _ => self.hi = mid,
        }
    }

    /// Bisect until the width is at most `width`.
    pub fn refine(&mut self, poly: &Poly, width: &Rational) {
        while self.width() > *width {
            self.bisect(poly);
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        (Rational::from(&self.lo + &self.hi) / 2u32).to_f64()
    }
}

impl fmt::Display for IsolatingInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Cauchy bound: every real root lies strictly inside (-B, B).
fn cauchy_bound(p: &Poly) -> Rational {
    let lead = p.leading().unwrap().clone().abs();
    let max = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.clone().abs())
        .max()
        .unwrap_or_default();
    max / lead + 1u32
}

/// Isolate the real roots of a squarefree polynomial given by integer
/// coefficients in ascending degree order. Intervals come back sorted.
pub fn isolate_real_roots(coeffs: &[Integer]) -> Result<Vec<IsolatingInterval>, CurveError> {
    isolate_poly(&Poly::from_integers(coeffs))
}

pub fn isolate_poly(p: &Poly) -> Result<Vec<IsolatingInterval>, CurveError> {
    match p.degree() {
        None => return Err(CurveError::NotSquarefree),
        Some(0) => return Ok(Vec::new()),
        _ => {}
    }
    if !p.is_squarefree() {
        return Err(CurveError::NotSquarefree);
    }
    let sturm = SturmChain::new(p);
    let bound = cauchy_bound(p);
    let mut pending = vec![(Rational::from(-&bound), bound)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = pending.pop() {
        match sturm.count_between(&lo, &hi) {
            0 => {}
            1 => out.push(IsolatingInterval { lo, hi }),
            _ => {
                let mid = split_point(p, &lo, &hi);
                pending.push((mid.clone(), hi));
                pending.push((lo, mid));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

/// A point strictly inside (lo, hi), near the middle, that is not a root.
fn split_point(p: &Poly, lo: &Rational, hi: &Rational) -> Rational {
    let width = Rational::from(hi - lo);
    for k in 1u32.. {
        let x = Rational::from((k, k + 1)) * &width + lo;
        if p.sign_at(&x) != Ordering::Equal {
            return x;
        }
    }
    unreachable!()
}

/// A real algebraic number: a root of `poly` pinned down by an isolating interval.
#[derive(Clone, Debug)]
pub struct RealRoot {
    poly: Poly,
    interval: IsolatingInterval,
}

impl RealRoot {
    pub fn new(poly: Poly, interval: IsolatingInterval) -> Self {
        RealRoot { poly, interval }
    }

    /// All real roots of a nonzero polynomial, ascending. Repeated factors are
    /// removed first so each distinct root appears once.
    pub fn roots_of(p: &Poly) -> Vec<RealRoot> {
        let sf = p.squarefree_part();
        isolate_poly(&sf)
            .unwrap_or_default()
            .into_iter()
            .map(|iv| RealRoot::new(sf.clone(), iv))
            .collect()
    }

    pub fn interval(&self) -> &IsolatingInterval {
        &self.interval
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn approx(&self) -> f64 {
        let mut iv = self.interval.clone();
        let tiny = Rational::from((1u32, 1u64 << 60));
        iv.refine(&self.poly, &tiny);
        iv.midpoint_f64()
    }

    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        let iv = &self.interval;
        if q <= &iv.lo {
            return Ordering::Greater;
        }
        if q >= &iv.hi {
            return Ordering::Less;
        }
        match self.poly.sign_at(q) {
            Ordering::Equal => Ordering::Equal,
            s if s == self.poly.sign_at(&iv.lo) => Ordering::Greater,
            _ => Ordering::Less,
        }
    }

    /// Exact comparison of two real algebraic numbers.
    pub fn cmp_root(&self, other: &RealRoot) -> Ordering {
        let g = Poly::gcd(&self.poly, &other.poly);
        if g.degree().unwrap_or(0) > 0 {
            let lo = (&self.interval.lo).max(&other.interval.lo);
            let hi = (&self.interval.hi).min(&other.interval.hi);
            if lo < hi && SturmChain::new(&g).count_between(lo, hi) > 0 {
                return Ordering::Equal;
            }
        }
        let (mut a, mut b) = (self.interval.clone(), other.interval.clone());
        loop {
            if a.hi <= b.lo {
                return Ordering::Less;
            }
            if b.hi <= a.lo {
                return Ordering::Greater;
            }
            a.bisect(&self.poly);
            b.bisect(&other.poly);
        }
    }

    /// A rational number strictly between `self` and a larger root `other`.
    pub fn rational_below(&self, other: &RealRoot) -> Option<Rational> {
        if self.cmp_root(other) != Ordering::Less {
            return None;
        }
        let (mut a, mut b) = (self.interval.clone(), other.interval.clone());
        while a.hi > b.lo {
            a.bisect(&self.poly);
            b.bisect(&other.poly);
        }
        Some(a.hi)
    }
}
