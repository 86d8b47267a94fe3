use std::cmp::Ordering;
use std::fmt;

use rug::Integer;

use super::FormError;
use crate::arith::{factor_u64, isqrt};

/// Positive definite integral binary quadratic form `aX^2 + bXY + cY^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    a: Integer,
    b: Integer,
    c: Integer,
}

impl QuadraticForm {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>) -> Result<Self, FormError> {
        let f = QuadraticForm { a: a.into(), b: b.into(), c: c.into() };
        if f.a.cmp0() != Ordering::Greater || f.discriminant().cmp0() != Ordering::Less {
            return Err(FormError::NotPositiveDefinite(f.to_string()));
        }
        Ok(f)
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }

    pub fn b(&self) -> &Integer {
        &self.b
    }

    pub fn c(&self) -> &Integer {
        &self.c
    }

    pub fn discriminant(&self) -> Integer {
        Integer::from(self.b.square_ref()) - Integer::from(&self.a * &self.c) * 4u32
    }

    pub fn eval(&self, x: &Integer, y: &Integer) -> Integer {
        Integer::from(&self.a * x) * x + Integer::from(&self.b * x) * y + Integer::from(&self.c * y) * y
    }

    /// The form `F(-X, Y)`, which represents the inverse class.
    pub fn inverse(&self) -> Self {
        QuadraticForm { a: self.a.clone(), b: Integer::from(-&self.b), c: self.c.clone() }
    }

    pub fn is_reduced(&self) -> bool {
        let abs_b = Integer::from(self.b.abs_ref());
        if abs_b > self.a || self.a > self.c {
            return false;
        }
        if (abs_b == self.a || self.a == self.c) && self.b.cmp0() == Ordering::Less {
            return false;
        }
        true
    }

    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a.clone(), self.b.clone(), self.c.clone());
        loop {
            // Translate so that -a < b <= a.
            let neg_a = Integer::from(-&a);
            if b <= neg_a || b > a {
                let two_a = Integer::from(&a * 2u32);
                let k = Integer::from(&a - &b).div_rem_floor(two_a.clone()).0;
                let bk = Integer::from(&b * &k);
                c += Integer::from(&a * &k) * &k + bk;
                b += two_a * &k;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b.cmp0() == Ordering::Less {
                b = -b;
            }
            break;
        }
        QuadraticForm { a, b, c }
    }

    pub fn equivalent(&self, other: &QuadraticForm) -> Result<bool, FormError> {
        if self.discriminant() != other.discriminant() {
            return Err(FormError::DiscriminantMismatch(self.discriminant().to_string(), other.discriminant().to_string()));
        }
        Ok(self.reduce() == other.reduce())
    }

    /// Class weight `1/|Aut|` relative to the generic `{+-1}`, in sixths:
    /// 6 in general, 3 for multiples of `x^2 + y^2`, 2 for multiples of
    /// `x^2 + xy + y^2`. Meaningful on reduced forms.
    pub fn weight_sixths(&self) -> u64 {
        if self.a == self.c && self.b == 0 {
            3
        } else if self.a == self.c && self.b == self.a {
            2
        } else {
            6
        }
    }

    /// Primitive means gcd(a, b, c) = 1.
    pub fn is_primitive(&self) -> bool {
        Integer::from(self.a.gcd_ref(&self.b)).gcd(&self.c) == 1
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

pub fn reduce_form(f: &QuadraticForm) -> QuadraticForm {
    f.reduce()
}

pub fn equivalent(f1: &QuadraticForm, f2: &QuadraticForm) -> Result<bool, FormError> {
    f1.equivalent(f2)
}

/// A positive integer `D` with `-D = 0, 1 (mod 4)`, naming the discriminant `-D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant(u64);

impl Discriminant {
    pub fn new(d: u64) -> Result<Self, FormError> {
        if d == 0 || d % 4 == 1 || d % 4 == 2 {
            return Err(FormError::InvalidDiscriminant(d.to_string()));
        }
        Ok(Discriminant(d))
    }

    pub fn from_integer(d: &Integer) -> Result<Self, FormError> {
        d.to_u64()
            .ok_or_else(|| FormError::InvalidDiscriminant(d.to_string()))
            .and_then(Discriminant::new)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// `(D0, f)` with `D = D0 f^2` and `-D0` fundamental.
    pub fn fundamental_decomposition(self) -> (u64, u64) {
        let mut squarefree = 1u64;
        let mut root = 1u64;
        for (p, k) in factor_u64(self.0) {
            root *= p.pow(k / 2);
            if k % 2 == 1 {
                squarefree *= p;
            }
        }
        // -D = -s m^2 with s squarefree.
        if squarefree % 4 == 3 {
            (squarefree, root)
        } else {
            (4 * squarefree, root / 2)
        }
    }

    pub fn is_fundamental(self) -> bool {
        self.fundamental_decomposition().1 == 1
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-{}", self.0)
    }
}

/// All reduced forms of discriminant `-D`, sorted by `(a, b, c)`.
pub fn enumerate_reduced(d: Discriminant) -> Vec<QuadraticForm> {
    let n = d.value();
    let mut out = Vec::new();
    let b_max = isqrt(n / 3);
    let mut b = n % 2;
    while b <= b_max {
        let ac = (b * b + n) / 4;
        let mut a = b.max(1);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                let make = |b: i64| QuadraticForm { a: a.into(), b: b.into(), c: c.into() };
                out.push(make(b as i64));
                if b > 0 && b < a && a < c {
                    out.push(make(-(b as i64)));
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort();
    out
}
