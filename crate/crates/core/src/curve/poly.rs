use std::cmp::Ordering;
use std::fmt;

use rug::{Integer, Rational};

/// Dense univariate polynomial over Q, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_integers(coeffs: &[Integer]) -> Self {
        Poly::new(coeffs.iter().map(|c| Rational::from(c.clone())).collect())
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).cmp0()
    }

    /// Sign as x tends to +infinity.
    pub fn sign_at_pos_inf(&self) -> Ordering {
        self.leading().map_or(Ordering::Equal, |c| c.cmp0())
    }

    /// Sign as x tends to -infinity.
    pub fn sign_at_neg_inf(&self) -> Ordering {
        match self.degree() {
            None => Ordering::Equal,
            Some(d) if d % 2 == 0 => self.sign_at_pos_inf(),
            Some(_) => self.sign_at_pos_inf().reverse(),
        }
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * Integer::from(i)))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lead) => {
                let lead = lead.clone();
                Poly::new(self.coeffs.iter().map(|c| Rational::from(c / &lead)).collect())
            }
        }
    }

    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::new(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = Rational::from(rem.last().unwrap() / &lead);
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= Rational::from(&factor * c);
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(|c| *c == 0) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => Poly::gcd(self, &self.derivative()).degree() == Some(0),
        }
    }

    /// The product of the distinct irreducible factors, made monic.
    pub fn squarefree_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.div_rem(&g).0.monic()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.cmp0() == Ordering::Less { '-' } else { '+' })?;
            } else if c.cmp0() == Ordering::Less {
                write!(f, "-")?;
            }
            first = false;
            let abs = Rational::from(c.abs_ref());
            match i {
                0 => write!(f, "{abs}")?,
                1 if abs == 1 => write!(f, "x")?,
                1 => write!(f, "{abs}*x")?,
                _ if abs == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "{abs}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Sturm sequence of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    seq: Vec<Poly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let mut seq = vec![p.clone()];
        if p.degree().unwrap_or(0) > 0 {
            seq.push(p.derivative());
            loop {
                let n = seq.len();
                let r = seq[n - 2].rem(&seq[n - 1]).neg();
                if r.is_zero() {
                    break;
                }
                seq.push(r);
            }
        }
        SturmChain { seq }
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs {
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.seq.iter().map(|p| p.sign_at(x)))
    }

    /// Number of distinct real roots in the half-open interval (lo, hi].
    pub fn count_between(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo) - self.variations_at(hi)
    }

    pub fn count_real(&self) -> usize {
        Self::variations(self.seq.iter().map(Poly::sign_at_neg_inf))
            - Self::variations(self.seq.iter().map(Poly::sign_at_pos_inf))
    }
}
