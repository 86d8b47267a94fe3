use std::collections::BTreeMap;
use std::fmt;

use rug::Integer;

use super::factor::factorize;
use super::IntegralityError;
use crate::curve::Curve;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

/// Local data at one prime, read off a model that is minimal at that prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalReduction {
    pub prime: Integer,
    pub kodaira: Kodaira,
    pub tamagawa: u32,
    /// Valuation of the minimal discriminant.
    pub min_disc_valuation: u32,
    /// How many times the model was scaled down to reach minimality.
    pub scalings: u32,
}

/// Tamagawa numbers keyed by the primes dividing the discriminant of the
/// given model. Kodaira types are absent when the numbers were supplied by
/// the caller.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TamagawaData {
    entries: BTreeMap<Integer, (u32, Option<Kodaira>)>,
}

impl TamagawaData {
    /// Build from caller-supplied `(p, c_p)` pairs. Primes of the discriminant
    /// that are not listed are left missing.
    pub fn from_overrides(pairs: &[(Integer, u32)]) -> Result<Self, IntegralityError> {
        let mut entries = BTreeMap::new();
        for (p, c) in pairs {
            if *c == 0 {
                return Err(IntegralityError::BadOverride(format!("{p}:{c}")));
            }
            if entries.insert(p.clone(), (*c, None)).is_some() {
                return Err(IntegralityError::BadOverride(format!("prime {p} given twice")));
            }
        }
        Ok(TamagawaData { entries })
    }

    /// Entries of `overrides` replace or extend those of `self`.
    pub fn merged_with(mut self, overrides: &TamagawaData) -> Self {
        for (p, e) in &overrides.entries {
            self.entries.insert(p.clone(), *e);
        }
        self
    }

    pub fn get(&self, p: &Integer) -> Option<u32> {
        self.entries.get(p).map(|e| e.0)
    }

    pub fn kodaira(&self, p: &Integer) -> Option<Kodaira> {
        self.entries.get(p).and_then(|e| e.1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Integer, u32, Option<Kodaira>)> {
        self.entries.iter().map(|(p, (c, k))| (p, *c, *k))
    }

    pub fn primes(&self) -> Vec<Integer> {
        self.entries.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn all_one(&self) -> bool {
        self.entries.values().all(|e| e.0 == 1)
    }

    pub fn product(&self) -> Integer {
        self.entries.values().map(|e| Integer::from(e.0)).product()
    }

    /// Check that every prime dividing `disc` has an entry. On failure the
    /// part of `disc` left after removing the listed primes is returned.
    pub fn covers(&self, disc: &Integer) -> Result<(), Integer> {
        let mut rest = Integer::from(disc.abs_ref());
        for p in self.entries.keys() {
            if *p > 1 {
                while rest.is_divisible(p) {
                    rest /= p;
                }
            }
        }
        if rest == 1 {
            Ok(())
        } else {
            Err(rest)
        }
    }
}

pub fn tamagawa_numbers(curve: &Curve) -> Result<TamagawaData, IntegralityError> {
    let disc = curve.discriminant();
    let mut entries = BTreeMap::new();
    for p in factorize(&disc)?.primes() {
        let local = local_reduction(curve, p);
        entries.insert(p.clone(), (local.tamagawa, Some(local.kodaira)));
    }
    Ok(TamagawaData { entries })
}

pub fn local_reduction(curve: &Curve, p: &Integer) -> LocalReduction {
    let model = Weierstrass {
        a1: Integer::new(),
        a2: Integer::new(),
        a3: Integer::new(),
        a4: curve.a4().clone(),
        a6: curve.a6().clone(),
    };
    tate(model, p)
}

/// General Weierstrass model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weierstrass {
    pub a1: Integer,
    pub a2: Integer,
    pub a3: Integer,
    pub a4: Integer,
    pub a6: Integer,
}

impl Weierstrass {
    pub fn new(a: [i64; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a.map(Integer::from);
        Weierstrass { a1, a2, a3, a4, a6 }
    }

    fn b2(&self) -> Integer {
        Integer::from(self.a1.square_ref()) + Integer::from(&self.a2 * 4u32)
    }
    fn b4(&self) -> Integer {
        Integer::from(&self.a1 * &self.a3) + Integer::from(&self.a4 * 2u32)
    }
    fn b6(&self) -> Integer {
        Integer::from(self.a3.square_ref()) + Integer::from(&self.a6 * 4u32)
    }
    fn b8(&self) -> Integer {
        let a1sq = Integer::from(self.a1.square_ref());
        a1sq * &self.a6 + Integer::from(&self.a2 * &self.a6) * 4u32
            - Integer::from(&self.a1 * &self.a3) * &self.a4
            + Integer::from(&self.a2 * Integer::from(self.a3.square_ref()))
            - Integer::from(self.a4.square_ref())
    }
    fn c4(&self) -> Integer {
        let b2 = self.b2();
        Integer::from(b2.square_ref()) - self.b4() * 24u32
    }
    fn c6(&self) -> Integer {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        let b2cube = Integer::from(&b2 * Integer::from(b2.square_ref()));
        -b2cube + b2 * b4 * 36u32 - b6 * 216u32
    }
    pub fn discriminant(&self) -> Integer {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        let t1 = Integer::from(b2.square_ref()) * &b8;
        let t2 = Integer::from(&b4 * Integer::from(b4.square_ref())) * 8u32;
        let t3 = Integer::from(b6.square_ref()) * 27u32;
        let t4 = Integer::from(&b2 * &b4) * &b6 * 9u32;
        -t1 - t2 - t3 + t4
    }

    /// Substitute `x = x' + r`, `y = y' + s x' + t`.
    fn transform(&mut self, r: &Integer, s: &Integer, t: &Integer) {
        let Weierstrass { a1, a2, a3, a4, a6 } = self.clone();
        let r2 = Integer::from(r.square_ref());
        let rs = Integer::from(r * s);
        self.a6 = a6.clone() + Integer::from(r * &a4) + Integer::from(&r2 * &a2) + Integer::from(&r2 * r)
            - Integer::from(t * &a3)
            - Integer::from(t.square_ref())
            - Integer::from(r * t) * &a1;
        self.a4 = a4 - Integer::from(s * &a3) + Integer::from(r * &a2) * 2u32
            - (Integer::from(t + &rs)) * &a1
            + Integer::from(&r2 * 3u32)
            - Integer::from(s * t) * 2u32;
        self.a3 = a3 + Integer::from(r * &a1) + Integer::from(t * 2u32);
        self.a2 = a2 - Integer::from(s * &a1) + Integer::from(r * 3u32) - Integer::from(s.square_ref());
        self.a1 = a1 + Integer::from(s * 2u32);
    }

    fn scale_down(&mut self, p: &Integer) {
        let mut pk = p.clone();
        self.a1 /= &pk;
        pk *= p;
        self.a2 /= &pk;
        pk *= p;
        self.a3 /= &pk;
        pk *= p;
        self.a4 /= &pk;
        pk *= p;
        pk *= p;
        self.a6 /= &pk;
    }
}

fn valuation(n: &Integer, p: &Integer) -> u32 {
    if *n == 0 {
        return u32::MAX;
    }
    let mut n = n.clone();
    let mut v = 0;
    while n.is_divisible(p) {
        n /= p;
        v += 1;
    }
    v
}

fn pow(p: &Integer, k: u32) -> Integer {
    let mut acc = Integer::from(1);
    for _ in 0..k {
        acc *= p;
    }
    acc
}

fn divisible(n: &Integer, p: &Integer, k: u32) -> bool {
    n.is_divisible(&pow(p, k))
}

fn md(n: &Integer, m: &Integer) -> Integer {
    Integer::from(n.modulo_ref(m))
}

fn inv(n: &Integer, p: &Integer) -> Integer {
    md(n, p).invert(p).expect("unit modulo p")
}

/// Number of distinct roots modulo `p` of a polynomial (ascending
/// coefficients) whose leading coefficient is a unit.
pub fn count_roots_mod_p(coeffs: &[Integer], p: &Integer) -> u32 {
    let mut f: Vec<Integer> = coeffs.iter().map(|c| md(c, p)).collect();
    while f.last().is_some_and(|c| *c == 0) {
        f.pop();
    }
    if f.len() <= 1 {
        return 0;
    }
    if *p < 2048 {
        let pu = p.to_u32().unwrap();
        return (0..pu)
            .filter(|&x| {
                let x = Integer::from(x);
                let mut acc = Integer::new();
                for c in f.iter().rev() {
                    acc = md(&(acc * &x + c), p);
                }
                acc == 0
            })
            .count() as u32;
    }
    // deg gcd(f, x^p - x) over F_p.
    let lead_inv = inv(f.last().unwrap(), p);
    let f: Vec<Integer> = f.iter().map(|c| md(&Integer::from(c * &lead_inv), p)).collect();
    let xp = polmod::pow_x(p, &f);
    let mut g = xp;
    while g.len() < 2 {
        g.push(Integer::new());
    }
    g[1] = md(&Integer::from(&g[1] - 1u32), p);
    polmod::gcd_degree(f, g, p)
}

mod polmod {
    use rug::Integer;

    fn md(n: Integer, p: &Integer) -> Integer {
        n.modulo(p)
    }

    fn trim(mut a: Vec<Integer>) -> Vec<Integer> {
        while a.last().is_some_and(|c| *c == 0) {
            a.pop();
        }
        a
    }

    /// Remainder of `a` by a monic `m`.
    fn rem(mut a: Vec<Integer>, m: &[Integer], p: &Integer) -> Vec<Integer> {
        let dm = m.len() - 1;
        while a.len() > dm {
            let lead = a.pop().unwrap();
            let shift = a.len() - dm;
            for i in 0..dm {
                let v = std::mem::take(&mut a[shift + i]);
                a[shift + i] = md(v - Integer::from(&lead * &m[i]), p);
            }
        }
        trim(a)
    }

    fn mul(a: &[Integer], b: &[Integer], p: &Integer) -> Vec<Integer> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Integer::new(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += Integer::from(x * y);
            }
        }
        trim(out.into_iter().map(|c| md(c, p)).collect())
    }

    /// `x^p mod m` for monic `m`.
    pub fn pow_x(p: &Integer, m: &[Integer]) -> Vec<Integer> {
        let mut result = rem(vec![Integer::from(1)], m, p);
        let mut base = rem(vec![Integer::new(), Integer::from(1)], m, p);
        let bits = p.significant_bits();
        for i in 0..bits {
            if p.get_bit(i) {
                result = rem(mul(&result, &base, p), m, p);
            }
            base = rem(mul(&base, &base, p), m, p);
        }
        result
    }

    pub fn gcd_degree(a: Vec<Integer>, b: Vec<Integer>, p: &Integer) -> u32 {
        let (mut a, mut b) = (trim(a), trim(b));
        while !b.is_empty() {
            let lead_inv = b.last().unwrap().clone().invert(p).unwrap();
            let monic: Vec<Integer> = b.iter().map(|c| md(Integer::from(c * &lead_inv), p)).collect();
            let r = rem(a, &monic, p);
            a = monic;
            b = r;
        }
        (a.len() - 1) as u32
    }
}

fn splits(coeffs: &[Integer], p: &Integer) -> bool {
    count_roots_mod_p(coeffs, p) > 0
}

/// Tate's algorithm at `p`, scaling the model down whenever it turns out
/// not to be minimal.
pub fn tate(mut w: Weierstrass, p: &Integer) -> LocalReduction {
    let two = Integer::from(2);
    let three = Integer::from(3);
    let zero = Integer::new();
    let mut scalings = 0;
    loop {
        let disc = w.discriminant();
        let n = valuation(&disc, p);
        let done = |kodaira, tamagawa| LocalReduction {
            prime: p.clone(),
            kodaira,
            tamagawa,
            min_disc_valuation: n,
            scalings,
        };
        if n == 0 {
            return done(Kodaira::I0, 1);
        }

        // Move the singular point of the reduction to (0, 0).
        let (r, t) = if *p == two {
            if w.b2().is_even() {
                let r = md(&w.a4, p);
                let t = md(&(Integer::from(&r * (Integer::from(&w.a2 + &w.a4) + 1u32)) + &w.a6), p);
                (r, t)
            } else {
                let r = md(&w.a3, p);
                let t = md(&(Integer::from(&r + &w.a4)), p);
                (r, t)
            }
        } else if *p == three {
            let b2 = w.b2();
            let r = if b2.is_divisible(p) { md(&-w.b6(), p) } else { md(&-(b2 * w.b4()), p) };
            let t = md(&(Integer::from(&w.a1 * &r) + &w.a3), p);
            (r, t)
        } else {
            let c4 = w.c4();
            let r = if c4.is_divisible(p) {
                md(&(-w.b2() * inv(&Integer::from(12), p)), p)
            } else {
                let num = -(w.c6() + w.b2() * &c4);
                md(&(num * inv(&(c4 * 12u32), p)), p)
            };
            let t = md(&(-(Integer::from(&w.a1 * &r) + &w.a3) * inv(&two, p)), p);
            (r, t)
        };
        w.transform(&r, &zero, &t);

        if !w.b2().is_divisible(p) {
            let split = splits(&[-w.a2.clone(), w.a1.clone(), Integer::from(1)], p);
            let c = if split { n } else if n % 2 == 0 { 2 } else { 1 };
            return done(Kodaira::I(n), c);
        }
        if !divisible(&w.a6, p, 2) {
            return done(Kodaira::II, 1);
        }
        if !divisible(&w.b8(), p, 3) {
            return done(Kodaira::III, 2);
        }
        if !divisible(&w.b6(), p, 3) {
            let a3 = Integer::from(&w.a3 / p);
            let a6 = Integer::from(&w.a6 / &pow(p, 2));
            let c = if splits(&[-a6, a3, Integer::from(1)], p) { 3 } else { 1 };
            return done(Kodaira::IV, c);
        }

        // Arrange p | a1, a2; p^2 | a3, a4; p^3 | a6.
        let (s, t) = if *p == two {
            let s = md(&w.a2, p);
            let t = md(&Integer::from(&w.a6 / 4u32), p) * 2u32;
            (s, t)
        } else {
            let s = md(&(-Integer::from(&w.a1 * inv(&two, p))), p);
            let p2 = pow(p, 2);
            let t = md(&(-Integer::from(&w.a3 * inv(&two, &p2))), &p2);
            (s, t)
        };
        w.transform(&zero, &s, &t);

        let b = Integer::from(&w.a2 / p);
        let c = Integer::from(&w.a4 / &pow(p, 2));
        let d = Integer::from(&w.a6 / &pow(p, 3));
        let b2 = Integer::from(b.square_ref());
        let b3 = Integer::from(&b2 * &b);
        let c2 = Integer::from(c.square_ref());
        let c3 = Integer::from(&c2 * &c);
        let wdisc = Integer::from(&b3 * &d) * 4u32 - Integer::from(&b2 * &c2) + c3 * 4u32
            - Integer::from(&b * &c) * &d * 18u32
            + Integer::from(d.square_ref()) * 27u32;
        let x = Integer::from(&c * 3u32) - &b2;

        if !wdisc.is_divisible(p) {
            let roots = count_roots_mod_p(&[d.clone(), c.clone(), b.clone(), Integer::from(1)], p);
            return done(Kodaira::I0Star, 1 + roots);
        }

        if !x.is_divisible(p) {
            // Double root: move it to 0 and run the I_m* subprocedure.
            let root = if *p == two {
                md(&c, p)
            } else if *p == three {
                md(&Integer::from(&b * &c), p)
            } else {
                let num = Integer::from(&b * &c) - Integer::from(&d * 9u32);
                md(&(num * inv(&(Integer::from(&x * 2u32)), p)), p)
            };
            w.transform(&Integer::from(p * &root), &zero, &zero);
            let mut m = 1u32;
            let mut mx = pow(p, 2);
            let mut my = pow(p, 2);
            let cp = loop {
                let xa3 = Integer::from(&w.a3 / &my);
                let xa6 = Integer::from(&w.a6 / Integer::from(&mx * &my));
                let disc_y = Integer::from(xa3.square_ref()) + Integer::from(&xa6 * 4u32);
                if !disc_y.is_divisible(p) {
                    break if splits(&[-xa6, xa3, Integer::from(1)], p) { 4 } else { 2 };
                }
                let ty = if *p == two { md(&xa6, p) } else { md(&(-xa3 * inv(&two, p)), p) };
                w.transform(&zero, &zero, &Integer::from(&my * &ty));
                my *= p;
                m += 1;

                let xa2 = Integer::from(&w.a2 / p);
                let xa4 = Integer::from(&w.a4 / Integer::from(p * &mx));
                let xa6 = Integer::from(&w.a6 / Integer::from(&mx * &my));
                let disc_x = Integer::from(xa4.square_ref()) - Integer::from(&xa2 * &xa6) * 4u32;
                if !disc_x.is_divisible(p) {
                    break if splits(&[xa6, xa4, xa2], p) { 4 } else { 2 };
                }
                let rx = if *p == two {
                    md(&Integer::from(&xa6 * &xa2), p)
                } else {
                    md(&(-xa4 * inv(&(xa2 * 2u32), p)), p)
                };
                w.transform(&Integer::from(&mx * &rx), &zero, &zero);
                mx *= p;
                m += 1;
            };
            return done(Kodaira::IStar(m), cp);
        }

        // Triple root: move it to 0.
        let root = if *p == two {
            md(&b, p)
        } else if *p == three {
            md(&-d, p)
        } else {
            md(&(-b * inv(&three, p)), p)
        };
        w.transform(&Integer::from(p * &root), &zero, &zero);
        let p2 = pow(p, 2);
        let x3 = Integer::from(&w.a3 / &p2);
        let x6 = Integer::from(&w.a6 / &pow(p, 4));
        let disc_y = Integer::from(x3.square_ref()) + Integer::from(&x6 * 4u32);
        if !disc_y.is_divisible(p) {
            let c = if splits(&[-x6, x3, Integer::from(1)], p) { 3 } else { 1 };
            return done(Kodaira::IVStar, c);
        }
        let ty = if *p == two { md(&x6, p) } else { md(&(-x3 * inv(&two, p)), p) };
        w.transform(&zero, &zero, &Integer::from(&p2 * &ty));
        if !divisible(&w.a4, p, 4) {
            return done(Kodaira::IIIStar, 2);
        }
        if !divisible(&w.a6, p, 6) {
            return done(Kodaira::IIStar, 1);
        }
        w.scale_down(p);
        scalings += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn local(a4: i64, a6: i64, p: u32) -> LocalReduction {
        local_reduction(&Curve::new(a4, a6).unwrap(), &Integer::from(p))
    }

    fn general(a: [i64; 5], p: u32) -> LocalReduction {
        tate(Weierstrass::new(a), &Integer::from(p))
    }

    #[test]
    fn discriminant_of_general_model() {
        assert_eq!(Weierstrass::new([0, -1, 1, -10, -20]).discriminant(), -161051);
        assert_eq!(Weierstrass::new([0, 0, 1, -1, 0]).discriminant(), 37);
        assert_eq!(Weierstrass::new([0, 0, 0, -3, -4]).discriminant(), -5184);
    }

    #[test]
    fn transform_preserves_discriminant() {
        let mut w = Weierstrass::new([1, -1, 1, -10, -20]);
        let d = w.discriminant();
        w.transform(&Integer::from(3), &Integer::from(-2), &Integer::from(5));
        assert_eq!(w.discriminant(), d);
    }

    #[test]
    fn small_conductor_curves() {
        let r = general([0, -1, 1, -10, -20], 11);
        assert_eq!((r.kodaira, r.tamagawa), (Kodaira::I(5), 5));
        let r = general([0, 0, 1, -1, 0], 37);
        assert_eq!((r.kodaira, r.tamagawa), (Kodaira::I(1), 1));
    }

    #[test]
    fn short_models() {
        let r = local(-1, 0, 2);
        assert_eq!((r.kodaira, r.tamagawa), (Kodaira::III, 2));
        let r = local(0, 1, 2);
        assert_eq!((r.kodaira, r.tamagawa), (Kodaira::IV, 3));
        let r = local(0, 1, 3);
        assert_eq!((r.kodaira, r.tamagawa), (Kodaira::III, 2));
        for p in [2, 3] {
            let r = local(-3, -4, p);
            assert_eq!(r.tamagawa, 1, "p={p}: {:?}", r);
        }
    }

    #[test]
    fn non_minimal_short_model_scales_down() {
        // Short model of the curve of conductor 11.
        let e = Curve::new(-13392, -1080432).unwrap();
        let r11 = local_reduction(&e, &Integer::from(11));
        assert_eq!((r11.kodaira, r11.tamagawa), (Kodaira::I(5), 5));
        for p in [2, 3] {
            let r = local_reduction(&e, &Integer::from(p));
            assert_eq!((r.kodaira, r.tamagawa, r.min_disc_valuation), (Kodaira::I0, 1, 0));
            assert!(r.scalings >= 1);
        }
        let e37 = Curve::new(-16, 16).unwrap();
        let r = local_reduction(&e37, &Integer::from(37));
        assert_eq!(r.tamagawa, 1);
    }

    #[test]
    fn tamagawa_data_covers_discriminant() {
        let e = Curve::new(-3, -4).unwrap();
        let t = tamagawa_numbers(&e).unwrap();
        assert_eq!(t.primes(), vec![Integer::from(2), Integer::from(3)]);
        assert!(t.all_one());
        assert!(t.covers(&e.discriminant()).is_ok());
        let partial = TamagawaData::from_overrides(&[(Integer::from(2), 1)]).unwrap();
        assert_eq!(partial.covers(&e.discriminant()), Err(Integer::from(81)));
    }

    #[test]
    fn root_counting_mod_p() {
        let p = Integer::from(1_000_003u64);
        // x^2 + 1 splits mod p iff p = 1 mod 4; 1000003 = 3 mod 4.
        assert_eq!(count_roots_mod_p(&[Integer::from(1), Integer::new(), Integer::from(1)], &p), 0);
        assert_eq!(count_roots_mod_p(&[Integer::from(-4), Integer::new(), Integer::from(1)], &p), 2);
        let q = Integer::from(7u32);
        assert_eq!(count_roots_mod_p(&[Integer::from(-1), Integer::new(), Integer::new(), Integer::from(1)], &q), 3);
    }
}
