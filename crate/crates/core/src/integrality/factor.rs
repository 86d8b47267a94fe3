use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use rug::Integer;

use super::IntegralityError;
use crate::arith::primes_up_to;

/// Signed prime factorization; the empty list stands for `1` or `-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    negative: bool,
    factors: Vec<(Integer, u32)>,
}

impl Factorization {
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn factors(&self) -> &[(Integer, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &Integer> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn product(&self) -> Integer {
        let mut acc = Integer::from(if self.negative { -1 } else { 1 });
        for (p, k) in &self.factors {
            for _ in 0..*k {
                acc *= p;
            }
        }
        acc
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.negative {
            parts.push("-1".into());
        }
        for (p, k) in &self.factors {
            parts.push(if *k == 1 { p.to_string() } else { format!("{p}^{k}") });
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorConfig {
    /// Trial division covers primes up to this bound.
    pub trial_bound: u32,
    /// Total Pollard rho iterations allowed per composite cofactor.
    pub rho_iterations: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig { trial_bound: 1_000_000, rho_iterations: 1 << 24 }
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(FactorConfig::default().trial_bound))
}

pub fn factorize(n: &Integer) -> Result<Factorization, IntegralityError> {
    factorize_with(n, &FactorConfig::default())
}

pub fn factorize_with(n: &Integer, config: &FactorConfig) -> Result<Factorization, IntegralityError> {
    if *n == 0 {
        return Err(IntegralityError::ZeroInput);
    }
    let negative = n.cmp0() == Ordering::Less;
    let mut m = Integer::from(n.abs_ref());
    let mut factors: Vec<(Integer, u32)> = Vec::new();

    let primes = small_primes();
    let bound = config.trial_bound.min(*primes.last().unwrap());
    for &p in primes.iter().take_while(|&&p| p <= bound) {
        if Integer::from(p) * p > m {
            break;
        }
        if m.is_divisible_u(p) {
            let mut k = 0;
            while m.is_divisible_u(p) {
                m.div_exact_u_mut(p);
                k += 1;
            }
            factors.push((Integer::from(p), k));
        }
    }
    if m > 1 {
        let covered = Integer::from(bound) * bound;
        if m < covered {
            factors.push((m, 1));
        } else {
            let mut large = Vec::new();
            split_large(m, config, &mut large)?;
            large.sort();
            for p in large {
                match factors.last_mut() {
                    Some((q, k)) if *q == p => *k += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    Ok(Factorization { negative, factors })
}

fn split_large(m: Integer, config: &FactorConfig, out: &mut Vec<Integer>) -> Result<(), IntegralityError> {
    if m == 1 {
        return Ok(());
    }
    if is_prime(&m)? {
        out.push(m);
        return Ok(());
    }
    if m.is_perfect_square() {
        let r = m.sqrt();
        split_large(r.clone(), config, out)?;
        split_large(r, config, out)?;
        return Ok(());
    }
    let d = pollard_brent(&m, config.rho_iterations).ok_or_else(|| IntegralityError::EffortExceeded(m.to_string()))?;
    let cofactor = Integer::from(&m / &d);
    split_large(d, config, out)?;
    split_large(cofactor, config, out)
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of the odd
/// composite `n`, or `None` once the iteration budget is spent.
fn pollard_brent(n: &Integer, budget: u64) -> Option<Integer> {
    let mut spent = 0u64;
    for c in 1u32.. {
        let f = |x: &Integer| -> Integer { (Integer::from(x.square_ref()) + c) % n };
        let mut y = Integer::from(2);
        let mut r = 1u64;
        let mut q = Integer::from(1);
        let mut g = Integer::from(1);
        let mut x = y.clone();
        let mut ys = y.clone();
        const BATCH: u64 = 128;
        while g == 1 {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    q = (q * Integer::from(&x - &y).abs()) % n;
                }
                g = Integer::from(q.gcd_ref(n));
                k += BATCH;
            }
            spent += r;
            r *= 2;
            if spent > budget {
                return None;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = Integer::from(Integer::from(&x - &ys).abs().gcd_ref(n));
                if g > 1 {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
        if c > 64 {
            return None;
        }
    }
    None
}

/// Miller–Rabin with the first thirteen prime bases is deterministic below
/// this bound.
fn deterministic_limit() -> &'static Integer {
    static LIMIT: OnceLock<Integer> = OnceLock::new();
    LIMIT.get_or_init(|| Integer::from_str_radix("3317044064679887385961981", 10).unwrap())
}

/// Certified primality for inputs below about 3.3e24. Larger probable primes
/// are reported as uncertified rather than guessed.
pub fn is_prime(n: &Integer) -> Result<bool, IntegralityError> {
    if *n < 2 {
        return Ok(false);
    }
    const BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &p in &BASES {
        if *n == p {
            return Ok(true);
        }
        if n.is_divisible_u(p) {
            return Ok(false);
        }
    }
    let n_minus_1 = Integer::from(n - 1u32);
    let s = n_minus_1.find_one(0).unwrap();
    let d = Integer::from(&n_minus_1 >> s);
    'bases: for &a in &BASES {
        let mut x = Integer::from(a).pow_mod(&d, n).unwrap();
        if x == 1 || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.square() % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return Ok(false);
    }
    if n >= deterministic_limit() {
        return Err(IntegralityError::Uncertified(n.to_string()));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: i64) -> Vec<(i64, u32)> {
        factorize(&Integer::from(n))
            .unwrap()
            .factors()
            .iter()
            .map(|(p, k)| (p.to_i64().unwrap(), *k))
            .collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(fac(5184), vec![(2, 6), (3, 4)]);
        let f = factorize(&Integer::from(-88)).unwrap();
        assert!(f.is_negative());
        assert_eq!(fac(-88), vec![(2, 3), (11, 1)]);
        assert!(factorize(&Integer::from(1)).unwrap().factors().is_empty());
        assert!(factorize(&Integer::new()).is_err());
    }

    #[test]
    fn semiprime_beyond_trial_division() {
        let p = Integer::from(1_000_003u64);
        let q = Integer::from(998_244_353u64);
        let n = Integer::from(&p * &q) * &q;
        let f = factorize(&n).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 2)]);
        assert_eq!(f.product(), n);
    }

    #[test]
    fn large_prime_product() {
        let p = Integer::from(1_000_000_007u64);
        let q = Integer::from(2_305_843_009_213_693_951u64);
        assert!(is_prime(&p).unwrap() && is_prime(&q).unwrap());
        let n = Integer::from(&p * &q);
        assert_eq!(factorize(&n).unwrap().factors(), &[(p, 1), (q, 1)]);
    }

    #[test]
    fn primality() {
        assert!(!is_prime(&Integer::from(1)).unwrap());
        assert!(is_prime(&Integer::from(2)).unwrap());
        assert!(!is_prime(&Integer::from(3215031751u64)).unwrap());
        assert!(is_prime(&Integer::from(2147483647u64)).unwrap());
        let big = (Integer::from(1) << 127) - 1u32;
        assert!(matches!(is_prime(&big), Err(IntegralityError::Uncertified(_))));
    }

    #[test]
    fn display() {
        assert_eq!(factorize(&Integer::from(-88)).unwrap().to_string(), "-1 * 2^3 * 11");
    }
}
