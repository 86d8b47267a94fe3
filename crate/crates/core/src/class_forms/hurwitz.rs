use std::collections::HashMap;
use std::f64::consts::PI;

use rug::Rational;

use super::forms::{enumerate_reduced, Discriminant};
use super::FormError;
use crate::arith::{crt_combine, divisors, isqrt, jacobi, kronecker, mobius, sigma1, sqrt_mod_prime_power, FactorSieve};

/// Hurwitz class number `H(-D)`: reduced forms of discriminant `-D`, each
/// weighted by `1/|Aut|` relative to `{+-1}`.
pub fn hurwitz_h(d: Discriminant) -> Rational {
    Rational::from((weighted_count_sixths(d.value()), 6u32))
}

/// The same weighted count, read directly off `enumerate_reduced`.
pub fn hurwitz_by_enumeration(d: Discriminant) -> Rational {
    let sixths: u64 = enumerate_reduced(d).iter().map(|f| f.weight_sixths()).sum();
    Rational::from((sixths, 6u32))
}

/// `H(-D)` through Hecke's multiplicative formula over the fundamental part.
pub fn hurwitz_via_hecke(d: Discriminant) -> Rational {
    let (d0, f) = d.fundamental_decomposition();
    let h0 = enumerate_reduced(Discriminant::new(d0).expect("fundamental part is a discriminant")).len() as i64;
    let omega: i64 = match d0 {
        3 => 3,
        4 => 2,
        _ => 1,
    };
    let sum: i64 = divisors(f)
        .into_iter()
        .map(|e| {
            let chi = kronecker(-(d0 as i64), e as i64) as i64;
            mobius(e) as i64 * chi * sigma1(f / e) as i64
        })
        .sum();
    Rational::from((h0 * sum, omega))
}

/// Upper bound `sqrt(D) (log D + 2) / pi`, nudged up past rounding error.
pub fn hurwitz_upper_bound(d: Discriminant) -> f64 {
    let x = d.value() as f64;
    let v = x.sqrt() * (x.ln() + 2.0) / PI;
    v * (1.0 + 16.0 * f64::EPSILON)
}

/// Kronecker character of the fundamental discriminant `-D0`.
pub fn kronecker_chi(d0: Discriminant, n: i64) -> Result<i8, FormError> {
    if !d0.is_fundamental() {
        return Err(FormError::NotFundamental(d0.value()));
    }
    Ok(kronecker(-(d0.value() as i64), n))
}

/// Largest `D` accepted by the counting routine (keeps the sieve near 2e6).
pub const MAX_COUNT_D: u64 = 12_000_000_000_000;

/// Weighted number of reduced forms of discriminant `-n`, in sixths.
///
/// Forms are grouped by `a`. When `4a^2 <= n` every residue `b` mod `2a` with
/// `b^2 = -n (mod 4a)` gives a reduced form with `c >= a`, so only the number
/// of square roots of `-n` modulo `4a` matters, and that count is
/// multiplicative. The thin band `sqrt(n)/2 < a <= sqrt(n/3)` is enumerated.
pub fn weighted_count_sixths(n: u64) -> u64 {
    let l = isqrt(n / 3);
    if l == 0 {
        return 0;
    }
    let sieve = FactorSieve::new(l);
    let bulk = isqrt(n / 4);
    // Root counts modulo the odd part of a, filled multiplicatively.
    let mut odd_roots = vec![0u64; l as usize + 1];
    let mut legendre = vec![0i8; l as usize + 1];
    let mut roots_cache: HashMap<(u64, u32), Vec<u64>> = HashMap::new();
    let mut total = 0u64;
    for a in 1..=l {
        let ai = a as usize;
        if a == 1 {
            odd_roots[1] = 1;
        } else {
            let p = sieve.smallest_factor(a) as usize;
            let (mut m, mut k) = (ai, 0u32);
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            odd_roots[ai] = if p == 2 {
                odd_roots[m]
            } else if odd_roots[m] == 0 {
                0
            } else {
                odd_roots[m] * odd_root_count(p as u64, k, n, &mut legendre[p])
            };
        }
        let count = odd_roots[ai] * two_adic_root_count(a.trailing_zeros() + 2, n);
        if count == 0 {
            continue;
        }
        if a <= bulk {
            // Roots come in pairs b, b + 2a modulo 4a.
            total += 3 * count;
        } else {
            total += band_sixths(a, n, &sieve.factor(a), &mut roots_cache);
        }
    }
    if 4 * bulk as u128 * bulk as u128 == n as u128 {
        total -= 3;
    }
    total
}

fn valuation_capped(n: u64, p: u64, cap: u32) -> (u32, u64) {
    let mut n = n;
    let mut e = 0;
    while e < cap && n % p == 0 {
        n /= p;
        e += 1;
    }
    (e, n)
}

/// Number of `x mod p^k` with `x^2 = -n`; `cached` holds `(-n / p)` once known.
fn odd_root_count(p: u64, k: u32, n: u64, cached: &mut i8) -> u64 {
    let (e, unit) = valuation_capped(n, p, k);
    if e >= k {
        return p.pow(k / 2);
    }
    if e % 2 == 1 {
        return 0;
    }
    let symbol = if e == 0 {
        if *cached == 0 {
            *cached = jacobi(-((n % p) as i64), p);
        }
        *cached
    } else {
        jacobi(-((unit % p) as i64), p)
    };
    if symbol == 1 {
        2 * p.pow(e / 2)
    } else {
        0
    }
}

/// Number of `x mod 2^k` with `x^2 = -n`.
fn two_adic_root_count(k: u32, n: u64) -> u64 {
    let (e, unit) = valuation_capped(n, 2, k);
    if e >= k {
        return 1 << (k / 2);
    }
    if e % 2 == 1 {
        return 0;
    }
    let target = (8 - unit % 8) % 8;
    let sols = match k - e {
        1 => 1,
        2 => {
            if target % 4 == 1 {
                2
            } else {
                0
            }
        }
        _ => {
            if target == 1 {
                4
            } else {
                0
            }
        }
    };
    sols << (e / 2)
}

/// Weighted reduced forms with leading coefficient `a` in the band where
/// `c >= a` is not automatic.
fn band_sixths(a: u64, n: u64, factors: &[(u64, u32)], cache: &mut HashMap<(u64, u32), Vec<u64>>) -> u64 {
    let m = 4 * a;
    let mut residues = vec![0u64];
    let mut modulus = 1u64;
    let two_k = a.trailing_zeros() + 2;
    let mut parts: Vec<(u64, u32)> = vec![(2, two_k)];
    parts.extend(factors.iter().copied().filter(|&(p, _)| p != 2));
    for (p, k) in parts {
        let pk = p.pow(k);
        let roots = cache
            .entry((p, k))
            .or_insert_with(|| sqrt_mod_prime_power((pk - n % pk) % pk, p, k))
            .clone();
        if roots.is_empty() {
            return 0;
        }
        residues = crt_combine(&residues, modulus, &roots, pk);
        modulus *= pk;
    }
    debug_assert_eq!(modulus, m);
    let two_a = 2 * a;
    let mut bs: Vec<i64> = residues
        .into_iter()
        .map(|x| {
            let b = x % two_a;
            if b > a {
                b as i64 - two_a as i64
            } else {
                b as i64
            }
        })
        .collect();
    bs.sort_unstable();
    bs.dedup();
    let mut sixths = 0;
    for b in bs {
        let c = ((b as i128 * b as i128 + n as i128) / m as i128) as u64;
        if c < a || (c == a && b < 0) {
            continue;
        }
        sixths += if c == a && b == 0 {
            3
        } else if c == a && b == a as i64 {
            2
        } else {
            6
        };
    }
    sixths
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: u64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    fn brute_sixths(n: u64) -> u64 {
        // Every (a, b, c) with |b| <= a <= c, b^2 + n = 4ac and the sign rule.
        let mut total = 0;
        let mut a = 1u64;
        while 3 * a * a <= n {
            for b in -(a as i64)..=(a as i64) {
                let num = b * b + n as i64;
                if num % (4 * a as i64) != 0 {
                    continue;
                }
                let c = (num / (4 * a as i64)) as u64;
                if c < a || ((b.unsigned_abs() == a || a == c) && b < 0) {
                    continue;
                }
                total += if a == c && b == 0 {
                    3
                } else if a == c && b == a as i64 {
                    2
                } else {
                    6
                };
            }
            a += 1;
        }
        total
    }

    #[test]
    fn small_values() {
        assert_eq!(hurwitz_h(disc(88)), 2);
        assert_eq!(hurwitz_h(disc(3)), Rational::from((1, 3)));
        assert_eq!(hurwitz_h(disc(4)), Rational::from((1, 2)));
        assert_eq!(hurwitz_h(disc(12)), Rational::from((4, 3)));
        assert_eq!(hurwitz_h(disc(7)), 1);
        assert_eq!(hurwitz_h(disc(23)), 3);
    }

    #[test]
    fn counting_matches_brute_force() {
        for n in 3..6000u64 {
            if n % 4 == 1 || n % 4 == 2 {
                continue;
            }
            assert_eq!(weighted_count_sixths(n), brute_sixths(n), "D={n}");
        }
    }

    #[test]
    fn counting_matches_brute_force_on_spread_values() {
        let mut n = 100_003u64;
        while n < 3_000_000 {
            let m = n - n % 4 + 3;
            assert_eq!(weighted_count_sixths(m), brute_sixths(m), "D={m}");
            assert_eq!(weighted_count_sixths(m + 1), brute_sixths(m + 1), "D={}", m + 1);
            n = n * 13 / 10;
        }
        // Highly divisible values stress the prime-power cases.
        for m in [2u64.pow(20), 3 * 2u64.pow(18), 4 * 3u64.pow(10), 720_720 * 4, 4 * 9 * 25 * 49 * 11] {
            assert_eq!(weighted_count_sixths(m), brute_sixths(m), "D={m}");
        }
    }

    #[test]
    fn hecke_examples() {
        assert_eq!(hurwitz_via_hecke(disc(12)), Rational::from((4, 3)));
        assert_eq!(hurwitz_via_hecke(disc(88)), 2);
        assert_eq!(hurwitz_via_hecke(disc(4)), Rational::from((1, 2)));
    }

    #[test]
    fn upper_bound_examples() {
        assert!((hurwitz_upper_bound(disc(88)) - 19.34).abs() < 0.01);
        assert!((hurwitz_upper_bound(disc(3)) - 1.71).abs() < 0.01);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(kronecker_chi(disc(3), 2).unwrap(), -1);
        assert_eq!(kronecker_chi(disc(4), 3).unwrap(), -1);
        assert_eq!(kronecker_chi(disc(4), 2).unwrap(), 0);
        assert!(kronecker_chi(disc(12), 5).is_err());
    }
}
