//! Machine-word number theory: square roots, symbols and sieves used by the
//! class-number counter and by Tate's algorithm.

/// Floor of the square root of `n`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while (r as u128) * (r as u128) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128) * ((r + 1) as u128) <= n as u128 {
        r += 1;
    }
    r
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Jacobi symbol (a/n) for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol (a/n) with the usual conventions at n = 0, n = -1 and n = 2.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    if n < 0 && a < 0 {
        result = -result;
    }
    let mut m = n.unsigned_abs();
    let twos = m.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        m >>= twos;
        let r = a.rem_euclid(8);
        if (r == 3 || r == 5) && twos % 2 == 1 {
            result = -result;
        }
    }
    result * jacobi(a, m)
}

/// A square root of `a` modulo the odd prime `p` (Tonelli–Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// All residues `x mod p^k` with `x^2 = t (mod p^k)`, sorted.
pub fn sqrt_mod_prime_power(t: u64, p: u64, k: u32) -> Vec<u64> {
    let modulus = p.pow(k);
    let t = t % modulus;
    let mut roots: Vec<u64> = if p == 2 {
        vec![t & 1]
    } else {
        match sqrt_mod_prime(t % p, p) {
            None => return Vec::new(),
            Some(0) => vec![0],
            Some(r) => vec![r.min(p - r), r.max(p - r)],
        }
    };
    let mut pj = p;
    for _ in 1..k {
        let next = pj * p;
        let target = t % next;
        let mut lifted = Vec::new();
        if p != 2 && t % p != 0 {
            // Hensel: exactly one lift per root.
            for &r in &roots {
                let sq = mul_mod(r, r, next);
                let diff = (sq + next - target) % next;
                let e = (diff / pj) % p;
                let inv = inv_mod(mul_mod(2, r, p), p).expect("unit root");
                let i = (p - mul_mod(e, inv, p)) % p;
                lifted.push(r + i * pj);
            }
        } else {
            for &r in &roots {
                for i in 0..p {
                    let c = r + i * pj;
                    if mul_mod(c, c, next) == target {
                        lifted.push(c);
                    }
                }
            }
        }
        roots = lifted;
        pj = next;
        if roots.is_empty() {
            break;
        }
    }
    roots.sort_unstable();
    roots
}

/// Combine residue sets modulo coprime moduli into residues modulo their product.
pub fn crt_combine(r1: &[u64], m1: u64, r2: &[u64], m2: u64) -> Vec<u64> {
    let inv = inv_mod(m1 % m2, m2).expect("coprime moduli");
    let m = m1 as u128 * m2 as u128;
    let mut out = Vec::with_capacity(r1.len() * r2.len());
    for &a in r1 {
        for &b in r2 {
            let delta = (b as i128 - a as i128).rem_euclid(m2 as i128) as u64;
            let k = mul_mod(delta, inv, m2);
            let x = (a as u128 + m1 as u128 * k as u128) % m;
            out.push(x as u64);
        }
    }
    out
}

/// Smallest-prime-factor table.
pub struct FactorSieve {
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize + 1;
        let mut spf = vec![0u32; n.max(2)];
        for i in 2..n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i * i;
                while j < n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        FactorSieve { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn smallest_factor(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    /// Prime factorization as `(p, k)` pairs with increasing `p`.
    pub fn factor(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(n <= self.limit(), "sieve too small for {n}");
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        out
    }
}

/// Primes up to `limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u32) -> Vec<u32> {
    let n = limit as usize + 1;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for i in 2..n {
        if !composite[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Factorization of a machine word by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    factor_u64(n).iter().all(|&(_, k)| k == 1)
}

pub fn mobius(n: u64) -> i8 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn sigma1(n: u64) -> u64 {
    factor_u64(n)
        .iter()
        .map(|&(p, k)| (p.pow(k + 1) - 1) / (p - 1))
        .product()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, k) in factor_u64(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), 4294967295);
    }

    #[test]
    fn kronecker_matches_small_table() {
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(5, -1), 1);
        assert_eq!(kronecker(-5, -1), -1);
        assert_eq!(kronecker(-8, 3), 1);
    }

    #[test]
    fn jacobi_agrees_with_euler_criterion() {
        for p in primes_up_to(200).into_iter().skip(1) {
            let p = p as u64;
            for a in 0..p {
                let euler = pow_mod(a, (p - 1) / 2, p);
                let expected = match euler {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(jacobi(a as i64, p), expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn prime_power_square_roots_match_brute_force() {
        for (p, k) in [(2u64, 1u32), (2, 2), (2, 3), (2, 5), (3, 1), (3, 3), (5, 2), (7, 2), (13, 1)] {
            let m = p.pow(k);
            for t in 0..m {
                let brute: Vec<u64> = (0..m).filter(|x| x * x % m == t).collect();
                assert_eq!(sqrt_mod_prime_power(t, p, k), brute, "t={t} mod {p}^{k}");
            }
        }
    }

    #[test]
    fn crt_recovers_residues() {
        let r = crt_combine(&[1, 3], 4, &[2], 9);
        let mut r = r;
        r.sort();
        assert_eq!(r, vec![11, 29]);
    }

    #[test]
    fn sieve_factors() {
        let s = FactorSieve::new(1000);
        assert_eq!(s.factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(s.factor(997), vec![(997, 1)]);
        assert_eq!(s.factor(1), vec![]);
    }

    #[test]
    fn multiplicative_helpers() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        assert_eq!(sigma1(12), 28);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }
}
