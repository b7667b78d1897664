//! Elementary number theory on machine integers.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::intpoly::{IntPoly, Var};
use crate::error::{invalid, Result};

/// Möbius function. Rejects `k = 0`.
pub fn mobius(k: u64) -> Result<i32> {
    if k == 0 {
        return invalid("mobius(0) is undefined");
    }
    let mut k = k;
    let mut sign = 1;
    let mut p = 2u64;
    while p * p <= k {
        if k % p == 0 {
            k /= p;
            if k % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if k > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Distinct prime factors of a machine integer, increasing.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    let mut r = n;
    for p in prime_factors_u64(n) {
        r = r / p * (p - 1);
    }
    r
}

/// `nu(n) = sum_{d | n} mu(n/d) m^d`, the x-degree of `Phi_n` for `x^m + c`.
pub fn nu(n: u64, m: u64) -> u64 {
    let mut total: i128 = 0;
    for d in divisors(n) {
        let mu = mobius(n / d).expect("n >= 1") as i128;
        total += mu * (m as i128).pow(d as u32);
    }
    total as u64
}

/// `v_p(n)` for machine integers.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Inverse of `a` modulo `m` when it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Multiplicative order of `a` modulo `m` (requires `gcd(a, m) = 1`).
pub fn mult_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, a, m);
        k += 1;
    }
    k
}

/// All primes `<= n` by a plain sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Segmented sieve: calls `f(p)` for every prime `p` with `lo <= p <= hi` in
/// increasing order, stopping early when `f` returns `false`.
pub fn for_each_prime(lo: u64, hi: u64, mut f: impl FnMut(u64) -> bool) {
    if hi < 2 || lo > hi {
        return;
    }
    let root = (hi as f64).sqrt() as u64 + 2;
    let base = primes_up_to(root);
    const SEG: u64 = 1 << 18;
    let mut start = lo.max(2);
    let mut mark = vec![false; SEG as usize];
    while start <= hi {
        let end = (start + SEG - 1).min(hi);
        let len = (end - start + 1) as usize;
        mark[..len].iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut j = (start.div_ceil(p) * p).max(p * p);
            while j <= end {
                mark[(j - start) as usize] = true;
                j += p;
            }
        }
        for (i, &m) in mark[..len].iter().enumerate() {
            if !m && !f(start + i as u64) {
                return;
            }
        }
        if end == u64::MAX {
            break;
        }
        start = end + 1;
    }
}

/// The cyclotomic polynomial `C_k(x)`, via the Möbius product
/// `prod_{d | k} (x^d - 1)^{mu(k/d)}` with exact divisions.
pub fn cyclotomic(k: u64) -> Result<IntPoly> {
    if k == 0 {
        return invalid("cyclotomic(0) is undefined");
    }
    let mut num = IntPoly::constant(Var::X, BigInt::one());
    let mut den = IntPoly::constant(Var::X, BigInt::one());
    for d in divisors(k) {
        let mut c = vec![BigInt::from(0); d as usize + 1];
        c[0] = BigInt::from(-1);
        c[d as usize] = BigInt::one();
        let f = IntPoly::new(Var::X, c);
        match mobius(k / d)? {
            1 => num = num.mul(&f),
            -1 => den = den.mul(&f),
            _ => {}
        }
    }
    num.div_exact(&den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_small() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn nu_values() {
        assert_eq!(nu(1, 2), 2);
        assert_eq!(nu(5, 2), 30);
        assert_eq!(nu(6, 2), 54);
        assert_eq!(nu(11, 2), 2046);
        assert_eq!(nu(4, 2), 12);
    }

    #[test]
    fn segmented_sieve_matches_plain() {
        let mut got = Vec::new();
        for_each_prime(1_000, 300_000, |p| {
            got.push(p);
            true
        });
        let want: Vec<u64> = primes_up_to(300_000).into_iter().filter(|&p| p >= 1000).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let ps = primes_up_to(20_000);
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), ps.binary_search(&n).is_ok(), "{n}");
        }
        assert!(is_prime_u64(4_611_686_018_427_387_847));
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1).unwrap().to_i64_vec(), vec![-1, 1]);
        assert_eq!(cyclotomic(2).unwrap().to_i64_vec(), vec![1, 1]);
        assert_eq!(cyclotomic(6).unwrap().to_i64_vec(), vec![1, -1, 1]);
        assert_eq!(cyclotomic(12).unwrap().to_i64_vec(), vec![1, 0, -1, 0, 1]);
    }
}
