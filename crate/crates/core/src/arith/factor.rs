//! Integer factorisation: trial division, perfect powers, Miller-Rabin and a
//! bounded Pollard-Brent rho.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Number, Value};

use crate::arith::ntheory::for_each_prime;
use crate::error::{invalid, Error, Result};

/// `sign * prod p^e * cofactor`. The cofactor is 1 when the factorisation is
/// complete; otherwise it has no prime factor up to `trial_bound` and is
/// composite (or was not examined further).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTable {
    pub sign: i8,
    pub factors: Vec<(BigUint, u32)>,
    pub cofactor: BigUint,
    pub trial_bound: BigUint,
}

/// Knobs for [`factor_integer_with`].
#[derive(Clone, Debug)]
pub struct FactorOptions {
    pub trial_bound: u64,
    /// Pollard-Brent iterations per composite; 0 disables rho.
    pub rho_iterations: u64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions { trial_bound: 10_000_000, rho_iterations: 200_000 }
    }
}

impl FactorTable {
    /// The table of the unit `1`.
    pub fn unit() -> Self {
        FactorTable { sign: 1, factors: Vec::new(), cofactor: BigUint::one(), trial_bound: BigUint::zero() }
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.cofactor.clone());
        for (p, e) in &self.factors {
            v *= BigInt::from(p.pow(*e));
        }
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    /// Exponent of `p` (0 if absent). Only meaningful for listed primes or
    /// primes up to the trial bound.
    pub fn valuation(&self, p: &BigUint) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn valuation_u64(&self, p: u64) -> u32 {
        self.valuation(&BigUint::from(p))
    }

    pub fn primes(&self) -> Vec<BigUint> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }

    /// Same primes and exponents (sign and trial bound ignored).
    pub fn same_factors(&self, other: &FactorTable) -> bool {
        self.factors == other.factors && self.cofactor == other.cofactor
    }

    /// Product of two tables (merging exponents).
    pub fn mul(&self, o: &FactorTable) -> FactorTable {
        let mut factors = self.factors.clone();
        for (p, e) in &o.factors {
            match factors.iter_mut().find(|(q, _)| q == p) {
                Some(slot) => slot.1 += e,
                None => factors.push((p.clone(), *e)),
            }
        }
        factors.sort();
        FactorTable {
            sign: self.sign * o.sign,
            factors,
            cofactor: &self.cofactor * &o.cofactor,
            trial_bound: self.trial_bound.clone().min(o.trial_bound.clone()),
        }
    }

    /// Build from `(p, e)` pairs of small primes; used for fixtures.
    pub fn from_pairs(pairs: &[(u64, u32)]) -> Self {
        let mut factors: Vec<(BigUint, u32)> = pairs.iter().map(|&(p, e)| (BigUint::from(p), e)).collect();
        factors.sort();
        FactorTable { sign: 1, factors, cofactor: BigUint::one(), trial_bound: BigUint::zero() }
    }

    pub fn to_json(&self) -> Value {
        let num = |v: &BigUint| Value::Number(big_number(v));
        json!({
            "sign": self.sign,
            "factors": self.factors.iter().map(|(p, e)| json!([num(p), e])).collect::<Vec<_>>(),
            "cofactor": num(&self.cofactor),
            "trial_bound": num(&self.trial_bound),
        })
    }

    pub fn from_json(v: &Value) -> Result<FactorTable> {
        let bad = || Error::Parse("malformed factor table".into());
        let big = |v: &Value| -> Result<BigUint> {
            match v {
                Value::Number(n) => n.to_string().parse::<BigUint>().map_err(|_| bad()),
                Value::String(s) => s.parse::<BigUint>().map_err(|_| bad()),
                _ => Err(bad()),
            }
        };
        let sign = v["sign"].as_i64().ok_or_else(bad)? as i8;
        let mut factors = Vec::new();
        for pe in v["factors"].as_array().ok_or_else(bad)? {
            let pe = pe.as_array().ok_or_else(bad)?;
            if pe.len() != 2 {
                return Err(bad());
            }
            factors.push((big(&pe[0])?, pe[1].as_u64().ok_or_else(bad)? as u32));
        }
        Ok(FactorTable { sign, factors, cofactor: big(&v["cofactor"])?, trial_bound: big(&v["trial_bound"])? })
    }
}

fn big_number(v: &BigUint) -> Number {
    serde_json::from_str::<Number>(&v.to_string()).expect("decimal integer is a JSON number")
}

/// `2^16·3^9`, the unit is `1`; an unfactored cofactor is shown as `[c]`.
impl fmt::Display for FactorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.factors.iter().map(|(p, e)| format!("{p}^{e}")).collect();
        if !self.cofactor.is_one() {
            parts.push(format!("[{}]", self.cofactor));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}{}", if self.sign < 0 { "-" } else { "" }, parts.join("·"))
    }
}

/// Factor `n` with the default options and the given trial bound.
pub fn factor_integer(n: &BigInt, trial_bound: u64) -> Result<FactorTable> {
    factor_integer_with(n, &FactorOptions { trial_bound, ..FactorOptions::default() })
}

pub fn factor_integer_with(n: &BigInt, opts: &FactorOptions) -> Result<FactorTable> {
    if n.is_zero() {
        return invalid("cannot factor zero");
    }
    let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut m = n.magnitude().clone();
    let mut found: Vec<(BigUint, u32)> = Vec::new();
    trial_divide(&mut m, opts.trial_bound, &mut found);
    let mut cofactor = BigUint::one();
    if !m.is_one() {
        let mut pending = vec![(m, 1u32)];
        while let Some((x, mult)) = pending.pop() {
            if x.is_one() {
                continue;
            }
            if is_probable_prime(&x) {
                found.push((x, mult));
                continue;
            }
            if let Some((root, k)) = perfect_power(&x) {
                pending.push((root, mult * k));
                continue;
            }
            match pollard_brent(&x, opts.rho_iterations) {
                Some(d) => {
                    let other = &x / &d;
                    pending.push((d, mult));
                    pending.push((other, mult));
                }
                None => cofactor *= x.pow(mult),
            }
        }
    }
    // merge duplicates found through different branches
    found.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for (p, e) in found {
        match factors.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => factors.push((p, e)),
        }
    }
    Ok(FactorTable { sign, factors, cofactor, trial_bound: BigUint::from(opts.trial_bound) })
}

/// Remainder of a little-endian `u32` limb vector modulo `p < 2^32`.
#[inline]
fn limbs_mod_small(limbs: &[u32], p: u64) -> u64 {
    let mut r = 0u64;
    for &l in limbs.iter().rev() {
        r = ((r << 32) | l as u64) % p;
    }
    r
}

#[inline]
fn limbs_mod_wide(limbs: &[u32], p: u64) -> u64 {
    let mut r = 0u128;
    for &l in limbs.iter().rev() {
        r = ((r << 32) | l as u128) % p as u128;
    }
    r as u64
}

fn trial_divide(m: &mut BigUint, bound: u64, found: &mut Vec<(BigUint, u32)>) {
    if bound < 2 || m.is_one() {
        return;
    }
    let tz = m.trailing_zeros().unwrap_or(0);
    if tz > 0 {
        *m >>= tz;
        found.push((BigUint::from(2u8), tz as u32));
    }
    let mut limbs = m.to_u32_digits();
    for_each_prime(3, bound, |p| {
        if limbs.len() <= 2 {
            let v = limbs.iter().rev().fold(0u64, |a, &l| (a << 32) | l as u64);
            if v == 1 {
                return false;
            }
            if p.saturating_mul(p) > v {
                // v is prime
                return false;
            }
        }
        let r = if p < 1 << 32 { limbs_mod_small(&limbs, p) } else { limbs_mod_wide(&limbs, p) };
        if r == 0 {
            let pb = BigUint::from(p);
            let mut e = 0;
            while (&*m % &pb).is_zero() {
                *m /= &pb;
                e += 1;
            }
            found.push((pb, e));
            limbs = m.to_u32_digits();
        }
        true
    });
}

const SMALL_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin: deterministic below `3.3 * 10^24` (first 13 prime bases),
/// otherwise those bases plus 64 pseudo-random ones.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u8);
    if *n < two {
        return false;
    }
    for &b in &SMALL_BASES {
        let bb = BigUint::from(b);
        if *n == bb {
            return true;
        }
        if (n % &bb).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u8;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n1 {
            return true;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                return true;
            }
        }
        false
    };
    for &b in &SMALL_BASES {
        if !witness(&BigUint::from(b)) {
            return false;
        }
    }
    let limit: BigUint = "3317044064679887385961981".parse().unwrap();
    if *n < limit {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d72);
    let nm3 = n - 3u8;
    for _ in 0..64 {
        let a = random_below(&mut rng, &nm3) + 2u8;
        if !witness(&a) {
            return false;
        }
    }
    true
}

fn random_below<R: Rng>(rng: &mut R, n: &BigUint) -> BigUint {
    let bytes = (n.bits() as usize).div_ceil(8) + 8;
    let buf: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
    BigUint::from_bytes_le(&buf) % n
}

/// `(r, k)` with `r^k = n`, `k >= 2` maximal, if `n` is a perfect power.
pub fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    let mut best: Option<(BigUint, u32)> = None;
    for k in 2..=bits.max(2) {
        let r = n.nth_root(k);
        if r < BigUint::from(2u8) {
            break;
        }
        if r.pow(k) == *n {
            best = Some((r, k));
        }
    }
    best
}

/// One nontrivial factor of an odd composite `n`, or `None` when the
/// iteration budget runs out.
pub fn pollard_brent(n: &BigUint, max_iter: u64) -> Option<BigUint> {
    if max_iter == 0 {
        return None;
    }
    if n.is_even() {
        return Some(BigUint::from(2u8));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xb2e7);
    let mut spent = 0u64;
    for _attempt in 0..8 {
        let c = random_below(&mut rng, n);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = random_below(&mut rng, n);
        let m = 128u64;
        let mut g = BigUint::one();
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += m;
                spent += m.min(r);
            }
            r *= 2;
            if spent > max_iter {
                return None;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
    }
    None
}

/// `n` as `u64` when it fits.
pub fn to_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}
