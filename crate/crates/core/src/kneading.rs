//! Binary itineraries, angles under doubling, kneading sequences, the
//! `rho` function and the admissibility criterion.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::arith::ntheory::divisors;
use crate::error::{invalid, Error, Result};

/// Longest word handled; angles are stored over `2^n - 1` in a `u64`.
pub const MAX_LEN: usize = 62;

/// Exact period of a cyclic binary word.
pub fn word_period(bits: &[u8]) -> usize {
    let n = bits.len();
    divisors(n as u64)
        .into_iter()
        .map(|d| d as usize)
        .find(|&d| (0..n).all(|i| bits[i] == bits[(i + d) % n]))
        .unwrap_or(n)
}

/// One period `v_1 ... v_n` of a periodic binary sequence of exact period `n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Itinerary {
    bits: Vec<u8>,
}

impl Itinerary {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_LEN || bits.iter().any(|&b| b > 1) {
            return invalid(format!("itinerary must be 1..={MAX_LEN} binary digits"));
        }
        if word_period(&bits) != bits.len() {
            return invalid(format!("{} does not have exact period {}", render_bits(&bits), bits.len()));
        }
        Ok(Itinerary { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    /// `sigma^k`: drop the first `k` symbols of the periodic sequence.
    pub fn shift_by(&self, k: usize) -> Itinerary {
        let n = self.n();
        Itinerary { bits: (0..n).map(|i| self.bits[(i + k) % n]).collect() }
    }

    pub fn shift(&self) -> Itinerary {
        self.shift_by(1)
    }

    pub fn complement(&self) -> Itinerary {
        Itinerary { bits: self.bits.iter().map(|b| 1 - b).collect() }
    }

    /// Number of ones minus number of zeros.
    pub fn disparity(&self) -> i64 {
        let ones = self.bits.iter().filter(|&&b| b == 1).count() as i64;
        2 * ones - self.n() as i64
    }

    /// Lexicographically greatest rotation and the `k` with `sigma^k(v)` equal to it.
    pub fn maximal_shift(&self) -> (Itinerary, usize) {
        (0..self.n()).map(|k| (self.shift_by(k), k)).max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1))).expect("nonempty")
    }

    pub fn is_maximal(&self) -> bool {
        self.maximal_shift().1 == 0
    }

    /// Lexicographically least rotation.
    pub fn minimal_shift(&self) -> Itinerary {
        (0..self.n()).map(|k| self.shift_by(k)).min().expect("nonempty")
    }

    /// `v_1 ... v_{n-1} *`.
    pub fn star(&self) -> KneadingSequence {
        KneadingSequence { prefix: self.bits[..self.n() - 1].to_vec() }
    }

    /// Binary value of the word, the numerator of `.(v_1 ... v_n)` over `2^n - 1`.
    pub fn value(&self) -> u64 {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    /// `sigma^k(v) = complement(v)` for some `0 < k < n`. Such a word has the
    /// form `w complement(w)`, which is checked.
    pub fn is_self_complementary(&self) -> bool {
        let c = self.complement();
        let n = self.n();
        let Some(k) = (1..n).find(|&k| self.shift_by(k) == c) else {
            return false;
        };
        assert!(n % 2 == 0 && k == n / 2, "self-complementary word {self} with shift {k}");
        let (w, x) = self.bits.split_at(n / 2);
        assert!(w.iter().zip(x).all(|(a, b)| a + b == 1), "self-complementary word {self} is not w w^");
        true
    }

    /// Maximal representative `1^{b+1} 0^a (1^b 0^a)^j` with `a, b >= 1`, `j >= 0`.
    pub fn is_repetitive(&self) -> bool {
        self.repetitive_params().is_some()
    }

    /// `(a, b)` for a repetitive word.
    pub fn repetitive_params(&self) -> Option<(usize, usize)> {
        let (v, _) = self.maximal_shift();
        let blocks = runs(v.bits());
        if blocks.len() % 2 != 0 || blocks.is_empty() {
            return None;
        }
        let first_ones = blocks[0].1;
        let a = blocks[1].1;
        if first_ones < 2 {
            return None;
        }
        let b = first_ones - 1;
        for (i, &(sym, len)) in blocks.iter().enumerate().skip(2) {
            let want = if sym == 1 { b } else { a };
            if len != want || (i % 2 == 0) != (sym == 1) {
                return None;
            }
        }
        Some((a, b))
    }

    /// `v = mu^{k-1} mu'` with `k > 1` dividing `n` and `mu'` differing from
    /// `mu` in its last entry; equivalently, flipping the last symbol of `v`
    /// lowers the period, so `v*` is imprimitive.
    pub fn is_nearly_imprimitive(&self) -> bool {
        let mut w = self.bits.clone();
        let last = w.len() - 1;
        w[last] = 1 - w[last];
        word_period(&w) < self.n()
    }

    /// Successor: maximal representative with its final 0 turned into 1,
    /// returned in maximal form.
    pub fn successor(&self) -> Result<Itinerary> {
        let (mut v, _) = self.maximal_shift();
        let n = v.n();
        if v.bits[n - 1] != 0 {
            return invalid(format!("maximal representative {v} does not end in 0"));
        }
        v.bits[n - 1] = 1;
        let w = Itinerary::new(v.bits)?;
        Ok(w.maximal_shift().0)
    }
}

fn runs(bits: &[u8]) -> Vec<(u8, usize)> {
    let mut out: Vec<(u8, usize)> = Vec::new();
    for &b in bits {
        match out.last_mut() {
            Some((s, len)) if *s == b => *len += 1,
            _ => out.push((b, 1)),
        }
    }
    out
}

fn render_bits(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_bits(&self.bits))
    }
}

impl FromStr for Itinerary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("bad itinerary symbol {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Itinerary::new(bits)
    }
}

impl Serialize for Itinerary {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A `*`-periodic sequence `v_1 ... v_{n-1} *` with `v_1 = 1` (for `n > 1`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KneadingSequence {
    prefix: Vec<u8>,
}

impl KneadingSequence {
    pub fn new(prefix: Vec<u8>) -> Result<Self> {
        if prefix.len() >= MAX_LEN || prefix.iter().any(|&b| b > 1) {
            return invalid("kneading prefix must be binary and shorter than the word limit");
        }
        if prefix.first() == Some(&0) {
            return invalid("kneading sequence must begin with 1");
        }
        Ok(KneadingSequence { prefix })
    }

    pub fn n(&self) -> usize {
        self.prefix.len() + 1
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    /// Resolution with last symbol `b`, as a raw word (its period may be smaller than `n`).
    pub fn resolve(&self, b: u8) -> Vec<u8> {
        let mut w = self.prefix.clone();
        w.push(b);
        w
    }

    /// `K_0` and `K_1` both have exact period `n`.
    pub fn is_primitive(&self) -> bool {
        let n = self.n();
        word_period(&self.resolve(0)) == n && word_period(&self.resolve(1)) == n
    }

    fn sym(&self, i: usize) -> Sym {
        // i is 1-based
        let j = (i - 1) % self.n();
        if j == self.prefix.len() {
            Sym::Star
        } else {
            Sym::Bit(self.prefix[j])
        }
    }

    /// `rho(k) = min { j > k : v_j != v_{j-k} }`, `None` for infinity.
    pub fn rho(&self, k: usize) -> Option<usize> {
        rho_generic(|i| self.sym(i), self.n(), k)
    }

    /// Orbit of 1 under `rho`, truncated before infinity.
    pub fn internal_address(&self) -> Vec<usize> {
        internal_address_generic(|k| self.rho(k))
    }

    /// Every `1 <= m < n` is an admissible period: (A1) `m` is in the
    /// internal address, (A2) some proper divisor `k` of `m` has
    /// `rho(k) > m`, or (A3) with `r` in `1..=m` congruent to `rho(m)`,
    /// `m` is not in the `rho`-orbit of `r`.
    pub fn is_admissible(&self) -> bool {
        (1..self.n()).all(|m| self.admissible_period(m))
    }

    pub fn admissible_period(&self, m: usize) -> bool {
        let addr = self.internal_address();
        if addr.contains(&m) {
            return true;
        }
        let gt = |x: Option<usize>| x.map_or(true, |v| v > m);
        if (1..m).any(|k| m % k == 0 && gt(self.rho(k))) {
            return true;
        }
        let Some(rm) = self.rho(m) else {
            return true;
        };
        let r = match rm % m {
            0 => m,
            x => x,
        };
        let mut x = Some(r);
        while let Some(v) = x {
            if v == m {
                return false;
            }
            if v > m {
                break;
            }
            x = self.rho(v);
        }
        true
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sym {
    Bit(u8),
    Star,
}

fn rho_generic(sym: impl Fn(usize) -> Sym, len: usize, k: usize) -> Option<usize> {
    // the comparison pattern is periodic in j with period len
    (k + 1..=k + len).find(|&j| {
        // * differs from 0 and 1 but matches itself, so rho(n) is infinite
        sym(j) != sym(j - k)
    })
}

fn internal_address_generic(rho: impl Fn(usize) -> Option<usize>) -> Vec<usize> {
    let mut out = vec![1];
    let mut k = 1;
    while let Some(next) = rho(k) {
        out.push(next);
        k = next;
    }
    out
}

/// `rho` for a purely periodic binary word.
pub fn rho_periodic(bits: &[u8], k: usize) -> Option<usize> {
    rho_generic(|i| Sym::Bit(bits[(i - 1) % bits.len()]), bits.len(), k)
}

impl fmt::Display for KneadingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*", render_bits(&self.prefix))
    }
}

impl FromStr for KneadingSequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_suffix('*').or_else(|| s.strip_suffix('⋆')).ok_or_else(|| Error::Parse(format!("{s:?} does not end in *")))?;
        let prefix = body
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("bad kneading symbol {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        KneadingSequence::new(prefix)
    }
}

impl Serialize for KneadingSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `a / (2^n - 1)` in `(0, 1)`, periodic under doubling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Angle {
    pub numerator: u64,
    pub n: u32,
    /// Exact period under doubling.
    pub period: u32,
}

impl Angle {
    pub fn new(numerator: u64, n: u32) -> Result<Self> {
        if n == 0 || n as usize > MAX_LEN {
            return invalid(format!("angle denominator 2^{n} - 1 out of range"));
        }
        let d = (1u64 << n) - 1;
        if numerator == 0 || numerator >= d {
            return invalid(format!("{numerator}/{d} is not in (0, 1)"));
        }
        let period = (1..=n).find(|&k| n % k == 0 && (numerator as u128 * ((1u128 << k) - 1)) % d as u128 == 0).expect("k = n works");
        Ok(Angle { numerator, n, period })
    }

    /// An angle `a / d` with `d` odd, written over the least `2^n - 1` it divides.
    pub fn from_fraction(a: u64, d: u64) -> Result<Self> {
        if d % 2 == 0 || d < 3 {
            return invalid(format!("angle {a}/{d} needs an odd denominator above 1"));
        }
        let n = (1..=MAX_LEN as u32).find(|&k| ((1u128 << k) - 1) % d as u128 == 0)
            .ok_or_else(|| Error::InvalidInput(format!("2 has order above {MAX_LEN} modulo {d}")))?;
        let scale = (((1u128 << n) - 1) / d as u128) as u64;
        Angle::new(a * scale, n)
    }

    pub fn denominator(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    /// `2 theta mod 1`.
    pub fn double(&self) -> Angle {
        let d = self.denominator();
        Angle { numerator: ((self.numerator as u128 * 2) % d as u128) as u64, ..*self }
    }

    /// The doubling orbit of length `period`.
    pub fn orbit(&self) -> Vec<Angle> {
        let mut out = vec![*self];
        for _ in 1..self.period {
            out.push(out.last().expect("nonempty").double());
        }
        out
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}

/// `K(theta)`: symbol `i` is 1, 0 or `*` as `2^{i-1} theta` lies in
/// `(theta/2, (theta+1)/2)`, its complement, or on the boundary.
pub fn kneading_sequence(theta: Angle) -> KneadingSequence {
    let d = theta.denominator() as u128;
    let a = theta.numerator as u128;
    let mut x = a;
    let mut prefix = Vec::new();
    for _ in 1..theta.period {
        let two_x = 2 * x;
        debug_assert!(two_x != a && two_x != a + d);
        prefix.push(u8::from(a < two_x && two_x < a + d));
        x = (2 * x) % d;
    }
    debug_assert!(2 * x == a || 2 * x == a + d);
    KneadingSequence { prefix }
}

/// The angle `.(v_1 ... v_n)` of a maximal itinerary, whose kneading
/// sequence is `v*`.
pub fn angle_of_maximal(v: &Itinerary) -> Result<Angle> {
    if !v.is_maximal() {
        return invalid(format!("{v} is not maximal in its orbit"));
    }
    if v.n() < 2 {
        return invalid("angle of a period 1 itinerary is 0");
    }
    Angle::new(v.value(), v.n() as u32)
}

/// All angles of exact period `n`.
pub fn angles_of_period(n: u32) -> Result<Vec<Angle>> {
    if n < 2 || n as usize > 30 {
        return invalid(format!("angle enumeration supports periods 2..=30, got {n}"));
    }
    let d = (1u64 << n) - 1;
    let mut out = Vec::new();
    for a in 1..d {
        let t = Angle::new(a, n)?;
        if t.period == n {
            out.push(t);
        }
    }
    Ok(out)
}

/// All exact-period-`n` words, in increasing binary value.
pub fn words_of_period(n: usize) -> Result<Vec<Itinerary>> {
    if n == 0 || n > 30 {
        return invalid(format!("word enumeration supports lengths 1..=30, got {n}"));
    }
    let mut out = Vec::new();
    for v in 0u64..(1 << n) {
        let bits: Vec<u8> = (0..n).rev().map(|i| ((v >> i) & 1) as u8).collect();
        if word_period(&bits) == n {
            out.push(Itinerary { bits });
        }
    }
    Ok(out)
}
