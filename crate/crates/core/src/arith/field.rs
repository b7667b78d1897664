//! Finite fields behind one trait.
//!
//! * [`PrimeField`] is `F_p` for odd `p < 2^63` in Montgomery form.
//! * [`ZechField`] is `F_q` with `q = p^k` small enough for a Zech logarithm
//!   table; elements are logarithms, so products are additions.
//! * [`ExtField`] is `K[z]/(g)` for any field `K` and irreducible `g`; it is
//!   slower but nests, which the singularity test needs.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::ntheory::{is_prime_u64, prime_factors_u64};
use crate::arith::upoly;
use crate::error::{invalid, Result};

pub trait Field: Clone + Send + Sync + Debug {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Image of a machine integer (reduced modulo the characteristic).
    fn from_u64(&self, v: u64) -> Self::Elem;
    fn characteristic(&self) -> u64;
    /// Degree over the prime field.
    fn degree(&self) -> u32;
    /// The integer in `[0, p)` representing `a`, when `a` lies in `F_p`.
    fn to_prime(&self, a: &Self::Elem) -> Option<u64>;
    /// A bijection from `[0, q)` onto the field (used to pick distinct
    /// interpolation nodes). Index 0 is zero.
    fn element(&self, i: u64) -> Self::Elem;

    fn from_i64(&self, v: i64) -> Self::Elem {
        let p = self.characteristic() as i128;
        self.from_u64((v as i128).rem_euclid(p) as u64)
    }

    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        let p = BigInt::from(self.characteristic());
        let mut r = v % &p;
        if r.sign() == Sign::Minus {
            r += &p;
        }
        self.from_u64(r.to_u64().expect("residue fits"))
    }

    fn order(&self) -> BigUint {
        BigUint::from(self.characteristic()).pow(self.degree())
    }

    /// `q` as a machine integer when it fits.
    fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn pow_big(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// `a^p`.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.characteristic())
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Uniformly random element.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        let q = self.order_u64().expect("field order fits in u64");
        self.element(rng.gen_range(0..q))
    }
}

// ---------------------------------------------------------------------------

/// `F_p` for an odd prime `p < 2^63`, Montgomery representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    ninv: u64,
    r2: u64,
    one: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p % 2 == 0 || p >= 1 << 63 || !is_prime_u64(p) {
            return invalid(format!("{p} is not an odd prime below 2^63"));
        }
        // Newton iteration for p^{-1} mod 2^64.
        let mut inv = 1u64;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let ninv = inv.wrapping_neg();
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Ok(PrimeField { p, ninv, r2, one: r })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline(always)]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        u.min(u.wrapping_sub(self.p))
    }

    /// Plain residue in `[0, p)`.
    #[inline]
    pub fn to_u64(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    /// Symmetric residue in `(-p/2, p/2]`.
    pub fn to_i64_sym(&self, a: u64) -> i64 {
        let v = self.to_u64(a);
        if v > self.p / 2 {
            v as i64 - self.p as i64
        } else {
            v as i64
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    #[inline(always)]
    fn zero(&self) -> u64 {
        0
    }
    #[inline(always)]
    fn one(&self) -> u64 {
        self.one
    }
    #[inline(always)]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline(always)]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        s.min(s.wrapping_sub(self.p))
    }
    #[inline(always)]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        let d = a.wrapping_sub(*b);
        d.min(d.wrapping_add(self.p))
    }
    #[inline(always)]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline(always)]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.redc(*a as u128 * *b as u128)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        Some(self.pow(a, self.p - 2))
    }
    #[inline]
    fn from_u64(&self, v: u64) -> u64 {
        self.redc((v % self.p) as u128 * self.r2 as u128)
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn to_prime(&self, a: &u64) -> Option<u64> {
        Some(self.to_u64(*a))
    }
    fn element(&self, i: u64) -> u64 {
        self.from_u64(i)
    }
}

// ---------------------------------------------------------------------------

/// Marker for zero in [`ZechField`].
pub const ZECH_ZERO: u32 = u32::MAX;

#[derive(Debug)]
struct ZechTables {
    /// `zech[d] = log(1 + g^d)`, or `ZECH_ZERO` when `1 + g^d = 0`.
    zech: Vec<u32>,
    /// log of each integer `0..p` (index 0 unused).
    log_of_int: Vec<u32>,
    /// For `i` a multiple of `(q-1)/(p-1)`, the integer `g^i` in `[1, p)`.
    int_of_sublog: Vec<u64>,
    /// Coefficients (base-`p` digits) of `g^i`, used for display and tests.
    minpoly: Vec<u64>,
}

/// `F_q`, `q = p^k`, elements stored as discrete logarithms with respect to a
/// root of a primitive polynomial. Suitable up to a few million elements.
#[derive(Clone, Debug)]
pub struct ZechField {
    p: u64,
    k: u32,
    qm1: u32,
    neg_one: u32,
    sub_step: u32,
    tables: Arc<ZechTables>,
}

impl ZechField {
    /// Largest field order this type accepts.
    pub const MAX_ORDER: u64 = 1 << 24;

    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime_u64(p) || k == 0 {
            return invalid(format!("bad Zech field parameters p={p}, k={k}"));
        }
        let q = (p as u128).pow(k);
        if q > Self::MAX_ORDER as u128 {
            return invalid(format!("{p}^{k} is too large for a Zech table"));
        }
        let q = q as u64;
        let qm1 = (q - 1) as u32;
        let minpoly = primitive_poly(p, k)?;
        // Walk g^i as base-p digit vectors encoded as integers.
        let ku = k as usize;
        let mut log_of_code = vec![ZECH_ZERO; q as usize];
        let mut code_of_log = vec![0u32; qm1 as usize];
        let mut digits = vec![0u64; ku];
        digits[0] = 1;
        let encode = |d: &[u64]| -> u64 { d.iter().rev().fold(0u64, |acc, &x| acc * p + x) };
        for i in 0..qm1 {
            let code = encode(&digits);
            log_of_code[code as usize] = i;
            code_of_log[i as usize] = code as u32;
            // multiply by z modulo the monic minimal polynomial
            let top = digits[ku - 1];
            for j in (1..ku).rev() {
                digits[j] = digits[j - 1];
            }
            digits[0] = 0;
            if top != 0 {
                for j in 0..ku {
                    digits[j] = (digits[j] + p - (top * minpoly[j]) % p) % p;
                }
            }
        }
        let mut zech = vec![ZECH_ZERO; qm1 as usize];
        for d in 0..qm1 {
            let code = code_of_log[d as usize] as u64;
            let c0 = code % p;
            let bumped = code - c0 + (c0 + 1) % p;
            zech[d as usize] = log_of_code[bumped as usize];
        }
        let log_of_int: Vec<u32> = (0..p).map(|v| log_of_code[v as usize]).collect();
        let sub_step = ((q - 1) / (p - 1)) as u32;
        let int_of_sublog: Vec<u64> =
            (0..(p - 1)).map(|j| code_of_log[(j as u32 * sub_step) as usize] as u64).collect();
        let neg_one = if p == 2 { 0 } else { qm1 / 2 };
        Ok(ZechField {
            p,
            k,
            qm1,
            neg_one,
            sub_step,
            tables: Arc::new(ZechTables { zech, log_of_int, int_of_sublog, minpoly }),
        })
    }

    pub fn q(&self) -> u64 {
        self.qm1 as u64 + 1
    }

    /// The primitive polynomial used (monic, coefficients low to high,
    /// leading 1 omitted).
    pub fn minpoly(&self) -> &[u64] {
        &self.tables.minpoly
    }

    #[inline(always)]
    fn addlog(&self, a: u32, b: u32) -> u32 {
        // branchless: the wrapped difference is huge unless s >= qm1
        let s = a + b;
        s.min(s.wrapping_sub(self.qm1))
    }
}

impl Field for ZechField {
    type Elem = u32;

    #[inline(always)]
    fn zero(&self) -> u32 {
        ZECH_ZERO
    }
    #[inline(always)]
    fn one(&self) -> u32 {
        0
    }
    #[inline(always)]
    fn is_zero(&self, a: &u32) -> bool {
        *a == ZECH_ZERO
    }
    #[inline(always)]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let (a, b) = (*a, *b);
        if a == ZECH_ZERO {
            return b;
        }
        if b == ZECH_ZERO {
            return a;
        }
        let d = b.wrapping_sub(a);
        let d = d.min(d.wrapping_add(self.qm1));
        let z = unsafe { *self.tables.zech.get_unchecked(d as usize) };
        if z == ZECH_ZERO {
            ZECH_ZERO
        } else {
            self.addlog(a, z)
        }
    }
    #[inline(always)]
    fn neg(&self, a: &u32) -> u32 {
        if *a == ZECH_ZERO {
            ZECH_ZERO
        } else {
            self.addlog(*a, self.neg_one)
        }
    }
    #[inline(always)]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.neg(b))
    }
    #[inline(always)]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        if *a == ZECH_ZERO || *b == ZECH_ZERO {
            ZECH_ZERO
        } else {
            self.addlog(*a, *b)
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == ZECH_ZERO {
            None
        } else if *a == 0 {
            Some(0)
        } else {
            Some(self.qm1 - a)
        }
    }
    fn from_u64(&self, v: u64) -> u32 {
        self.tables.log_of_int[(v % self.p) as usize]
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        self.k
    }
    fn to_prime(&self, a: &u32) -> Option<u64> {
        if *a == ZECH_ZERO {
            return Some(0);
        }
        if a % self.sub_step != 0 {
            return None;
        }
        Some(self.tables.int_of_sublog[(a / self.sub_step) as usize])
    }
    fn element(&self, i: u64) -> u32 {
        if i == 0 {
            ZECH_ZERO
        } else {
            (i - 1) as u32
        }
    }
    fn pow(&self, a: &u32, e: u64) -> u32 {
        if *a == ZECH_ZERO {
            return if e == 0 { 0 } else { ZECH_ZERO };
        }
        ((*a as u64 * (e % self.qm1 as u64)) % self.qm1 as u64) as u32
    }
    fn frobenius(&self, a: &u32) -> u32 {
        self.pow(a, self.p)
    }
}

/// First primitive polynomial of degree `k` over `F_p` in lexicographic order
/// of its coefficient vector (monic; returned without the leading 1).
fn primitive_poly(p: u64, k: u32) -> Result<Vec<u64>> {
    let ku = k as usize;
    if ku == 1 {
        // x - g for the least primitive root g.
        if p == 2 {
            return Ok(vec![1]);
        }
        let fac = prime_factors_u64(p - 1);
        for g in 2..p {
            if fac.iter().all(|&l| crate::arith::ntheory::pow_mod(g, (p - 1) / l, p) != 1) {
                return Ok(vec![p - g]);
            }
        }
        return invalid("no primitive root");
    }
    let fp = PrimeField::new(p)?;
    let q = (p as u128).pow(k) as u64;
    let fac = prime_factors_u64(q - 1);
    let total = (p as u128).pow(k) as u64;
    for code in 0..total {
        let mut c = Vec::with_capacity(ku);
        let mut t = code;
        for _ in 0..ku {
            c.push(t % p);
            t /= p;
        }
        if c[0] == 0 {
            continue;
        }
        let mut g: Vec<u64> = c.iter().map(|&v| fp.from_u64(v)).collect();
        g.push(fp.one());
        if !upoly::is_irreducible(&fp, &g) {
            continue;
        }
        let z = vec![fp.zero(), fp.one()];
        let one = vec![fp.one()];
        if fac.iter().all(|&l| upoly::powmod(&fp, &z, (q - 1) / l, &g) != one) {
            return Ok(c);
        }
    }
    invalid(format!("no primitive polynomial of degree {k} over F_{p}"))
}

// ---------------------------------------------------------------------------

/// `K[z]/(g)` with `g` monic irreducible over `K`. Elements are coefficient
/// vectors of length `deg g`.
#[derive(Clone, Debug)]
pub struct ExtField<F: Field> {
    base: F,
    modulus: Vec<F::Elem>,
}

impl<F: Field> ExtField<F> {
    /// `g` must be monic and irreducible; irreducibility is checked.
    pub fn new(base: F, modulus: Vec<F::Elem>) -> Result<Self> {
        let g = upoly::trim(&base, modulus);
        if g.len() < 2 || g.last() != Some(&base.one()) {
            return invalid("extension modulus must be monic of degree >= 1");
        }
        if !upoly::is_irreducible(&base, &g) {
            return invalid("extension modulus is reducible");
        }
        Ok(ExtField { base, modulus: g })
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn modulus(&self) -> &[F::Elem] {
        &self.modulus
    }

    pub fn rel_degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// The class of `z`.
    pub fn generator(&self) -> Vec<F::Elem> {
        let mut v = vec![self.base.zero(); self.rel_degree()];
        if v.len() == 1 {
            v[0] = upoly::neg_coeff_root(&self.base, &self.modulus);
        } else {
            v[1] = self.base.one();
        }
        v
    }

    /// Embed a base-field element.
    pub fn embed(&self, a: &F::Elem) -> Vec<F::Elem> {
        let mut v = vec![self.base.zero(); self.rel_degree()];
        v[0] = a.clone();
        v
    }

    /// Reduce an arbitrary polynomial in `z` into canonical form.
    pub fn reduce(&self, a: &[F::Elem]) -> Vec<F::Elem> {
        let r = upoly::rem(&self.base, a, &self.modulus);
        self.pad(r)
    }

    fn pad(&self, mut v: Vec<F::Elem>) -> Vec<F::Elem> {
        v.resize(self.rel_degree(), self.base.zero());
        v
    }
}

impl<F: Field> Field for ExtField<F> {
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.rel_degree()]
    }
    fn one(&self) -> Self::Elem {
        self.embed(&self.base.one())
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|c| self.base.is_zero(c))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let prod = upoly::mul(&self.base, a, b);
        self.reduce(&prod)
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let a = upoly::trim(&self.base, a.clone());
        if a.is_empty() {
            return None;
        }
        let (g, s, _) = upoly::ext_gcd(&self.base, &a, &self.modulus);
        // g is a nonzero constant because the modulus is irreducible
        let ginv = self.base.inv(&g[0])?;
        Some(self.pad(upoly::scale(&self.base, &s, &ginv)))
    }
    fn from_u64(&self, v: u64) -> Self::Elem {
        self.embed(&self.base.from_u64(v))
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
    fn degree(&self) -> u32 {
        self.base.degree() * self.rel_degree() as u32
    }
    fn to_prime(&self, a: &Self::Elem) -> Option<u64> {
        if a[1..].iter().any(|c| !self.base.is_zero(c)) {
            return None;
        }
        self.base.to_prime(&a[0])
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        (0..self.rel_degree()).map(|_| self.base.random(rng)).collect()
    }
    fn element(&self, mut i: u64) -> Self::Elem {
        let qb = self.base.order_u64().expect("base field order fits in u64");
        let mut v = Vec::with_capacity(self.rel_degree());
        for _ in 0..self.rel_degree() {
            v.push(self.base.element(i % qb));
            i /= qb;
        }
        v
    }
}

/// Canonical zero test helper for big integers reduced into a field.
pub fn bigint_is_zero_mod(v: &BigInt, p: u64) -> bool {
    (v % BigInt::from(p)).is_zero()
}

/// `BigUint` one, for callers composing exponents.
pub fn big_one() -> BigUint {
    BigUint::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_axioms<F: Field>(f: &F, samples: u64) {
        let q = f.order_u64().unwrap_or(u64::MAX);
        let n = samples.min(q);
        let elems: Vec<F::Elem> = (0..n).map(|i| f.element(i)).collect();
        for a in &elems {
            assert_eq!(f.add(a, &f.zero()), *a);
            assert_eq!(f.mul(a, &f.one()), *a);
            assert!(f.is_zero(&f.add(a, &f.neg(a))));
            if !f.is_zero(a) {
                let ai = f.inv(a).unwrap();
                assert_eq!(f.mul(a, &ai), f.one());
            }
            for b in elems.iter().take(12) {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                let c = &elems[(elems.len() / 3) % elems.len()];
                assert_eq!(f.mul(a, &f.add(b, c)), f.add(&f.mul(a, b), &f.mul(a, c)));
            }
        }
    }

    #[test]
    fn prime_field_axioms() {
        field_axioms(&PrimeField::new(101).unwrap(), 101);
        field_axioms(&PrimeField::new(4_611_686_018_427_387_847).unwrap(), 50);
    }

    #[test]
    fn zech_field_axioms_and_subfield() {
        for (p, k) in [(3, 1), (3, 4), (5, 2), (23, 3), (7, 1)] {
            let f = ZechField::new(p, k).unwrap();
            field_axioms(&f, 200);
            // prime subfield round trip
            for v in 0..p {
                assert_eq!(f.to_prime(&f.from_u64(v)), Some(v));
            }
            // Frobenius fixes exactly the prime field
            let fixed = (0..f.q()).filter(|&i| {
                let a = f.element(i);
                f.frobenius(&a) == a
            });
            assert_eq!(fixed.count() as u64, p);
        }
    }

    #[test]
    fn ext_field_axioms() {
        let fp = PrimeField::new(7).unwrap();
        // x^2 + 1 is irreducible mod 7
        let g = vec![fp.one(), fp.zero(), fp.one()];
        let f = ExtField::new(fp.clone(), g).unwrap();
        field_axioms(&f, 49);
        let i = f.generator();
        assert_eq!(f.mul(&i, &i), f.neg(&f.one()));
        assert!(ExtField::new(fp.clone(), vec![fp.from_u64(6), fp.zero(), fp.one()]).is_err());
    }
}
