//! Arithmetic modulo a prime power `p^N < 2^62`.
//!
//! Enough to take determinants over `Z/p^N` by pivoting on minimal
//! valuation and to do polynomial arithmetic with unit leading
//! coefficients. Used to decide whether a valuation is 1 or at least 2.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::ntheory::inv_mod;
use crate::error::{invalid, Result};

/// Polynomial over `Z/p^N`, residues in `[0, p^N)`, lowest degree first.
pub type PPoly = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePower {
    p: u64,
    n: u32,
    modulus: u64,
}

impl PrimePower {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        match p.checked_pow(n) {
            Some(q) if q < (1 << 62) && p >= 2 && n >= 1 => Ok(PrimePower { p, n, modulus: q }),
            _ => invalid(format!("{p}^{n} does not fit a machine word")),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn reduce_int(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.modulus)).to_u64().expect("residue fits")
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.modulus as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        s.min(s.wrapping_sub(self.modulus))
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let d = a.wrapping_sub(b);
        d.min(d.wrapping_add(self.modulus))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a, 1 % self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `p`-adic valuation, `N` for zero.
    pub fn valuation(&self, a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        let mut x = a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a unit.
    pub fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a, self.modulus)
    }

    pub fn trim(&self, mut a: PPoly) -> PPoly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn poly_sub(&self, a: &[u64], b: &[u64]) -> PPoly {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        }
        self.trim(out)
    }

    pub fn poly_mul(&self, a: &[u64], b: &[u64]) -> PPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u128; a.len() + b.len() - 1];
        let q = self.modulus as u128;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let t = out[i + j] + x as u128 * y as u128;
                out[i + j] = if t >= q << 64 { t % q } else { t };
            }
        }
        self.trim(out.into_iter().map(|v| (v % q) as u64).collect())
    }

    pub fn poly_pow(&self, a: &[u64], mut e: u64) -> PPoly {
        let mut acc = vec![1 % self.modulus];
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.poly_mul(&base, &base);
            }
        }
        acc
    }

    pub fn derivative(&self, a: &[u64]) -> PPoly {
        let out = a.iter().enumerate().skip(1).map(|(i, &c)| self.mul(c, i as u64 % self.modulus)).collect();
        self.trim(out)
    }

    pub fn eval(&self, a: &[u64], x: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Division with remainder by a polynomial whose leading coefficient is
    /// a unit; `None` otherwise.
    pub fn divrem(&self, a: &[u64], b: &[u64]) -> Option<(PPoly, PPoly)> {
        let b = self.trim(b.to_vec());
        let lc_inv = self.inv(*b.last()?)?;
        let mut r = self.trim(a.to_vec());
        if r.len() < b.len() {
            return Some((Vec::new(), r));
        }
        let mut q = vec![0; r.len() - b.len() + 1];
        while r.len() >= b.len() {
            let k = r.len() - b.len();
            let t = self.mul(*r.last().unwrap(), lc_inv);
            q[k] = t;
            for (j, &bj) in b.iter().enumerate() {
                r[k + j] = self.sub(r[k + j], self.mul(t, bj));
            }
            r.pop();
            r = self.trim(r);
        }
        Some((self.trim(q), r))
    }

    pub fn div_exact(&self, a: &[u64], b: &[u64]) -> Option<PPoly> {
        let (q, r) = self.divrem(a, b)?;
        r.is_empty().then_some(q)
    }

    /// Newton interpolation; the pairwise differences of `xs` must be units.
    pub fn interpolate(&self, xs: &[u64], ys: &[u64]) -> Option<PPoly> {
        let n = xs.len();
        let mut c = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                let d = self.inv(self.sub(xs[i], xs[i - j]))?;
                c[i] = self.mul(self.sub(c[i], c[i - 1]), d);
            }
        }
        let mut out: PPoly = vec![0];
        for i in (0..n).rev() {
            // out = out * (x - xs[i]) + c[i]
            let mut next = vec![0; out.len() + 1];
            for (k, &o) in out.iter().enumerate() {
                next[k + 1] = self.add(next[k + 1], o);
                next[k] = self.sub(next[k], self.mul(o, xs[i]));
            }
            next[0] = self.add(next[0], c[i]);
            out = next;
        }
        Some(self.trim(out))
    }

    /// Determinant of multiplication by `g` on `(Z/p^N)[x]/(m)` for monic
    /// `m`, which is `Res(m, g)`.
    pub fn norm(&self, g: &[u64], m: &[u64]) -> u64 {
        let d = m.len() - 1;
        let reduce = |v: &[u64]| {
            let mut r = self.divrem(v, m).expect("monic modulus").1;
            r.resize(d, 0);
            r
        };
        let mut col = reduce(g);
        let mut cols = Vec::with_capacity(d);
        for _ in 0..d {
            let mut next = vec![0];
            next.extend_from_slice(&col);
            cols.push(col);
            col = reduce(&next);
        }
        self.det(cols)
    }

    /// Determinant by elimination with minimal-valuation pivots.
    pub fn det(&self, mut a: Vec<Vec<u64>>) -> u64 {
        let n = a.len();
        let mut det = 1 % self.modulus;
        let mut negate = false;
        for k in 0..n {
            let mut best: Option<(u32, usize, usize)> = None;
            'search: for (i, row) in a.iter().enumerate().skip(k) {
                for (j, &v) in row.iter().enumerate().skip(k) {
                    let val = self.valuation(v);
                    if best.map_or(true, |(b, _, _)| val < b) {
                        best = Some((val, i, j));
                        if val == 0 {
                            break 'search;
                        }
                    }
                }
            }
            let (v, pi, pj) = best.expect("nonempty");
            if v >= self.n {
                return 0;
            }
            if pi != k {
                a.swap(pi, k);
                negate = !negate;
            }
            if pj != k {
                for row in a.iter_mut() {
                    row.swap(pj, k);
                }
                negate = !negate;
            }
            let pivot = a[k][k];
            det = self.mul(det, pivot);
            let pv = self.p.pow(v);
            let unit_inv = self.inv(pivot / pv).expect("unit part");
            let prow = a[k].clone();
            for row in a.iter_mut().skip(k + 1) {
                if row[k] == 0 {
                    continue;
                }
                // row[k] has valuation >= v, so the quotient is exact
                let f = self.mul(row[k] / pv, unit_inv);
                for j in k..n {
                    row[j] = self.sub(row[j], self.mul(f, prow[j]));
                }
            }
        }
        if negate {
            self.sub(0, det)
        } else {
            det
        }
    }
}
