//! Dense univariate polynomials with big integer coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::field::Field;
use crate::error::{inconsistent, Error, Result};

/// Name of the indeterminate. Only used for display and sanity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    C,
    X,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::C => "c",
            Var::X => "x",
            Var::T => "t",
        }
    }
}

impl FromStr for Var {
    type Err = Error;
    fn from_str(s: &str) -> Result<Var> {
        match s {
            "c" => Ok(Var::C),
            "x" => Ok(Var::X),
            "t" => Ok(Var::T),
            _ => Err(Error::Parse(format!("unknown variable {s:?}"))),
        }
    }
}

/// Coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    var: Var,
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(var: Var, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        IntPoly { var, coeffs: Vec::new() }
    }

    pub fn constant(var: Var, c: BigInt) -> Self {
        IntPoly::new(var, vec![c])
    }

    /// The indeterminate itself.
    pub fn var_poly(var: Var) -> Self {
        IntPoly::new(var, vec![BigInt::zero(), BigInt::one()])
    }

    pub fn from_i64(var: Var, c: &[i64]) -> Self {
        IntPoly::new(var, c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient (0 for the zero polynomial).
    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Panics if a coefficient does not fit; meant for tests and small data.
    pub fn to_i64_vec(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| c.to_i64().expect("coefficient fits in i64")).collect()
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect();
        IntPoly::new(self.var, c)
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect();
        IntPoly::new(self.var, c)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.var, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: &BigInt) -> IntPoly {
        IntPoly::new(self.var, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero(self.var);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(self.var, out)
    }

    pub fn pow(&self, mut e: u32) -> IntPoly {
        let mut acc = IntPoly::constant(self.var, BigInt::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient over the integers. A nonzero remainder, or a
    /// non-integral quotient coefficient, is an inconsistency.
    pub fn div_exact(&self, d: &IntPoly) -> Result<IntPoly> {
        if d.is_zero() {
            return inconsistent("division by the zero polynomial");
        }
        if self.is_zero() {
            return Ok(IntPoly::zero(self.var));
        }
        let dd = d.coeffs.len() - 1;
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return inconsistent("inexact polynomial division (degree)");
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (qc, rem) = top.div_rem(&lc);
            if !rem.is_zero() {
                return inconsistent("inexact polynomial division (coefficient)");
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] -= &qc * dj;
            }
            q[k] = qc;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return inconsistent("inexact polynomial division (remainder)");
        }
        Ok(IntPoly::new(self.var, q))
    }

    pub fn derivative(&self) -> IntPoly {
        let c = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        IntPoly::new(self.var, c)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// An upper bound for `log2` of the l1 norm.
    pub fn l1_bits(&self) -> f64 {
        l1_bits(self.coeffs.iter())
    }

    /// Reduce into a finite field.
    pub fn to_field<F: Field>(&self, f: &F) -> Vec<F::Elem> {
        let mut v: Vec<F::Elem> = self.coeffs.iter().map(|c| f.from_bigint(c)).collect();
        while v.last().is_some_and(|c| f.is_zero(c)) {
            v.pop();
        }
        v
    }

    /// Compact inline form used inside bivariate polynomials, e.g. `1+c`,
    /// `-3+4c^2`. The zero polynomial is `0`.
    pub fn render_inline(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let v = self.var.name();
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if neg {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            match i {
                0 => s.push_str(&a.to_string()),
                _ => {
                    if !a.is_one() {
                        s.push_str(&a.to_string());
                    }
                    s.push_str(v);
                    if i > 1 {
                        s.push('^');
                        s.push_str(&i.to_string());
                    }
                }
            }
        }
        s
    }

    /// Inverse of [`render_inline`](Self::render_inline).
    pub fn parse_inline(var: Var, s: &str) -> Result<IntPoly> {
        let bad = || Error::Parse(format!("bad polynomial term in {s:?}"));
        let v = var.name();
        let mut coeffs: Vec<BigInt> = Vec::new();
        let s = s.trim();
        if s == "0" {
            return Ok(IntPoly::zero(var));
        }
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, t.strip_prefix('+').unwrap_or(&t)),
            };
            let (coef, deg) = match body.find(v) {
                None => (body.parse::<BigInt>().map_err(|_| bad())?, 0usize),
                Some(pos) => {
                    let c = if pos == 0 {
                        BigInt::one()
                    } else {
                        body[..pos].parse::<BigInt>().map_err(|_| bad())?
                    };
                    let rest = &body[pos + v.len()..];
                    let d = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                    };
                    (c, d)
                }
            };
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, BigInt::zero());
            }
            coeffs[deg] += coef * sign;
        }
        Ok(IntPoly::new(var, coeffs))
    }
}

/// Upper bound for `log2(sum |c_i|)`.
pub fn l1_bits<'a>(cs: impl Iterator<Item = &'a BigInt>) -> f64 {
    let mut total = BigInt::zero();
    for c in cs {
        total += c.abs();
    }
    if total.is_zero() {
        return 0.0;
    }
    // bits() over-approximates log2 by less than one.
    total.bits() as f64
}

/// Canonical text: `c: 3 4` for `4c + 3`.
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.var.name())?;
        if self.is_zero() {
            return write!(f, " 0");
        }
        for c in &self.coeffs {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

impl FromStr for IntPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<IntPoly> {
        let (v, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("missing ':' in {s:?}")))?;
        let var: Var = v.trim().parse()?;
        let coeffs = rest
            .split_whitespace()
            .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPoly::new(var, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn psi2_over_psi1() {
        // (x^4 + 2cx^2 - x + c^2 + c) / (x^2 - x + c) at c = 3
        let num = IntPoly::from_i64(Var::X, &[12, -1, 6, 0, 1]);
        let den = IntPoly::from_i64(Var::X, &[3, -1, 1]);
        assert_eq!(num.div_exact(&den).unwrap().to_i64_vec(), vec![4, 1, 1]);
        assert!(num.div_exact(&IntPoly::from_i64(Var::X, &[1, 2])).is_err());
        assert!(IntPoly::zero(Var::X).div_exact(&den).unwrap().is_zero());
    }

    #[test]
    fn text_round_trip() {
        let p = IntPoly::from_i64(Var::C, &[3, 4, 0, -7]);
        assert_eq!(p.to_string(), "c: 3 4 0 -7");
        assert_eq!(p.to_string().parse::<IntPoly>().unwrap(), p);
        assert_eq!(p.render_inline(), "3+4c-7c^3");
        assert_eq!(IntPoly::parse_inline(Var::C, "3+4c-7c^3").unwrap(), p);
        assert_eq!(IntPoly::from_i64(Var::C, &[1, 1]).render_inline(), "1+c");
        assert_eq!(IntPoly::from_i64(Var::C, &[0, -1]).render_inline(), "-c");
    }

    fn arb() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-1000i64..1000, 0..8).prop_map(|v| IntPoly::from_i64(Var::C, &v))
    }

    proptest! {
        #[test]
        fn exact_div_round_trip(p in arb(), q in arb()) {
            prop_assume!(!q.is_zero());
            prop_assert_eq!(p.mul(&q).div_exact(&q).unwrap(), p);
        }

        #[test]
        fn inline_round_trip(p in arb()) {
            prop_assert_eq!(IntPoly::parse_inline(Var::C, &p.render_inline()).unwrap(), p.clone());
            prop_assert_eq!(p.to_string().parse::<IntPoly>().unwrap(), p);
        }
    }
}
