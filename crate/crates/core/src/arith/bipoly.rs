//! Polynomials in an outer variable (`x` or `t`) with coefficients in `Z[c]`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::field::Field;
use crate::arith::intpoly::{IntPoly, Var};
use crate::error::{inconsistent, Error, Result};

/// `sum_i coeffs[i](c) * outer^i`, no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiPoly {
    outer: Var,
    coeffs: Vec<IntPoly>,
}

impl BiPoly {
    pub fn new(outer: Var, coeffs: Vec<IntPoly>) -> Self {
        let mut coeffs: Vec<IntPoly> = coeffs.into_iter().map(|p| p.with_var(Var::C)).collect();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        BiPoly { outer, coeffs }
    }

    pub fn zero(outer: Var) -> Self {
        BiPoly { outer, coeffs: Vec::new() }
    }

    pub fn one(outer: Var) -> Self {
        BiPoly::constant(outer, IntPoly::constant(Var::C, BigInt::one()))
    }

    /// A polynomial in `c` only.
    pub fn constant(outer: Var, c: IntPoly) -> Self {
        BiPoly::new(outer, vec![c])
    }

    /// The outer variable itself.
    pub fn outer_var(outer: Var) -> Self {
        BiPoly::new(outer, vec![IntPoly::zero(Var::C), IntPoly::constant(Var::C, BigInt::one())])
    }

    /// The inner variable `c`.
    pub fn c(outer: Var) -> Self {
        BiPoly::constant(outer, IntPoly::var_poly(Var::C))
    }

    /// Build from a table of small integers, `rows[i][j]` the coefficient of
    /// `outer^i c^j`.
    pub fn from_i64(outer: Var, rows: &[&[i64]]) -> Self {
        BiPoly::new(outer, rows.iter().map(|r| IntPoly::from_i64(Var::C, r)).collect())
    }

    pub fn outer(&self) -> Var {
        self.outer
    }

    pub fn with_outer(mut self, v: Var) -> Self {
        self.outer = v;
        self
    }

    pub fn coeffs(&self) -> &[IntPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> IntPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| IntPoly::zero(Var::C))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in the outer variable.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Largest degree in `c` over all coefficients.
    pub fn degree_c(&self) -> usize {
        self.coeffs.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Leading coefficient in the outer variable.
    pub fn lc(&self) -> IntPoly {
        self.coeffs.last().cloned().unwrap_or_else(|| IntPoly::zero(Var::C))
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        BiPoly::new(self.outer, (0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        BiPoly::new(self.outer, (0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly::new(self.outer, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn scale(&self, s: &IntPoly) -> BiPoly {
        BiPoly::new(self.outer, self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        if self.is_zero() || o.is_zero() {
            return BiPoly::zero(self.outer);
        }
        let mut out = vec![IntPoly::zero(Var::C); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        BiPoly::new(self.outer, out)
    }

    /// Exact quotient in `Z[c][outer]`; any remainder is an inconsistency.
    pub fn div_exact(&self, d: &BiPoly) -> Result<BiPoly> {
        if d.is_zero() {
            return inconsistent("division by the zero polynomial");
        }
        if self.is_zero() {
            return Ok(BiPoly::zero(self.outer));
        }
        let dd = d.coeffs.len() - 1;
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return inconsistent("inexact bivariate division (degree)");
        }
        let mut q = vec![IntPoly::zero(Var::C); r.len() - dd];
        for k in (0..q.len()).rev() {
            if r[k + dd].is_zero() {
                continue;
            }
            let qc = r[k + dd].div_exact(&lc)?;
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] = r[k + j].sub(&qc.mul(dj));
            }
            q[k] = qc;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return inconsistent("inexact bivariate division (remainder)");
        }
        Ok(BiPoly::new(self.outer, q))
    }

    /// Partial derivative in the outer variable.
    pub fn derivative(&self) -> BiPoly {
        BiPoly::new(
            self.outer,
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&BigInt::from(i))).collect(),
        )
    }

    /// Partial derivative in `c`.
    pub fn derivative_c(&self) -> BiPoly {
        BiPoly::new(self.outer, self.coeffs.iter().map(|c| c.derivative()).collect())
    }

    /// Specialise `c = c0`, giving a polynomial in the outer variable.
    pub fn eval_c(&self, c0: &BigInt) -> IntPoly {
        IntPoly::new(self.outer, self.coeffs.iter().map(|p| p.eval(c0)).collect())
    }

    /// Specialise the outer variable, giving a polynomial in `c`.
    pub fn eval_outer(&self, x0: &BigInt) -> IntPoly {
        let mut acc = IntPoly::zero(Var::C);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x0).add(c);
        }
        acc
    }

    /// Substitute `outer = g(c)`.
    pub fn compose_outer(&self, g: &IntPoly) -> IntPoly {
        let mut acc = IntPoly::zero(Var::C);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(c);
        }
        acc
    }

    /// Reduce every coefficient into `F`, as a vector of `F[c]` polynomials.
    pub fn to_field<F: Field>(&self, f: &F) -> Vec<Vec<F::Elem>> {
        self.coeffs.iter().map(|p| p.to_field(f)).collect()
    }

    /// Bound for `log2` of the l1 norm over all monomials.
    pub fn l1_bits(&self) -> f64 {
        crate::arith::intpoly::l1_bits(self.coeffs.iter().flat_map(|p| p.coeffs().iter()))
    }

    /// Swap roles: view as a polynomial in `c` with coefficients in `Z[outer]`,
    /// returned as rows indexed by the power of `c`.
    pub fn transpose(&self) -> Vec<IntPoly> {
        let dc = self.degree_c();
        let mut rows = vec![vec![BigInt::zero(); self.coeffs.len()]; dc + 1];
        for (i, p) in self.coeffs.iter().enumerate() {
            for (j, a) in p.coeffs().iter().enumerate() {
                rows[j][i] = a.clone();
            }
        }
        rows.into_iter().map(|r| IntPoly::new(self.outer, r)).collect()
    }
}

/// Canonical text: `x: 1+c 1 1` for `x^2 + x + c + 1`.
impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.outer.name())?;
        if self.is_zero() {
            return write!(f, " 0");
        }
        for c in &self.coeffs {
            write!(f, " {}", c.render_inline())?;
        }
        Ok(())
    }
}

impl FromStr for BiPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<BiPoly> {
        let (v, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("missing ':' in {s:?}")))?;
        let outer: Var = v.trim().parse()?;
        let coeffs = rest
            .split_whitespace()
            .map(|t| IntPoly::parse_inline(Var::C, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(BiPoly::new(outer, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format() {
        // x^2 + x + c + 1
        let p = BiPoly::from_i64(Var::X, &[&[1, 1], &[1], &[1]]);
        assert_eq!(p.to_string(), "x: 1+c 1 1");
        assert_eq!("x: 1+c 1 1".parse::<BiPoly>().unwrap(), p);
    }

    #[test]
    fn psi2_div_psi1() {
        let psi2 = BiPoly::from_i64(Var::X, &[&[0, 1, 1], &[-1], &[0, 2], &[], &[1]]);
        let psi1 = BiPoly::from_i64(Var::X, &[&[0, 1], &[-1], &[1]]);
        let q = psi2.div_exact(&psi1).unwrap();
        assert_eq!(q, BiPoly::from_i64(Var::X, &[&[1, 1], &[1], &[1]]));
        assert!(psi1.div_exact(&q).is_err());
    }
}
