//! Value types for polynomials modulo `p` and their roots.
//!
//! [`ModPoly`] is a polynomial over `F_p` with plain residues in `[0, p)`,
//! convenient for storage and display. [`Fq`] is an element of `F_{p^k}`
//! described by its own modulus, which is how roots in the splitting field
//! are reported.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::field::{Field, PrimeField};
use crate::arith::intpoly::Var;
use crate::arith::upoly;
use crate::error::{invalid, Error, Result};

/// Polynomial over `F_p`, coefficients in `[0, p)`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModPoly {
    pub p: u64,
    pub var: Var,
    pub coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: u64, var: Var, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { p, var, coeffs }
    }

    pub fn from_i64(p: u64, var: Var, c: &[i64]) -> Self {
        ModPoly::new(p, var, c.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect())
    }

    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.p)
    }

    /// Montgomery form coefficients for arithmetic in [`PrimeField`].
    pub fn to_elems(&self, f: &PrimeField) -> Vec<u64> {
        self.coeffs.iter().map(|&c| f.from_u64(c)).collect()
    }

    pub fn from_elems(f: &PrimeField, var: Var, a: &[u64]) -> Self {
        ModPoly::new(f.modulus(), var, a.iter().map(|&c| f.to_u64(c)).collect())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self) -> Result<ModPoly> {
        let f = self.field()?;
        Ok(ModPoly::from_elems(&f, self.var, &upoly::derivative(&f, &self.to_elems(&f))))
    }

    /// Order of vanishing at `r` (0 if `r` is not a root). Zero polynomial
    /// gives `usize::MAX`.
    pub fn valuation_at(&self, r: u64) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let f = PrimeField::new(self.p).expect("prime modulus");
        upoly::root_multiplicity(&f, &self.to_elems(&f), &f.from_u64(r))
    }
}

/// Text form `c mod 31: 3 0 1`.
impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}:", self.var.name(), self.p)?;
        if self.coeffs.is_empty() {
            return write!(f, " 0");
        }
        for c in &self.coeffs {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

impl FromStr for ModPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<ModPoly> {
        let bad = || Error::Parse(format!("bad modular polynomial {s:?}"));
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        let (v, p) = head.split_once(" mod ").ok_or_else(bad)?;
        let var: Var = v.trim().parse()?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let coeffs = rest.split_whitespace().map(|t| t.parse::<u64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
        if p < 2 || coeffs.iter().any(|&c| c >= p) {
            return Err(bad());
        }
        Ok(ModPoly::new(p, var, coeffs))
    }
}

/// Monic gcd over `F_p`.
pub fn gcd_mod(a: &ModPoly, b: &ModPoly) -> Result<ModPoly> {
    if a.p != b.p {
        return invalid(format!("gcd of polynomials over F_{} and F_{}", a.p, b.p));
    }
    let f = a.field()?;
    let g = upoly::gcd(&f, &a.to_elems(&f), &b.to_elems(&f));
    Ok(ModPoly::from_elems(&f, a.var, &g))
}

/// Element of `F_p[z]/(modulus)`, the modulus monic irreducible of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fq {
    pub p: u64,
    pub k: usize,
    pub modulus: Vec<u64>,
    pub value: Vec<u64>,
}

/// One root of a polynomial in its splitting field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Root {
    pub root: Fq,
    pub multiplicity: u64,
}

impl Root {
    /// The root as an element of `F_p` when `k = 1`.
    pub fn as_prime(&self) -> Option<u64> {
        (self.root.k == 1).then(|| self.root.value.first().copied().unwrap_or(0))
    }
}

/// All roots of `a` in `F_p`-bar with multiplicities. Roots of the same
/// irreducible factor `h` (of degree `k`) are the Frobenius conjugates
/// `z^{p^j}` in `F_p[z]/(h)`.
pub fn roots_mod_p(a: &ModPoly) -> Result<Vec<Root>> {
    if a.is_zero() {
        return invalid("roots of the zero polynomial");
    }
    let f = a.field()?;
    let mut out = Vec::new();
    let mut factors = upoly::factor(&f, &a.to_elems(&f));
    factors.sort_by(|x, y| {
        x.0.len().cmp(&y.0.len()).then_with(|| {
            let xv: Vec<u64> = x.0.iter().map(|&c| f.to_u64(c)).collect();
            let yv: Vec<u64> = y.0.iter().map(|&c| f.to_u64(c)).collect();
            xv.cmp(&yv)
        })
    });
    for (h, e) in factors {
        let k = h.len() - 1;
        let modulus: Vec<u64> = h.iter().map(|&c| f.to_u64(c)).collect();
        if k == 1 {
            let r = f.to_u64(f.neg(&h[0]));
            out.push(Root { root: Fq { p: a.p, k, modulus, value: vec![r] }, multiplicity: e });
            continue;
        }
        let mut z = upoly::x(&f);
        for _ in 0..k {
            let mut value: Vec<u64> = z.iter().map(|&c| f.to_u64(c)).collect();
            value.resize(k, 0);
            out.push(Root { root: Fq { p: a.p, k, modulus: modulus.clone(), value }, multiplicity: e });
            z = upoly::powmod(&f, &z, a.p, &h);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn x2_plus_1() {
        let r5 = roots_mod_p(&ModPoly::from_i64(5, Var::X, &[1, 0, 1])).unwrap();
        let mut v: Vec<u64> = r5.iter().filter_map(|r| r.as_prime()).collect();
        v.sort();
        assert_eq!(v, vec![2, 3]);
        let r7 = roots_mod_p(&ModPoly::from_i64(7, Var::X, &[1, 0, 1])).unwrap();
        assert_eq!(r7.len(), 2);
        assert!(r7.iter().all(|r| r.root.k == 2));
        assert_ne!(r7[0].root, r7[1].root);
    }

    #[test]
    fn multiplicities_at_0_and_minus_2() {
        let p = 31;
        let f = PrimeField::new(p).unwrap();
        let c = vec![f.zero(), f.one()];
        let c2 = vec![f.from_u64(2), f.one()];
        let g = vec![f.from_u64(3), f.one(), f.one()];
        let a = upoly::mul(&f, &upoly::mul(&f, &upoly::pow(&f, &c, 5), &upoly::pow(&f, &c2, 2)), &g);
        let roots = roots_mod_p(&ModPoly::from_elems(&f, Var::C, &a)).unwrap();
        assert!(roots.iter().any(|r| r.as_prime() == Some(0) && r.multiplicity == 5));
        assert!(roots.iter().any(|r| r.as_prime() == Some(p - 2) && r.multiplicity == 2));
    }

    #[test]
    fn gcd_examples() {
        let a = ModPoly::from_i64(5, Var::X, &[-1, 0, 1]);
        let b = ModPoly::from_i64(5, Var::X, &[-1, 1]);
        assert_eq!(gcd_mod(&a, &b).unwrap(), b);
        assert_eq!(gcd_mod(&a, &ModPoly::new(5, Var::X, vec![])).unwrap(), a);
        assert!(gcd_mod(&a, &ModPoly::from_i64(7, Var::X, &[1])).is_err());
    }

    proptest! {
        #[test]
        fn roots_reconstruct(c in prop::collection::vec(0u64..11, 2..9)) {
            let a = ModPoly::new(11, Var::X, c);
            prop_assume!(a.degree().unwrap_or(0) >= 1);
            let f = a.field().unwrap();
            let roots = roots_mod_p(&a).unwrap();
            // product of (x - root)^e, grouped by minimal polynomial, times a
            // cofactor without roots must give back a
            let mut prod = vec![f.one()];
            let mut seen: Vec<Vec<u64>> = Vec::new();
            for r in &roots {
                if seen.contains(&r.root.modulus) {
                    continue;
                }
                seen.push(r.root.modulus.clone());
                let h: Vec<u64> = r.root.modulus.iter().map(|&v| f.from_u64(v)).collect();
                prod = upoly::mul(&f, &prod, &upoly::pow(&f, &h, r.multiplicity));
                let conj = roots.iter().filter(|s| s.root.modulus == r.root.modulus).count();
                prop_assert_eq!(conj, r.root.k);
            }
            let elems = a.to_elems(&f);
            prop_assert!(prod.len() <= elems.len());
            prop_assert_eq!(upoly::degree::<PrimeField>(&prod).unwrap_or(0) as usize,
                roots.iter().map(|r| r.multiplicity as usize).sum::<usize>());
            prop_assert!(upoly::div_exact(&f, &elems, &prod).is_some());
        }
    }
}
