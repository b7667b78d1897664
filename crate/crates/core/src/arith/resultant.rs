//! Resultants and discriminants over `Z` and `Z[c]`.
//!
//! Both are computed multimodularly. Over `Z[c]` each prime is handled by
//! evaluating at `deg + 1` points, taking Sylvester resultants with the
//! characteristic-zero formal degrees (so specialisation is exact at every
//! node), and interpolating.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::bipoly::BiPoly;
use crate::arith::field::{Field, PrimeField};
use crate::arith::intpoly::{IntPoly, Var};
use crate::arith::multimod::reconstruct;
use crate::arith::upoly;
use crate::budget::Budget;
use crate::error::{inconsistent, invalid, Result};

/// `log2` bound for a Sylvester determinant with the given row norms.
fn sylvester_bits(a_bits: f64, da: usize, b_bits: f64, db: usize) -> f64 {
    db as f64 * a_bits + da as f64 * b_bits
}

/// `Res(a, b)` for nonzero integer polynomials.
pub fn resultant_int(a: &IntPoly, b: &IntPoly) -> Result<BigInt> {
    let (da, db) = match (a.degree(), b.degree()) {
        (Some(x), Some(y)) => (x, y),
        _ => return invalid("resultant of the zero polynomial"),
    };
    let bits = sylvester_bits(a.l1_bits(), da, b.l1_bits(), db);
    let v = reconstruct(bits, 1, "integer resultant", &Budget::unlimited(), |fp| {
        let (pa, pb) = (a.to_field(fp), b.to_field(fp));
        Some(vec![fp.to_u64(upoly::resultant_formal(fp, &pa, da, &pb, db))])
    })?;
    Ok(v.into_iter().next().unwrap())
}

/// `disc(a) = (-1)^{d(d-1)/2} Res(a, a') / lc(a)`.
pub fn discriminant_int(a: &IntPoly) -> Result<BigInt> {
    let d = match a.degree() {
        Some(d) if d >= 1 => d,
        _ => return invalid("discriminant needs degree at least 1"),
    };
    if d == 1 {
        return Ok(BigInt::from(1));
    }
    let r = resultant_int(a, &a.derivative())?;
    let lc = a.lc();
    if !(&r % &lc).is_zero() {
        return inconsistent("Res(f, f') not divisible by lc(f)");
    }
    let q = r / lc;
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Evaluate a `Z[c]` coefficient table (already reduced) at `c0`.
fn eval_rows(fp: &PrimeField, rows: &[Vec<u64>], c0: u64) -> Vec<u64> {
    rows.iter().map(|r| upoly::eval(fp, r, &c0)).collect()
}

/// `Res_x(p, q)` as a polynomial in `c`, equal to the Sylvester determinant
/// in the outer variable.
pub fn resultant_x(p: &BiPoly, q: &BiPoly, budget: &Budget) -> Result<IntPoly> {
    let (dp, dq) = match (p.degree(), q.degree()) {
        (Some(x), Some(y)) => (x, y),
        _ => return invalid("resultant of the zero polynomial"),
    };
    let deg_c = dq * p.degree_c() + dp * q.degree_c();
    let bits = sylvester_bits(p.l1_bits(), dp, q.l1_bits(), dq);
    let work = (deg_c as u64 + 1) * ((dp + dq) as u64).pow(2);
    budget.charge(work / 64, "bivariate resultant")?;
    let coeffs = reconstruct(bits, deg_c + 1, "bivariate resultant", budget, |fp| {
        let rp = p.to_field(fp);
        let rq = q.to_field(fp);
        let xs: Vec<u64> = (0..=deg_c as u64).map(|i| fp.from_u64(i)).collect();
        let ys: Vec<u64> = xs
            .iter()
            .map(|c0| {
                let a = upoly::trim(fp, eval_rows(fp, &rp, *c0));
                let b = upoly::trim(fp, eval_rows(fp, &rq, *c0));
                upoly::resultant_formal(fp, &a, dp, &b, dq)
            })
            .collect();
        let mut r = upoly::interpolate(fp, &xs, &ys);
        r.resize(deg_c + 1, 0);
        Some(r.iter().map(|v| fp.to_u64(*v)).collect())
    })?;
    Ok(IntPoly::new(Var::C, coeffs))
}

/// `disc_x(p)` in `Z[c]`.
pub fn discriminant_x(p: &BiPoly, budget: &Budget) -> Result<IntPoly> {
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return invalid("discriminant needs degree at least 1"),
    };
    let r = resultant_x(p, &p.derivative(), budget)?;
    let q = r.div_exact(&p.lc())?;
    Ok(if (d * (d - 1) / 2) % 2 == 1 { q.neg() } else { q })
}
