//! Dynatomic polynomials, multiplier polynomials and their factors for the
//! family `f_c(x) = x^m + c`.
//!
//! Everything that involves `delta_n` goes through the identity
//! `Res_x(Phi_n, t - lambda_n) = delta_n(t, c)^n`, which holds exactly because
//! `Phi_n` is monic in `x`. At a specialised `c0` the multiplier is
//! `lambda_n = (f^n)'(x)` reduced modulo `Phi_n(x, c0)`, so one node costs one
//! Euclidean resultant. Characteristic zero results are assembled from many
//! word-sized primes with rigorous size bounds; `Delta_{n,n}` modulo a small
//! prime is interpolated over `F_{p^k}`, one node per Frobenius orbit.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::arith::bipoly::BiPoly;
use crate::arith::factor::{factor_integer, FactorTable};
use crate::arith::field::{Field, PrimeField, ZechField};
use crate::arith::intpoly::{IntPoly, Var};
use crate::arith::multimod::reconstruct;
use crate::arith::ntheory::{cyclotomic, divisors, is_prime_u64, mobius, nu};
use crate::arith::resultant::{discriminant_int, resultant_int, resultant_x};
use crate::arith::roots::ModPoly;
use crate::arith::upoly::{self, Poly};
use crate::budget::Budget;
use crate::error::{inconsistent, invalid, Error, Result};
use crate::par;

/// The family `x^m + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    m: u64,
}

/// Largest `m^n` accepted; beyond this nothing here is computable anyway.
const MAX_DEGREE: u64 = 1 << 24;

impl Family {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return invalid(format!("degree m = {m} must be at least 2"));
        }
        Ok(Family { m })
    }

    pub fn quadratic() -> Self {
        Family { m: 2 }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    fn check_n(&self, n: u64) -> Result<()> {
        if n == 0 {
            return invalid("period n must be at least 1");
        }
        match self.m.checked_pow(n as u32) {
            Some(d) if n < 64 && d <= MAX_DEGREE => Ok(()),
            _ => invalid(format!("m^n = {}^{} is too large", self.m, n)),
        }
    }

    /// `deg_x Phi_n`.
    pub fn nu(&self, n: u64) -> u64 {
        nu(n, self.m)
    }

    /// Number of period `n` orbits, `deg_t delta_n`.
    pub fn r(&self, n: u64) -> u64 {
        self.nu(n) / n
    }

    /// `deg_c delta_n(1, c) = nu(n) (m - 1) / m`.
    pub fn delta_one_degree(&self, n: u64) -> u64 {
        self.nu(n) * (self.m - 1) / self.m
    }

    /// Leading coefficient of `delta_n(1, c)` in `c`:
    /// `(-1)^{r + nu (m-1)} m^nu`.
    pub fn delta_one_lc(&self, n: u64) -> BigInt {
        let nu = self.nu(n);
        let v = BigInt::from(self.m).pow(nu as u32);
        if (self.r(n) + nu * (self.m - 1)) % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// `f_c^n(x)`.
    pub fn iterate(&self, n: u64) -> Result<BiPoly> {
        self.check_n(n)?;
        let f = |y: &BiPoly| bipow(y, self.m).add(&BiPoly::c(Var::X));
        let mut y = BiPoly::outer_var(Var::X);
        for _ in 0..n {
            y = f(&y);
        }
        Ok(y)
    }

    /// `Psi_n = f_c^n(x) - x`.
    pub fn psi(&self, n: u64) -> Result<BiPoly> {
        Ok(self.iterate(n)?.sub(&BiPoly::outer_var(Var::X)))
    }

    /// `Phi_n = prod_{d | n} Psi_d^{mu(n/d)}`.
    pub fn phi(&self, n: u64) -> Result<BiPoly> {
        self.check_n(n)?;
        let mut num = BiPoly::one(Var::X);
        let mut den = BiPoly::one(Var::X);
        for d in divisors(n) {
            match mobius(n / d)? {
                1 => num = num.mul(&self.psi(d)?),
                -1 => den = den.mul(&self.psi(d)?),
                _ => {}
            }
        }
        let phi = num.div_exact(&den)?;
        if phi.degree() != Some(self.nu(n) as usize) {
            return inconsistent("deg_x Phi_n differs from nu(n)");
        }
        Ok(phi)
    }

    /// `lambda_n = (f_c^n)'(x)`.
    pub fn multiplier_lambda(&self, n: u64) -> Result<BiPoly> {
        Ok(self.iterate(n)?.derivative())
    }

    /// `log2` bound on the l1 norm of `Res_x(Phi_n, t - lambda_n)` over all
    /// monomials in `t` and `c`, from the row norms of the Sylvester matrix.
    fn res_bits(&self, n: u64) -> Result<f64> {
        let phi = self.phi(n)?;
        let lam = self.multiplier_lambda(n)?;
        let dl = lam.degree().unwrap_or(0) as f64;
        Ok(dl * phi.l1_bits() + self.nu(n) as f64 * (lam.l1_bits() + 1.0))
    }

    /// `delta_n(t, c)`, monic of degree `r(n)` in `t`.
    pub fn delta(&self, n: u64, budget: &Budget) -> Result<BiPoly> {
        self.check_n(n)?;
        let nu = self.nu(n) as usize;
        let r = self.r(n) as usize;
        let dc = self.delta_one_degree(n) as usize;
        // |coeff| <= 2^{deg_t + deg_c} M(delta), M(delta)^n = M(T) <= |T|_1
        let bits = (r + dc) as f64 + self.res_bits(n)? / n as f64 + 1.0;
        budget.charge(((dc + 1) * (nu + 1) * nu * nu) as u64 / 64, "multiplier polynomial")?;
        let m = self.m;
        let flat = reconstruct(bits, (r + 1) * (dc + 1), "multiplier polynomial", budget, |fp| {
            let cs: Vec<u64> = (0..=dc as u64).map(|i| fp.from_u64(i)).collect();
            let ts: Vec<u64> = (0..=nu as u64).map(|i| fp.from_u64(i)).collect();
            // rows[j][i] = coefficient of t^j at c = cs[i]
            let mut rows = vec![Vec::with_capacity(dc + 1); r + 1];
            for c0 in &cs {
                let node = Node::new(fp, m, n, c0)?;
                let vals: Vec<u64> = ts.iter().map(|t0| node.res_t(fp, t0)).collect();
                let big_t = upoly::interpolate(fp, &ts, &vals);
                let (u, root) = upoly::nth_root(fp, &big_t, n)?;
                if u != fp.one() || root.len() != r + 1 {
                    return None;
                }
                for (j, v) in root.into_iter().enumerate() {
                    rows[j].push(v);
                }
            }
            let mut out = Vec::with_capacity((r + 1) * (dc + 1));
            for row in rows {
                let mut poly = upoly::interpolate(fp, &cs, &row);
                poly.resize(dc + 1, fp.zero());
                out.extend(poly.into_iter().map(|v| fp.to_u64(v)));
            }
            Some(out)
        })?;
        let coeffs =
            flat.chunks(dc + 1).map(|ch| IntPoly::new(Var::C, ch.to_vec())).collect::<Vec<_>>();
        let d = BiPoly::new(Var::T, coeffs);
        if d.degree() != Some(r) || !d.lc().coeffs().iter().eq([BigInt::one()].iter()) {
            return inconsistent("multiplier polynomial is not monic of degree r(n)");
        }
        Ok(d)
    }

    /// `delta_n(1, c)`.
    pub fn delta_one(&self, n: u64, budget: &Budget) -> Result<IntPoly> {
        self.check_n(n)?;
        let dc = self.delta_one_degree(n) as usize;
        let bits = dc as f64 + self.res_bits(n)? / n as f64 + 1.0;
        let nodes = n as usize * dc + 1;
        let nu = self.nu(n);
        budget.charge(nodes as u64 * nu * nu / 64, "delta_n(1, c)")?;
        let lc = self.delta_one_lc(n);
        let m = self.m;
        let coeffs = reconstruct(bits, dc + 1, "delta_n(1, c)", budget, |fp| {
            let xs: Vec<u64> = (0..nodes as u64).map(|i| fp.from_u64(i)).collect();
            let mut ys = Vec::with_capacity(nodes);
            for c0 in &xs {
                ys.push(Node::new(fp, m, n, c0)?.res_one(fp));
            }
            let big_r = upoly::interpolate(fp, &xs, &ys);
            let root = root_with_lc(fp, &big_r, n, &fp.from_bigint(&lc)).ok()?;
            let mut root = root;
            root.resize(dc + 1, fp.zero());
            Some(root.into_iter().map(|v| fp.to_u64(v)).collect())
        })?;
        let d = IntPoly::new(Var::C, coeffs);
        if d.degree() != Some(dc) || d.lc() != lc {
            return inconsistent("delta_n(1, c) has the wrong leading term");
        }
        Ok(d)
    }

    /// `Delta_{n,d}`: `Res_t(C_{n/d}(t), delta_d(t, c))` for `d < n`, and the
    /// exact quotient of `delta_n(1, c)` by the others for `d = n`.
    pub fn delta_factor(&self, n: u64, d: u64, budget: &Budget) -> Result<IntPoly> {
        self.check_n(n)?;
        if d == 0 || n % d != 0 {
            return invalid(format!("{d} does not divide {n}"));
        }
        if d < n {
            let cyc = cyclotomic(n / d)?;
            let cyc = BiPoly::new(Var::T, cyc.coeffs().iter().map(|a| IntPoly::constant(Var::C, a.clone())).collect());
            return resultant_x(&cyc, &self.delta(d, budget)?, budget);
        }
        let mut q = self.delta_one(n, budget)?;
        for e in divisors(n) {
            if e < n {
                q = q.div_exact(&self.delta_factor(n, e, budget)?)?;
            }
        }
        Ok(q)
    }

    /// All `Delta_{n,d}` for `d | n`, keyed by `d`.
    pub fn delta_factors(&self, n: u64, budget: &Budget) -> Result<BTreeMap<u64, IntPoly>> {
        self.check_n(n)?;
        let ds: Vec<u64> = divisors(n).into_iter().filter(|&d| d < n).collect();
        let parts = par::map_slice(&ds, |&d| self.delta_factor(n, d, budget));
        let mut out = BTreeMap::new();
        let mut q = self.delta_one(n, budget)?;
        for (d, p) in ds.into_iter().zip(parts) {
            let p = p?;
            q = q.div_exact(&p)?;
            out.insert(d, p);
        }
        out.insert(n, q);
        Ok(out)
    }

    /// `Delta_{n,d}` for `d < n` only (cheap even when `delta_n` is not).
    pub fn satellite_factors(&self, n: u64, budget: &Budget) -> Result<BTreeMap<u64, IntPoly>> {
        self.check_n(n)?;
        let ds: Vec<u64> = divisors(n).into_iter().filter(|&d| d < n).collect();
        let parts = par::map_slice(&ds, |&d| self.delta_factor(n, d, budget));
        ds.into_iter().zip(parts).map(|(d, p)| p.map(|p| (d, p))).collect()
    }

    /// Discriminants and resultants of the `Delta_{n,d}`, factored with the
    /// given trial division bound.
    pub fn discriminant_table(&self, n: u64, trial_bound: u64, budget: &Budget) -> Result<DiscriminantTable> {
        let factors = self.delta_factors(n, budget)?;
        let ds: Vec<u64> = factors.keys().copied().collect();
        let mut keys = Vec::new();
        for (i, &e) in ds.iter().enumerate() {
            for &d in &ds[i..] {
                keys.push((e, d));
            }
        }
        let values = par::map_slice(&keys, |&(e, d)| -> Result<(BigInt, FactorTable)> {
            let v = if e == d {
                let p = &factors[&d];
                if p.degree().unwrap_or(0) <= 1 {
                    return Ok((BigInt::one(), FactorTable::unit()));
                }
                discriminant_int(p)?
            } else {
                let r = resultant_int(&factors[&e], &factors[&d])?;
                &r * &r
            };
            if v.is_zero() {
                return inconsistent(format!("entry ({e},{d}) vanishes"));
            }
            let t = factor_integer(&v, trial_bound)?;
            Ok((v, t))
        });
        let mut entries = BTreeMap::new();
        let mut raw = BTreeMap::new();
        for (k, v) in keys.into_iter().zip(values) {
            let (v, t) = v?;
            raw.insert(k, v);
            entries.insert(k, t);
        }
        Ok(DiscriminantTable { n, m: self.m, factors, values: raw, entries })
    }

    /// `Delta_{n,n} mod p` without characteristic-zero `delta_n`.
    ///
    /// `R(c) = delta_n(1, c)^n mod p` is interpolated over `F_{p^k}` with one
    /// extra node as an overflow check, its coefficients must lie in `F_p`,
    /// the monic `n`-th root is extracted and scaled by the known leading
    /// coefficient, and the satellite factors are divided out exactly.
    pub fn delta_nn_mod_p(&self, n: u64, p: u64, budget: &Budget) -> Result<ModPoly> {
        self.check_n(n)?;
        if p == 2 || !is_prime_u64(p) {
            return invalid(format!("{p} is not an odd prime"));
        }
        if self.m % p == 0 {
            return invalid(format!("p = {p} divides m = {}", self.m));
        }
        let fp = PrimeField::new(p)?;
        let one_r = self.delta_one_mod_p(n, &fp, budget)?;
        let mut q = one_r;
        for (d, g) in self.satellite_factors(n, budget)? {
            let g = g.to_field(&fp);
            if g.is_empty() {
                return inconsistent(format!("Delta_{{{n},{d}}} vanishes mod {p}"));
            }
            q = upoly::div_exact(&fp, &q, &g)
                .ok_or_else(|| Error::Inconsistent(format!("Delta_{{{n},{d}}} does not divide delta_{n}(1,c) mod {p}")))?;
        }
        Ok(ModPoly::from_elems(&fp, Var::C, &q))
    }

    /// `delta_n(1, c) mod p` in Montgomery form over `fp`.
    pub fn delta_one_mod_p(&self, n: u64, fp: &PrimeField, budget: &Budget) -> Result<Poly<PrimeField>> {
        let p = fp.modulus();
        let dc = self.delta_one_degree(n) as usize;
        let count = n as usize * dc + 2;
        let r = if p as usize >= count {
            self.res_one_samples(fp, n, count, budget)?
        } else {
            let mut k = 1u32;
            while (p as u128).pow(k) < count as u128 {
                k += 1;
            }
            if (p as u128).pow(k) > ZechField::MAX_ORDER as u128 {
                return Err(Error::InvalidInput(format!(
                    "need {count} interpolation nodes but F_{p}^{k} exceeds the supported field size"
                )));
            }
            let z = ZechField::new(p, k)?;
            self.res_one_samples(&z, n, count, budget)?
        };
        let r: Poly<PrimeField> = r.iter().map(|&v| fp.from_u64(v)).collect();
        let lc = fp.from_bigint(&self.delta_one_lc(n));
        root_with_lc(fp, &upoly::trim(fp, r), n, &lc)
    }

    /// Coefficients (plain residues) of `R(c) = delta_n(1, c)^n mod p`,
    /// interpolated from at least `count` nodes of `F`.
    fn res_one_samples<F: Field>(&self, f: &F, n: u64, count: usize, budget: &Budget) -> Result<Vec<u64>> {
        let nu = self.nu(n);
        let orbits = frobenius_orbits(f, count)?;
        budget.charge(orbits.len() as u64 * nu * nu / 64, "delta_n(1, c) mod p")?;
        let m = self.m;
        let vals = par::map_slice(&orbits, |orb| Node::new(f, m, n, &orb[0]).map(|nd| nd.res_one(f)));
        let mut xs = Vec::with_capacity(count + 8);
        let mut ys = Vec::with_capacity(count + 8);
        for (orb, v) in orbits.iter().zip(vals) {
            let mut v = v.ok_or_else(|| Error::Inconsistent("Psi_d does not divide exactly".into()))?;
            for x in orb {
                xs.push(x.clone());
                ys.push(v.clone());
                v = f.frobenius(&v);
            }
        }
        let poly = upoly::interpolate(f, &xs, &ys);
        if poly.len() >= count {
            return inconsistent("interpolation degree overflow for delta_n(1, c)^n");
        }
        poly.iter()
            .map(|c| f.to_prime(c).ok_or_else(|| Error::Inconsistent("coefficient outside the prime field".into())))
            .collect()
    }
}

/// `y^e` for a bivariate polynomial.
fn bipow(y: &BiPoly, mut e: u64) -> BiPoly {
    let mut acc = BiPoly::one(y.outer());
    let mut base = y.clone();
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

/// Write `a = u * g^n` with `g` monic, check `u = lc^n` and return `lc * g`.
fn root_with_lc<F: Field>(f: &F, a: &[F::Elem], n: u64, lc: &F::Elem) -> Result<Poly<F>> {
    let (u, g) = upoly::nth_root(f, a, n)
        .ok_or_else(|| Error::Inconsistent(format!("resultant is not an {n}-th power")))?;
    if u != f.pow(lc, n) {
        return inconsistent("leading coefficient of delta_n(1, c) does not match");
    }
    Ok(upoly::scale(f, &g, lc))
}

/// Distinct elements of `F` covering at least `count` points, grouped into
/// full Frobenius orbits (first element of each orbit is the representative).
pub(crate) fn frobenius_orbits<F: Field>(f: &F, count: usize) -> Result<Vec<Vec<F::Elem>>> {
    let q = f.order_u64().unwrap_or(u64::MAX);
    let mut seen: HashSet<F::Elem> = HashSet::new();
    let mut out = Vec::new();
    let mut total = 0;
    let mut i = 0u64;
    while total < count {
        if i >= q {
            return invalid(format!("field of order {q} has fewer than {count} interpolation nodes"));
        }
        let e = f.element(i);
        i += 1;
        if seen.contains(&e) {
            continue;
        }
        let mut orb = vec![e.clone()];
        let mut x = f.frobenius(&e);
        while x != e {
            orb.push(x.clone());
            x = f.frobenius(&x);
        }
        for x in &orb {
            seen.insert(x.clone());
        }
        total += orb.len();
        out.push(orb);
    }
    Ok(out)
}

/// `Phi_n(x, c0)` and `lambda_n mod Phi_n` over a field.
struct Node<F: Field> {
    phi: Poly<F>,
    lam: Poly<F>,
}

impl<F: Field> Node<F> {
    fn new(f: &F, m: u64, n: u64, c0: &F::Elem) -> Option<Self> {
        let x = upoly::x(f);
        let mut y = x.clone();
        let mut num = vec![f.one()];
        let mut den = vec![f.one()];
        for d in 1..=n {
            y = upoly::pow(f, &y, m);
            y[0] = f.add(&y[0], c0);
            if n % d == 0 {
                match mobius(n / d).ok()? {
                    1 => num = upoly::mul(f, &num, &upoly::sub(f, &y, &x)),
                    -1 => den = upoly::mul(f, &den, &upoly::sub(f, &y, &x)),
                    _ => {}
                }
            }
        }
        let phi = upoly::div_exact(f, &num, &den)?;
        let lam = upoly::rem(f, &upoly::derivative(f, &y), &phi);
        Some(Node { phi, lam })
    }

    /// `Res(Phi_n(x, c0), t0 - lambda)`.
    fn res_t(&self, f: &F, t0: &F::Elem) -> F::Elem {
        let g = upoly::sub(f, &upoly::constant(f, t0.clone()), &self.lam);
        upoly::resultant(f, &self.phi, &g)
    }

    fn res_one(&self, f: &F) -> F::Elem {
        self.res_t(f, &f.one())
    }
}

/// Discriminants `D_{n,d}` and squared resultants `R_{n,e,d}^2` of the
/// factors `Delta_{n,d}`, keyed `(d, d)` and `(e, d)` with `e < d`.
#[derive(Clone, Debug)]
pub struct DiscriminantTable {
    pub n: u64,
    pub m: u64,
    pub factors: BTreeMap<u64, IntPoly>,
    pub values: BTreeMap<(u64, u64), BigInt>,
    pub entries: BTreeMap<(u64, u64), FactorTable>,
}

impl DiscriminantTable {
    pub fn entry(&self, e: u64, d: u64) -> Option<&FactorTable> {
        self.entries.get(&(e, d))
    }

    /// `v_p` of an entry (`None` if the entry is absent or `p` is hidden in
    /// an unfactored cofactor).
    pub fn valuation(&self, e: u64, d: u64, p: u64) -> Option<u32> {
        let v = self.values.get(&(e, d))?;
        let pb = BigInt::from(p);
        let mut x = v.abs();
        let mut k = 0;
        while x > BigInt::zero() && (&x % &pb).is_zero() {
            x /= &pb;
            k += 1;
        }
        Some(k)
    }

    /// `prod D_{n,d} * prod R_{n,e,d}^2`, equal to `D_n` up to sign.
    pub fn product(&self) -> BigInt {
        self.values.values().fold(BigInt::one(), |acc, v| acc * v)
    }

    /// Plain text rows `(e,d) | factorisation`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for ((e, d), t) in &self.entries {
            s.push_str(&format!("({e},{d}) | {t}\n"));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .entries
            .iter()
            .map(|((e, d), t)| json!({"e": e, "d": d, "value": t.to_json(), "text": t.to_string()}))
            .collect();
        json!({"n": self.n, "m": self.m, "entries": rows})
    }

    /// Every prime listed in any entry, as machine integers where they fit.
    pub fn primes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .entries
            .values()
            .flat_map(|t| t.factors.iter().filter_map(|(p, _)| p.to_u64()))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}
