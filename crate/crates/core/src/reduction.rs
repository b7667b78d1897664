//! Good and bad reduction of `Y_1(n)` and `Y_0(n)` modulo a prime.
//!
//! [`Classifier`] gathers the `p`-adic valuations of the discriminants
//! `D_{n,d}` and resultants `R_{n,e,d}`, either exactly from characteristic
//! zero or from `Delta_{n,n} mod p` (with a lift to `Z/p^2` when needed), and
//! applies every reduction criterion whose hypotheses it can check.
//! [`singularity_test`] looks for singular points of `Phi_n = 0` over
//! `F_p`-bar directly, and [`candidate_bad_primes`] produces a finite list of
//! primes that contains every bad prime above `n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::bipoly::BiPoly;
use crate::arith::factor::factor_integer;
use crate::arith::field::{ExtField, Field, PrimeField, ZechField};
use crate::arith::intpoly::{IntPoly, Var};
use crate::arith::ntheory::{is_prime_u64, mobius, prime_factors_u64};
use crate::arith::padic::PrimePower;
use crate::arith::resultant::{discriminant_int, resultant_int, resultant_x};
use crate::arith::roots::{roots_mod_p, Fq, ModPoly};
use crate::arith::upoly;
use crate::budget::Budget;
use crate::dynatomic::{frobenius_orbits, Family};
use crate::error::{inconsistent, invalid, Error, Result};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Curve {
    Y1,
    Y0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Reduction {
    Good,
    Bad,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Irreducibility {
    GeomIrreducible,
    Reducible,
    Unknown,
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Curve::Y1 => "Y1",
            Curve::Y0 => "Y0",
        })
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for Irreducibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A `p`-adic valuation known exactly or only from below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Val {
    Exact(u32),
    AtLeast(u32),
}

impl Val {
    pub fn lower(self) -> u32 {
        match self {
            Val::Exact(v) | Val::AtLeast(v) => v,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Val::Exact(0)
    }

    pub fn is_positive(self) -> bool {
        self.lower() >= 1
    }

    pub fn is_one(self) -> bool {
        self == Val::Exact(1)
    }

    pub fn add(self, o: Val) -> Val {
        match (self, o) {
            (Val::Exact(a), Val::Exact(b)) => Val::Exact(a + b),
            _ => Val::AtLeast(self.lower() + o.lower()),
        }
    }

    pub fn double(self) -> Val {
        self.add(self)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Exact(v) => write!(f, "{v}"),
            Val::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Where the valuations came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Source {
    CharZero,
    ModP,
}

/// `v_p(D_{n,d})` for every `d | n` and `v_p(R_{n,e,d})` for `e < d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Valuations {
    pub n: u64,
    pub p: u64,
    pub source: Source,
    pub disc: BTreeMap<u64, Val>,
    pub res: BTreeMap<(u64, u64), Val>,
}

impl Valuations {
    /// `v_p(D_n) = sum v_p(D_{n,d}) + 2 sum v_p(R_{n,e,d})`.
    pub fn total(&self) -> Val {
        let d = self.disc.values().fold(Val::Exact(0), |a, &v| a.add(v));
        self.res.values().fold(d, |a, &v| a.add(v.double()))
    }

    pub fn disc_of(&self, d: u64) -> Val {
        self.disc.get(&d).copied().unwrap_or(Val::Exact(0))
    }

    fn label_disc(&self, d: u64) -> String {
        format!("v_{}(D_{{{},{}}}) = {}", self.p, self.n, d, self.disc_of(d))
    }
}

/// One criterion that fired, with the data that triggered it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Citation {
    pub rule: &'static str,
    pub detail: String,
}

/// Verdict for one curve at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeClassification {
    pub n: u64,
    pub m: u64,
    pub p: u64,
    pub curve: Curve,
    pub reduction: Reduction,
    pub irreducibility: Irreducibility,
    pub rules: Vec<Citation>,
}

impl PrimeClassification {
    pub fn cites(&self, rule: &str) -> bool {
        self.rules.iter().any(|c| c.rule == rule)
    }

    /// Rule identifiers joined by `;`, for CSV.
    pub fn rule_list(&self) -> String {
        let mut seen: Vec<&str> = Vec::new();
        for c in &self.rules {
            if !seen.contains(&c.rule) {
                seen.push(c.rule);
            }
        }
        seen.join(";")
    }
}

/// Rule identifiers.
pub mod rules {
    pub const OUT_OF_SCOPE: &str = "out-of-scope-prime";
    pub const NO_RULE: &str = "no-rule-applies";
    pub const DISC_COPRIME: &str = "discriminant-coprime";
    pub const RESULTANT_ONLY: &str = "resultant-only";
    pub const SMALL_PERIOD: &str = "small-period-discriminant";
    pub const P_DIVIDES_N: &str = "p-divides-n";
    pub const SIMPLE_DISC: &str = "simple-discriminant";
    pub const SIMPLE_DISC_IRRED: &str = "simple-discriminant-irreducible";
    pub const PRIME_PERIOD_TRANSFER: &str = "prime-period-transfer";
    pub const IRRED_TRANSFER: &str = "irreducibility-transfer";
}

#[derive(Clone, Debug, Default)]
struct State {
    reduction: Option<Reduction>,
    irred: Option<Irreducibility>,
    rules: Vec<Citation>,
}

impl State {
    fn set_reduction(&mut self, r: Reduction, rule: &'static str, detail: String) -> Result<bool> {
        match self.reduction {
            Some(old) if old != r => inconsistent(format!("{rule} gives {r:?} but an earlier rule gave {old:?}")),
            Some(_) => Ok(false),
            None => {
                self.reduction = Some(r);
                self.rules.push(Citation { rule, detail });
                Ok(true)
            }
        }
    }

    fn set_irred(&mut self, i: Irreducibility, rule: &'static str, detail: String) -> Result<bool> {
        match self.irred {
            Some(old) if old != i => inconsistent(format!("{rule} gives {i:?} but an earlier rule gave {old:?}")),
            Some(_) => Ok(false),
            None => {
                self.irred = Some(i);
                self.rules.push(Citation { rule, detail });
                Ok(true)
            }
        }
    }
}

/// Apply every criterion; `[Y1, Y0]`.
fn apply_rules(m: u64, v: &Valuations) -> Result<[State; 2]> {
    let (n, p) = (v.n, v.p);
    let mut y1 = State::default();
    let mut y0 = State::default();
    use rules::*;
    use Irreducibility::GeomIrreducible;
    use Reduction::{Bad, Good};

    let total = v.total();
    let dnn = v.disc_of(n);
    if total.is_zero() {
        let d = format!("v_{p}(D_{n}) = 0");
        y1.set_reduction(Good, DISC_COPRIME, d.clone())?;
        y1.set_irred(GeomIrreducible, DISC_COPRIME, d)?;
    }
    if dnn.is_zero() {
        let d = v.label_disc(n);
        y0.set_reduction(Good, DISC_COPRIME, d.clone())?;
        y0.set_irred(GeomIrreducible, DISC_COPRIME, d)?;
    }

    // p divides some R_{n,e,n} and nothing else
    let res_n: Vec<(u64, Val)> = v.res.iter().filter(|((_, d), _)| *d == n).map(|(&(e, _), &x)| (e, x)).collect();
    let res_n_pos = res_n.iter().any(|(_, x)| x.is_positive());
    let others_zero =
        v.disc.values().all(|x| x.is_zero()) && v.res.iter().filter(|((_, d), _)| *d != n).all(|(_, x)| x.is_zero());
    if res_n_pos && others_zero {
        let which: Vec<String> =
            res_n.iter().filter(|(_, x)| x.is_positive()).map(|(e, x)| format!("v_{p}(R_{{{n},{e},{n}}}) = {x}")).collect();
        y1.set_reduction(Good, RESULTANT_ONLY, format!("{}; all other factors of D_{n} prime to {p}", which.join(", ")))?;
    }

    // quadratic family: p divides only D_{n,d} for d in {1} or {1, 2}
    if m == 2 && n > 2 && n % p != 0 {
        let s: &[u64] = if n % 2 == 1 { &[1] } else { &[1, 2] };
        let s_pos = s.iter().any(|d| v.disc_of(*d).is_positive());
        let rest_zero = v.disc.iter().filter(|(d, _)| !s.contains(d)).all(|(_, x)| x.is_zero())
            && v.res.values().all(|x| x.is_zero());
        if s_pos && rest_zero {
            let which: Vec<String> = s.iter().map(|&d| v.label_disc(d)).collect();
            y1.set_reduction(Good, SMALL_PERIOD, format!("{}; D_{n}/prod prime to {p}", which.join(", ")))?;
        }
    }

    if n > 3 && n % p == 0 {
        y1.set_reduction(Bad, P_DIVIDES_N, format!("{p} | n = {n}"))?;
    }
    if dnn.is_one() {
        y0.set_reduction(Bad, SIMPLE_DISC, v.label_disc(n))?;
    }
    if total.is_one() {
        y1.set_reduction(Bad, SIMPLE_DISC, format!("v_{p}(D_{n}) = 1"))?;
    }
    if m == 2 && dnn.is_one() {
        y0.set_irred(GeomIrreducible, SIMPLE_DISC_IRRED, v.label_disc(n))?;
        if n % p != 0 {
            y1.set_irred(GeomIrreducible, SIMPLE_DISC_IRRED, format!("{}, {p} does not divide n", v.label_disc(n)))?;
        }
    }

    let n_prime = is_prime_u64(n);
    let red_transfer = n_prime && p != n && m % p != 0 && (m - 1) % p != 0;
    let irr_transfer = m % p != 0 && (m - 1) % p != 0 && n % p != 0;
    loop {
        let mut changed = false;
        if red_transfer {
            let d = format!("n = {n} and p = {p} distinct primes, p does not divide m(m-1)");
            if let Some(r @ (Good | Bad)) = y0.reduction {
                changed |= y1.set_reduction(r, PRIME_PERIOD_TRANSFER, format!("{d}; Y0 {r:?}"))?;
            }
            if let Some(r @ (Good | Bad)) = y1.reduction {
                changed |= y0.set_reduction(r, PRIME_PERIOD_TRANSFER, format!("{d}; Y1 {r:?}"))?;
            }
        }
        if irr_transfer {
            let d = format!("p = {p} does not divide (m-1)mn");
            if let Some(i) = y0.irred {
                changed |= y1.set_irred(i, IRRED_TRANSFER, format!("{d}; Y0 {i:?}"))?;
            }
            if let Some(i) = y1.irred {
                changed |= y0.set_irred(i, IRRED_TRANSFER, format!("{d}; Y1 {i:?}"))?;
            }
        }
        if !changed {
            break;
        }
    }
    Ok([y1, y0])
}

fn finish(n: u64, m: u64, p: u64, curve: Curve, mut s: State) -> PrimeClassification {
    if s.rules.is_empty() {
        s.rules.push(Citation { rule: rules::NO_RULE, detail: "no criterion applies".into() });
    }
    PrimeClassification {
        n,
        m,
        p,
        curve,
        reduction: s.reduction.unwrap_or(Reduction::Unknown),
        irreducibility: s.irred.unwrap_or(Irreducibility::Unknown),
        rules: s.rules,
    }
}

#[derive(Clone, Debug)]
enum Data {
    /// Exact `D_{n,d}` and `R_{n,e,d}` for all `e <= d | n`.
    CharZero { values: BTreeMap<(u64, u64), BigInt> },
    /// Exact values for `e <= d < n` and the satellite factors themselves.
    ModP { satellites: BTreeMap<u64, IntPoly>, values: BTreeMap<(u64, u64), BigInt> },
}

/// Valuation data for one `(n, m)`, reused across primes.
#[derive(Clone, Debug)]
pub struct Classifier {
    family: Family,
    n: u64,
    data: Data,
}

/// Largest `deg_x Phi_n` handled in characteristic zero by default.
pub const CHAR_ZERO_MAX_NU: u64 = 60;

/// Largest `deg_x Phi_n` for which the `Z/p^2` lift is attempted.
pub const LIFT_MAX_NU: u64 = 130;

impl Classifier {
    /// Characteristic-zero data when `nu(n) <= CHAR_ZERO_MAX_NU`, otherwise
    /// the modular route.
    pub fn new(family: Family, n: u64, budget: &Budget) -> Result<Self> {
        if family.nu(n) <= CHAR_ZERO_MAX_NU {
            Self::char_zero(family, n, budget)
        } else {
            Self::modular(family, n, budget)
        }
    }

    pub fn char_zero(family: Family, n: u64, budget: &Budget) -> Result<Self> {
        let factors = family.delta_factors(n, budget)?;
        let values = pair_values(&factors)?;
        Ok(Classifier { family, n, data: Data::CharZero { values } })
    }

    pub fn modular(family: Family, n: u64, budget: &Budget) -> Result<Self> {
        let satellites = family.satellite_factors(n, budget)?;
        let values = pair_values(&satellites)?;
        Ok(Classifier { family, n, data: Data::ModP { satellites, values } })
    }

    pub fn from_table(t: &crate::dynatomic::DiscriminantTable) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (&(e, d), v) in &t.values {
            let v = if e == d { v.clone() } else { v.sqrt() };
            values.insert((e, d), v);
        }
        Ok(Classifier { family: Family::new(t.m)?, n: t.n, data: Data::CharZero { values } })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn source(&self) -> Source {
        match self.data {
            Data::CharZero { .. } => Source::CharZero,
            Data::ModP { .. } => Source::ModP,
        }
    }

    /// `v_p` of every `D_{n,d}` and `R_{n,e,d}`.
    pub fn valuations(&self, p: u64, budget: &Budget) -> Result<Valuations> {
        let n = self.n;
        let exact = |values: &BTreeMap<(u64, u64), BigInt>| {
            let mut disc = BTreeMap::new();
            let mut res = BTreeMap::new();
            for (&(e, d), v) in values {
                let k = Val::Exact(int_valuation(v, p));
                if e == d {
                    disc.insert(d, k);
                } else {
                    res.insert((e, d), k);
                }
            }
            (disc, res)
        };
        match &self.data {
            Data::CharZero { values } => {
                let (disc, res) = exact(values);
                Ok(Valuations { n, p, source: Source::CharZero, disc, res })
            }
            Data::ModP { satellites, values } => {
                let (mut disc, mut res) = exact(values);
                let (dnn, rn) = self.probe_mod_p(satellites, p, budget)?;
                disc.insert(n, dnn);
                for (e, v) in rn {
                    res.insert((e, n), v);
                }
                Ok(Valuations { n, p, source: Source::ModP, disc, res })
            }
        }
    }

    fn probe_mod_p(&self, sats: &BTreeMap<u64, IntPoly>, p: u64, budget: &Budget) -> Result<(Val, Vec<(u64, Val)>)> {
        let n = self.n;
        let fam = self.family;
        let dnn = fam.delta_nn_mod_p(n, p, budget)?;
        let sat_deg: u64 = sats.values().map(|g| g.degree().unwrap_or(0) as u64).sum();
        let expected = fam.delta_one_degree(n) - sat_deg;
        if dnn.degree() != Some(expected as usize) {
            return inconsistent(format!("Delta_{{{n},{n}}} mod {p} has the wrong degree"));
        }
        let fp = PrimeField::new(p)?;
        let mut res = Vec::new();
        for (&e, g) in sats {
            let gm = ModPoly::new(p, Var::C, g.to_field(&fp).iter().map(|&c| fp.to_u64(c)).collect());
            if gm.degree() != g.degree() {
                return inconsistent(format!("leading coefficient of Delta_{{{n},{e}}} vanishes mod {p}"));
            }
            let common = crate::arith::roots::gcd_mod(&gm, &dnn)?;
            res.push((e, if common.degree().unwrap_or(0) >= 1 { Val::AtLeast(1) } else { Val::Exact(0) }));
        }
        let disc = if expected <= 1 {
            Val::Exact(0)
        } else {
            let g = crate::arith::roots::gcd_mod(&dnn, &dnn.derivative()?)?;
            if g.degree().unwrap_or(0) == 0 {
                Val::Exact(0)
            } else {
                match simple_discriminant_probe(fam, n, p, sats, &dnn, budget)? {
                    Some(1) => Val::Exact(1),
                    Some(v) => Val::AtLeast(v),
                    None => Val::AtLeast(1),
                }
            }
        };
        Ok((disc, res))
    }

    /// Both verdicts, `[Y1, Y0]`.
    pub fn classify(&self, p: u64, budget: &Budget) -> Result<[PrimeClassification; 2]> {
        let (n, m) = (self.n, self.family.m());
        if p == 2 || m % p == 0 || !is_prime_u64(p) {
            if !is_prime_u64(p) {
                return invalid(format!("{p} is not prime"));
            }
            let s = || State {
                reduction: None,
                irred: None,
                rules: vec![Citation { rule: rules::OUT_OF_SCOPE, detail: format!("p = {p} is 2 or divides m = {m}") }],
            };
            return Ok([finish(n, m, p, Curve::Y1, s()), finish(n, m, p, Curve::Y0, s())]);
        }
        let v = self.valuations(p, budget)?;
        let [y1, y0] = apply_rules(m, &v)?;
        Ok([finish(n, m, p, Curve::Y1, y1), finish(n, m, p, Curve::Y0, y0)])
    }
}

/// `[Y1, Y0]` verdicts for one prime.
pub fn classify_prime(family: Family, n: u64, p: u64, budget: &Budget) -> Result<[PrimeClassification; 2]> {
    Classifier::new(family, n, budget)?.classify(p, budget)
}

/// `D_{n,d}` on the diagonal and `R_{n,e,d}` (not squared) off it.
fn pair_values(factors: &BTreeMap<u64, IntPoly>) -> Result<BTreeMap<(u64, u64), BigInt>> {
    let ds: Vec<u64> = factors.keys().copied().collect();
    let mut keys = Vec::new();
    for (i, &e) in ds.iter().enumerate() {
        for &d in &ds[i..] {
            keys.push((e, d));
        }
    }
    let vals = par::map_slice(&keys, |&(e, d)| {
        if e == d {
            let g = &factors[&d];
            if g.degree().unwrap_or(0) <= 1 {
                Ok(BigInt::from(1))
            } else {
                discriminant_int(g)
            }
        } else {
            resultant_int(&factors[&e], &factors[&d])
        }
    });
    keys.into_iter().zip(vals).map(|(k, v)| v.map(|v| (k, v))).collect()
}

fn int_valuation(v: &BigInt, p: u64) -> u32 {
    if v.is_zero() {
        return u32::MAX;
    }
    let pb = BigInt::from(p);
    let mut x = v.abs();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        x = q;
        k += 1;
    }
}

/// Decide `v_p(D_{n,n}) = 1` versus `>= 2` by recomputing `Delta_{n,n}`
/// modulo `p^2`. Returns `Some(1)` or `Some(2)` (meaning at least 2), or
/// `None` when the lift is out of reach (`p` below the node count or the
/// degree above [`LIFT_MAX_NU`]). Assumes `p | D_{n,n}`.
pub fn simple_discriminant_probe(
    fam: Family,
    n: u64,
    p: u64,
    sats: &BTreeMap<u64, IntPoly>,
    dnn_mod_p: &ModPoly,
    budget: &Budget,
) -> Result<Option<u32>> {
    let nu = fam.nu(n);
    let dc = fam.delta_one_degree(n);
    let count = (n * dc + 1) as usize;
    if nu > LIFT_MAX_NU || p < count as u64 || p >= 1 << 31 {
        return Ok(None);
    }
    budget.charge(count as u64 * nu * nu * nu / 256, "Z/p^2 lift of Delta_{n,n}")?;
    let r = PrimePower::new(p, 2)?;
    let m = fam.m();
    let vals = par::map_range(count, |i| node_value_p2(&r, m, n, i as u64));
    let vals: Vec<u64> = vals.into_iter().collect::<Option<_>>().ok_or_else(|| Error::Inconsistent("Psi_d does not divide exactly mod p^2".into()))?;
    let xs: Vec<u64> = (0..count as u64).collect();
    let big_r = r.interpolate(&xs, &vals).ok_or_else(|| Error::Inconsistent("nodes not distinct mod p".into()))?;

    // Hensel: delta = delta_bar + p h with n delta_bar^{n-1} h = (R - delta_bar^n)/p mod p
    let fp = PrimeField::new(p)?;
    let delta_bar = fam.delta_one_mod_p(n, &fp, budget)?;
    let db: Vec<u64> = delta_bar.iter().map(|&c| fp.to_u64(c)).collect();
    let e = r.poly_sub(&big_r, &r.poly_pow(&db, n));
    if e.iter().any(|c| c % p != 0) {
        return inconsistent("delta_n(1, c)^n mod p^2 does not reduce to the mod p root");
    }
    let e: Vec<u64> = e.iter().map(|c| fp.from_u64(c / p)).collect();
    let denom = upoly::scale(&fp, &upoly::pow(&fp, &delta_bar, n - 1), &fp.from_u64(n % p));
    let h = upoly::div_exact(&fp, &upoly::trim(&fp, e), &denom)
        .ok_or_else(|| Error::Inconsistent("Hensel step for delta_n(1, c) failed".into()))?;
    let mut delta: Vec<u64> = db.clone();
    for (i, &c) in h.iter().enumerate() {
        if i >= delta.len() {
            delta.resize(i + 1, 0);
        }
        delta[i] = r.add(delta[i], r.mul(p, fp.to_u64(c)));
    }
    let mut q = r.trim(delta);
    for (d, g) in sats {
        let g: Vec<u64> = g.coeffs().iter().map(|c| r.reduce_int(c)).collect();
        q = r.div_exact(&q, &g).ok_or_else(|| Error::Inconsistent(format!("Delta_{{{n},{d}}} does not divide mod p^2")))?;
    }
    let back: Vec<u64> = q.iter().map(|c| c % p).collect();
    if ModPoly::new(p, Var::C, back) != *dnn_mod_p {
        return inconsistent("lift of Delta_{n,n} does not reduce to the mod p polynomial");
    }
    let lc_inv = r.inv(*q.last().expect("nonzero")).ok_or_else(|| Error::Inconsistent("leading coefficient not a unit".into()))?;
    let monic: Vec<u64> = q.iter().map(|&c| r.mul(c, lc_inv)).collect();
    let v = r.valuation(r.norm(&r.derivative(&q), &monic));
    if v == 0 {
        return inconsistent("lifted discriminant is a unit although p divides it");
    }
    Ok(Some(v.min(2)))
}

/// `Res_x(Phi_n(x, c0), 1 - lambda_n) mod p^2`.
fn node_value_p2(r: &PrimePower, m: u64, n: u64, c0: u64) -> Option<u64> {
    let q = r.modulus();
    let x = vec![0, 1 % q];
    let mut y = x.clone();
    let mut num = vec![1 % q];
    let mut den = vec![1 % q];
    for d in 1..=n {
        y = r.poly_pow(&y, m);
        if y.is_empty() {
            y.push(0);
        }
        y[0] = r.add(y[0], c0 % q);
        if n % d == 0 {
            match mobius(n / d).ok()? {
                1 => num = r.poly_mul(&num, &r.poly_sub(&y, &x)),
                -1 => den = r.poly_mul(&den, &r.poly_sub(&y, &x)),
                _ => {}
            }
        }
    }
    let phi = r.div_exact(&num, &den)?;
    let lam = r.divrem(&r.derivative(&y), &phi)?.1;
    let g = r.poly_sub(&[1 % q], &lam);
    Some(r.norm(&g, &phi))
}

// ---------------------------------------------------------------------------

/// A singular point of `Phi_n = 0`: `c` and the `x` coordinates found in
/// `F_p(c)`. `locus_degree` is the degree of `gcd(F, F_x, F_c)` at `c`, so
/// points with `x` outside `F_p(c)` are counted there but not listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularPoint {
    pub c: Fq,
    pub x: Vec<Fq>,
    pub locus_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityReport {
    pub n: u64,
    pub m: u64,
    pub p: u64,
    pub singular_points: Vec<SingularPoint>,
    pub smooth: bool,
}

/// Direct test for singular points of `Y_1(n)` over `F_p`-bar.
///
/// Interpolates `Res_x(F, F_x)` and `Res_x(F, F_c)` modulo `p`, and checks
/// `gcd(F, F_x, F_c)` above one root of each irreducible factor of their gcd.
pub fn singularity_test(family: Family, n: u64, p: u64, budget: &Budget) -> Result<SingularityReport> {
    let m = family.m();
    if p == 2 || m % p == 0 || !is_prime_u64(p) {
        return invalid(format!("singularity test needs an odd prime not dividing m, got {p}"));
    }
    let f = family.phi(n)?;
    let fx = f.derivative();
    let fc = f.derivative_c();
    let nu = family.nu(n) as usize;
    let dfc = fc.degree().unwrap_or(0);
    // every monomial x^i c^j of F has i + m j <= nu, so deg_c Res <= da db / m
    let b1 = nu * (nu - 1) / m as usize;
    let b2 = nu * dfc / m as usize;
    budget.charge(((b1 + b2) * nu * nu) as u64 / 64, "singularity test resultants")?;
    let r1 = resultant_mod_p(&f, nu, &fx, nu - 1, b1, p, budget)?;
    let r2 = resultant_mod_p(&f, nu, &fc, dfc, b2, p, budget)?;
    let g = crate::arith::roots::gcd_mod(&r1, &r2)?;
    if g.is_zero() {
        return Err(Error::InsufficientData(format!("Res_x(F, F_x) and Res_x(F, F_c) both vanish mod {p}")));
    }
    let mut points = Vec::new();
    if g.degree().unwrap_or(0) >= 1 {
        let fp = PrimeField::new(p)?;
        let roots = roots_mod_p(&g)?;
        let mut seen: Vec<Vec<u64>> = Vec::new();
        for root in roots {
            if seen.contains(&root.root.modulus) {
                continue;
            }
            seen.push(root.root.modulus.clone());
            let pt = if root.root.k == 1 {
                let c0 = fp.from_u64(root.root.value[0]);
                witness(&fp, &f, &fx, &fc, &c0, |e| Fq { p, k: 1, modulus: root.root.modulus.clone(), value: vec![fp.to_u64(*e)] })?
            } else {
                let h: Vec<u64> = root.root.modulus.iter().map(|&c| fp.from_u64(c)).collect();
                let ext = ExtField::new(fp.clone(), h)?;
                let c0 = ext.generator();
                witness(&ext, &f, &fx, &fc, &c0, |e| Fq {
                    p,
                    k: root.root.k,
                    modulus: root.root.modulus.clone(),
                    value: e.iter().map(|&c| fp.to_u64(c)).collect(),
                })?
            };
            if let Some((locus_degree, xs)) = pt {
                points.push(SingularPoint { c: root.root.clone(), x: xs, locus_degree });
            }
        }
    }
    Ok(SingularityReport { n, m, p, smooth: points.is_empty(), singular_points: points })
}

/// `gcd(F, F_x, F_c)` at `c0`; `None` when constant.
fn witness<K: Field>(
    k: &K,
    f: &BiPoly,
    fx: &BiPoly,
    fc: &BiPoly,
    c0: &K::Elem,
    to_fq: impl Fn(&K::Elem) -> Fq,
) -> Result<Option<(usize, Vec<Fq>)>> {
    let at = |b: &BiPoly| -> Vec<K::Elem> {
        let rows = b.to_field(k);
        upoly::trim(k, rows.iter().map(|row| upoly::eval(k, row, c0)).collect())
    };
    let (a, ax, ac) = (at(f), at(fx), at(fc));
    let g = upoly::gcd(k, &upoly::gcd(k, &a, &ax), &ac);
    let deg = upoly::degree::<K>(&g).unwrap_or(0) as usize;
    if deg == 0 {
        return Ok(None);
    }
    let xs = upoly::roots(k, &g);
    for x0 in &xs {
        for poly in [&a, &ax, &ac] {
            if !k.is_zero(&upoly::eval(k, poly, x0)) {
                return inconsistent("reported singular point does not satisfy F = F_x = F_c = 0");
            }
        }
    }
    Ok(Some((deg, xs.iter().map(to_fq).collect())))
}

/// `Res_x(a, b) mod p` as a polynomial in `c` of degree at most `bound`,
/// with the given formal `x`-degrees.
fn resultant_mod_p(a: &BiPoly, da: usize, b: &BiPoly, db: usize, bound: usize, p: u64, budget: &Budget) -> Result<ModPoly> {
    let count = bound + 2;
    let fp = PrimeField::new(p)?;
    let coeffs = if p as usize >= count {
        resultant_samples(&fp, a, da, b, db, count, budget)?
    } else {
        let mut k = 1u32;
        while (p as u128).pow(k) < count as u128 {
            k += 1;
        }
        if (p as u128).pow(k) > ZechField::MAX_ORDER as u128 {
            return invalid(format!("need {count} nodes but F_{p}^{k} exceeds the supported field size"));
        }
        resultant_samples(&ZechField::new(p, k)?, a, da, b, db, count, budget)?
    };
    Ok(ModPoly::new(p, Var::C, coeffs))
}

fn resultant_samples<F: Field>(
    f: &F,
    a: &BiPoly,
    da: usize,
    b: &BiPoly,
    db: usize,
    count: usize,
    budget: &Budget,
) -> Result<Vec<u64>> {
    let orbits = frobenius_orbits(f, count)?;
    budget.charge(orbits.len() as u64 * ((da + db) * (da + db)) as u64 / 64, "resultant nodes")?;
    let ra = a.to_field(f);
    let rb = b.to_field(f);
    let vals = par::map_slice(&orbits, |orb| {
        let c0 = &orb[0];
        let pa = upoly::trim(f, ra.iter().map(|row| upoly::eval(f, row, c0)).collect());
        let pb = upoly::trim(f, rb.iter().map(|row| upoly::eval(f, row, c0)).collect());
        upoly::resultant_formal(f, &pa, da, &pb, db)
    });
    let mut xs = Vec::with_capacity(count + 8);
    let mut ys = Vec::with_capacity(count + 8);
    for (orb, mut v) in orbits.iter().zip(vals) {
        for x in orb {
            xs.push(x.clone());
            ys.push(v.clone());
            v = f.frobenius(&v);
        }
    }
    let poly = upoly::interpolate(f, &xs, &ys);
    if poly.len() >= count {
        return inconsistent("resultant degree exceeds its bound");
    }
    poly.iter()
        .map(|c| f.to_prime(c).ok_or_else(|| Error::Inconsistent("coefficient outside the prime field".into())))
        .collect()
}

// ---------------------------------------------------------------------------

/// Primes that may be of bad reduction for `Y_1(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateSet {
    pub n: u64,
    pub m: u64,
    /// Every prime found, including those at most `n`.
    pub primes: Vec<u64>,
    /// Prime factors too large for a machine word.
    pub large_primes: Vec<String>,
    /// Cofactors left unfactored; nonempty means `primes` is a lower bound.
    pub unfactored: Vec<String>,
    pub complete: bool,
}

/// Candidate bad primes via `R_1 = Res_x(F, F_x)`, `R_2 = Res_x(F, F_c)` and
/// `R_3 = Res_x(F_x, F_c)` with `F = Phi_n`.
///
/// A singular point mod `p` is a common root of all three. The roots of
/// `R_1` are those of the factors `Delta_{n,d}`, so every bad prime not
/// dividing a leading coefficient divides
/// `gcd(Res(Delta_{n,d}, R_2), Res(Delta_{n,d}, R_3))` for some `d | n`.
/// The gcds are factored with the given trial bound.
pub fn candidate_bad_primes(family: Family, n: u64, trial_bound: u64, budget: &Budget) -> Result<CandidateSet> {
    let f = family.phi(n)?;
    let fx = f.derivative();
    let fc = f.derivative_c();
    let r2 = resultant_x(&f, &fc, budget)?;
    let r3 = resultant_x(&fx, &fc, budget)?;
    let factors = family.delta_factors(n, budget)?;
    let pieces: Vec<(u64, IntPoly)> =
        factors.into_iter().filter(|(_, g)| g.degree().unwrap_or(0) >= 1).collect();
    let gcds = par::map_slice(&pieces, |(_, g)| -> Result<BigInt> {
        let a = resultant_int(g, &r2)?;
        let b = resultant_int(g, &r3)?;
        Ok(a.gcd(&b))
    });
    let mut primes = Vec::new();
    let mut large = Vec::new();
    let mut unfactored = Vec::new();
    for ((d, _), g) in pieces.iter().zip(gcds) {
        let g = g?;
        if g.is_zero() {
            return Err(Error::InsufficientData(format!("Delta_{{{n},{d}}} shares a factor with R_2 and R_3")));
        }
        let t = factor_integer(&g, trial_bound)?;
        for (q, _) in &t.factors {
            match crate::arith::factor::to_u64(q) {
                Some(v) => primes.push(v),
                None => large.push(q.to_string()),
            }
        }
        if t.cofactor != BigUint::from(1u8) {
            unfactored.push(t.cofactor.to_string());
        }
    }
    primes.sort_unstable();
    primes.dedup();
    large.sort();
    large.dedup();
    let complete = unfactored.is_empty();
    Ok(CandidateSet { n, m: family.m(), primes, large_primes: large, unfactored, complete })
}

/// Lower bound `nu(n) / (m n (p^m + 1))` for the `F_p`-gonality of `X_0(n)`.
pub fn gonality_bound(family: Family, n: u64, p: u64) -> Result<Ratio<BigInt>> {
    if n == 0 || !is_prime_u64(p) {
        return invalid(format!("gonality bound needs n >= 1 and p prime, got n = {n}, p = {p}"));
    }
    let m = family.m();
    let den = BigInt::from(m) * BigInt::from(n) * (BigInt::from(p).pow(m as u32) + 1);
    Ok(Ratio::new(BigInt::from(family.nu(n)), den))
}

/// JSON rendering of a classification with its rule payloads.
pub fn classification_json(c: &PrimeClassification) -> Value {
    json!({
        "n": c.n,
        "m": c.m,
        "p": c.p,
        "curve": c.curve.to_string(),
        "reduction": c.reduction.to_string(),
        "irreducibility": c.irreducibility.to_string(),
        "rules": c.rules.iter().map(|r| json!({"rule": r.rule, "detail": r.detail})).collect::<Vec<_>>(),
    })
}

/// Odd primes of a number that fit a machine word.
pub fn odd_prime_divisors(v: u64) -> Vec<u64> {
    prime_factors_u64(v).into_iter().filter(|&q| q != 2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam() -> Family {
        Family::quadratic()
    }

    #[test]
    fn val_arithmetic() {
        assert_eq!(Val::Exact(1).add(Val::Exact(2)), Val::Exact(3));
        assert_eq!(Val::Exact(1).add(Val::AtLeast(1)), Val::AtLeast(2));
        assert!(Val::AtLeast(1).is_positive() && !Val::AtLeast(1).is_one());
        assert_eq!(Val::AtLeast(2).to_string(), ">=2");
    }

    #[test]
    fn gonality_values() {
        assert_eq!(gonality_bound(fam(), 5, 3).unwrap(), Ratio::new(BigInt::from(3), BigInt::from(10)));
        assert_eq!(gonality_bound(fam(), 1, 3).unwrap(), Ratio::new(BigInt::from(1), BigInt::from(10)));
        assert_eq!(gonality_bound(fam(), 11, 3).unwrap(), Ratio::new(BigInt::from(2046), BigInt::from(220)));
        assert!(gonality_bound(fam(), 5, 4).is_err());
    }

    #[test]
    fn out_of_scope_primes() {
        let c = classify_prime(fam(), 4, 2, &Budget::unlimited()).unwrap();
        assert!(c.iter().all(|v| v.reduction == Reduction::Unknown && v.cites(rules::OUT_OF_SCOPE)));
        assert!(classify_prime(fam(), 4, 9, &Budget::unlimited()).is_err());
    }

    #[test]
    fn direct_singularity_examples() {
        let b = Budget::unlimited();
        assert!(singularity_test(fam(), 4, 107, &b).unwrap().smooth);
        assert!(singularity_test(fam(), 5, 7, &b).unwrap().smooth);
        let r = singularity_test(fam(), 6, 3, &b).unwrap();
        assert!(!r.smooth && !r.singular_points.is_empty());
        assert!(!singularity_test(fam(), 5, 3701, &b).unwrap().smooth);
    }

    #[test]
    fn classification_examples() {
        let b = Budget::unlimited();
        let [y1, y0] = classify_prime(fam(), 5, 3701, &b).unwrap();
        assert_eq!(y0.reduction, Reduction::Bad);
        assert_eq!(y0.irreducibility, Irreducibility::GeomIrreducible);
        assert!(y0.cites(rules::SIMPLE_DISC) && y0.cites(rules::SIMPLE_DISC_IRRED));
        assert_eq!(y1.reduction, Reduction::Bad);
        let [y1, _] = classify_prime(fam(), 5, 11, &b).unwrap();
        assert_eq!(y1.reduction, Reduction::Good);
        assert!(y1.cites(rules::PRIME_PERIOD_TRANSFER));
        let [y1, y0] = classify_prime(fam(), 6, 67, &b).unwrap();
        assert_eq!((y1.reduction, y1.irreducibility), (Reduction::Bad, Irreducibility::GeomIrreducible));
        assert_eq!(y0.reduction, Reduction::Good);
        let [y1, _] = classify_prime(fam(), 6, 79, &b).unwrap();
        assert!(y1.reduction == Reduction::Good && y1.cites(rules::RESULTANT_ONLY));
        let [_, y0] = classify_prime(fam(), 6, 5, &b).unwrap();
        assert_eq!(y0.reduction, Reduction::Unknown);
        let [y1, _] = classify_prime(fam(), 5, 5, &b).unwrap();
        assert!(y1.reduction == Reduction::Bad && y1.cites(rules::P_DIVIDES_N));
    }

    #[test]
    fn candidate_sets() {
        let b = Budget::unlimited();
        let c4 = candidate_bad_primes(fam(), 4, 1 << 20, &b).unwrap();
        assert!(c4.primes.contains(&107), "{:?}", c4);
        let c5 = candidate_bad_primes(fam(), 5, 1 << 20, &b).unwrap();
        assert!(c5.primes.contains(&3701), "{:?}", c5);
    }

    #[test]
    fn modular_and_char_zero_agree() {
        let b = Budget::unlimited();
        for n in [4u64, 5] {
            let c0 = Classifier::char_zero(fam(), n, &b).unwrap();
            let cp = Classifier::modular(fam(), n, &b).unwrap();
            for p in [3u64, 5, 7, 11, 17, 31, 107] {
                let v0 = c0.valuations(p, &b).unwrap();
                let vp = cp.valuations(p, &b).unwrap();
                for (k, v) in &vp.disc {
                    let e = v0.disc[k];
                    assert!(v.lower() <= e.lower() && (*v == e || matches!(v, Val::AtLeast(_))), "n={n} p={p} d={k}");
                    assert_eq!(v.is_zero(), e.is_zero());
                }
                for (k, v) in &vp.res {
                    assert_eq!(v.is_zero(), v0.res[k].is_zero(), "n={n} p={p} res {k:?}");
                }
            }
        }
    }
}
