//! Fibres of `Y_1(n)` and `Y_0(n)` over `c = 0` and `c = -2` for `x^2 + c`
//! modulo primes dividing `2^n - 1` or `2^n + 1`.
//!
//! Over `c = 0` the points of formal period `n` are roots of unity `zeta^i`
//! in `mu_{2^n - 1}`; over `c = -2` they are `zeta + 1/zeta` with `zeta` in
//! `mu_{2^n - 1}` or `mu_{2^n + 1}`. Both are indexed by residues, the
//! dynamics is doubling, and writing `N = p^k M` two points collide modulo
//! `p` exactly when their residues agree modulo `M` (up to sign at `-2`).

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::field::{Field, PrimeField};
use crate::arith::intpoly::Var;
use crate::arith::ntheory::{divisors, is_prime_u64};
use crate::arith::roots::{gcd_mod, ModPoly};
use crate::arith::upoly;
use crate::budget::Budget;
use crate::dynatomic::Family;
use crate::error::{inconsistent, invalid, Result};
use crate::par;

/// Largest period for which the index sets are enumerated.
pub const MAX_PERIOD: u64 = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Center {
    Zero,
    MinusTwo,
}

impl Center {
    pub fn value(self) -> i64 {
        match self {
            Center::Zero => 0,
            Center::MinusTwo => -2,
        }
    }
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Level at which ramification is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Level {
    Y1,
    Y0,
}

/// `zeta^i` with `zeta` a primitive `modulus`-th root of unity. At `c = -2`
/// the point is `zeta^i + zeta^{-i}` and `i` is the smaller of `i, -i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Residue {
    pub modulus: u64,
    pub index: u64,
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.index, self.modulus)
    }
}

/// Points of formal period `n` over one center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnityIndexSet {
    pub n: u64,
    pub center: Center,
    pub elements: Vec<Residue>,
}

impl UnityIndexSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn check_period(n: u64) -> Result<()> {
    if !(2..=MAX_PERIOD).contains(&n) {
        return invalid(format!("period must be in 2..={MAX_PERIOD}, got {n}"));
    }
    Ok(())
}

/// `zeta^i` lies in `mu_d` for `zeta` of order `big`.
fn in_mu(i: u64, big: u64, d: u64) -> bool {
    (i as u128 * d as u128) % big as u128 == 0
}

fn excluded(i: u64, big: u64, n: u64, center: Center) -> bool {
    divisors(n).into_iter().filter(|&d| d < n).any(|d| {
        in_mu(i, big, (1 << d) - 1) || (center == Center::MinusTwo && in_mu(i, big, (1 << d) + 1))
    })
}

fn moduli(n: u64, center: Center) -> Vec<u64> {
    match center {
        Center::Zero => vec![(1 << n) - 1],
        Center::MinusTwo => vec![(1 << n) - 1, (1 << n) + 1],
    }
}

/// The residues indexing points of formal period `n` over `center`.
pub fn formal_period_points(n: u64, center: Center) -> Result<UnityIndexSet> {
    check_period(n)?;
    let mut elements = Vec::new();
    for big in moduli(n, center) {
        for i in 0..big {
            if center == Center::MinusTwo && i > big - i && i != 0 {
                continue;
            }
            if !excluded(i, big, n, center) {
                elements.push(Residue { modulus: big, index: i });
            }
        }
    }
    let set = UnityIndexSet { n, center, elements };
    let nu = Family::quadratic().nu(n);
    if set.len() as u64 != nu {
        return inconsistent(format!("{} points over c = {center} but nu({n}) = {nu}", set.len()));
    }
    Ok(set)
}

/// `N = p^k M` with `p` not dividing `M`.
fn split(big: u64, p: u64) -> (u32, u64) {
    let (mut k, mut m) = (0, big);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (k, m)
}

/// Collision class of a residue modulo `p`.
fn reduce(r: Residue, p: u64, center: Center) -> Residue {
    let (_, m) = split(r.modulus, p);
    let i = r.index % m;
    let i = if center == Center::MinusTwo { i.min((m - i) % m) } else { i };
    Residue { modulus: m, index: i }
}

fn double(r: Residue, center: Center) -> Residue {
    let i = ((r.index as u128 * 2) % r.modulus as u128) as u64;
    let i = if center == Center::MinusTwo { i.min((r.modulus - i) % r.modulus) } else { i };
    Residue { modulus: r.modulus, index: i }
}

/// One point of the reduced fibre.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberOrbit {
    /// Smallest characteristic zero residue specialising to the point.
    pub representative: Residue,
    /// Collision class, the residue modulo the prime-to-`p` part.
    pub class: Residue,
    /// Number of collision classes in the doubling orbit (1 at the `Y_1` level).
    pub length: u64,
    pub e: u64,
    pub wild: bool,
}

/// Points above `center` modulo `p`, with ramification indices.
///
/// At the `Y_1` level a point is a collision class of residues and `e`
/// counts residues in it; at the `Y_0` level a point is a doubling orbit of
/// classes and `e` counts the characteristic zero orbits landing in it.
pub fn orbits_mod_p(n: u64, center: Center, p: u64, level: Level) -> Result<Vec<FiberOrbit>> {
    if p == 2 || !is_prime_u64(p) {
        return invalid(format!("need an odd prime, got {p}"));
    }
    check_period(n)?;
    if moduli(n, Center::MinusTwo).iter().all(|&b| b % p != 0) {
        return invalid(format!("no collision at this center: {p} divides neither 2^{n} - 1 nor 2^{n} + 1"));
    }
    let set = formal_period_points(n, center)?;
    let mut classes: BTreeMap<Residue, Vec<Residue>> = BTreeMap::new();
    for &r in &set.elements {
        classes.entry(reduce(r, p, center)).or_default().push(r);
    }
    let mut out = Vec::new();
    match level {
        Level::Y1 => {
            for (class, members) in classes {
                let e = members.len() as u64;
                out.push(FiberOrbit { representative: members[0], class, length: 1, e, wild: e % p == 0 });
            }
        }
        Level::Y0 => {
            let mut seen = std::collections::BTreeSet::new();
            for &class in classes.keys() {
                if seen.contains(&class) {
                    continue;
                }
                let mut orbit = vec![class];
                let mut next = double(class, center);
                while next != class {
                    orbit.push(next);
                    next = double(next, center);
                }
                let members: Vec<Residue> = orbit.iter().flat_map(|c| classes[c].iter().copied()).collect();
                seen.extend(orbit.iter().copied());
                if members.len() as u64 % n != 0 {
                    return inconsistent(format!("orbit of {class} holds {} points, not a multiple of {n}", members.len()));
                }
                let e = members.len() as u64 / n;
                let representative = *members.iter().min().expect("nonempty");
                out.push(FiberOrbit { representative, class: orbit[0], length: orbit.len() as u64, e, wild: e % p == 0 });
            }
        }
    }
    Ok(out)
}

/// Ramification indices above 1 as `(e, multiplicity)`, largest first.
pub fn e_list(orbits: &[FiberOrbit]) -> Vec<(u64, u32)> {
    let mut counts: BTreeMap<u64, u32> = BTreeMap::new();
    for o in orbits.iter().filter(|o| o.e > 1) {
        *counts.entry(o.e).or_default() += 1;
    }
    counts.into_iter().rev().collect()
}

/// `23^8,2` style, `---` when unramified.
pub fn render_e_list(list: &[(u64, u32)]) -> String {
    if list.is_empty() {
        return "---".into();
    }
    let parts: Vec<String> =
        list.iter().map(|&(e, k)| if k == 1 { e.to_string() } else { format!("{e}^{k}") }).collect();
    parts.join(",")
}

/// Contribution over one center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CenterReport {
    pub center: Center,
    /// Multiplicity of `c - center` in `Delta_{n,n} mod p`.
    pub rho: u64,
    /// Exact value when tame, lower bound when wild.
    pub rho_bar_lb: u64,
    pub tame: bool,
    pub orbits: Vec<FiberOrbit>,
    pub e: Vec<(u64, u32)>,
}

impl CenterReport {
    /// `rho = rho_bar`, i.e. smooth above the center.
    pub fn settled(&self) -> bool {
        self.rho_bar_lb == self.rho
    }

    pub fn rho_bar_text(&self) -> String {
        if self.tame || self.settled() {
            self.rho_bar_lb.to_string()
        } else {
            format!(">={}", self.rho_bar_lb)
        }
    }
}

/// A factor of `Gamma_{n,p}` other than `c` and `c + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtraFactor {
    pub factor: ModPoly,
    /// Multiplicity in `Delta_{n,n} mod p`.
    pub rho: u64,
}

impl fmt::Display for ExtraFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, rho={}", render_mod_poly(&self.factor), self.rho)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Good,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub n: u64,
    pub p: u64,
    pub zero: CenterReport,
    pub minus_two: CenterReport,
    /// `gcd(Delta_{n,n}, Delta_{n,n}') mod p`.
    pub gamma: ModPoly,
    pub other_singular_factors: Vec<ExtraFactor>,
    pub verdict: Verdict,
    /// What keeps an inconclusive verdict open.
    pub gaps: Vec<String>,
}

/// Compare `rho` with `rho_bar` over `c = 0` and `c = -2` and look for
/// other repeated factors of `Delta_{n,n} mod p`.
pub fn fiber_report(n: u64, p: u64, budget: &Budget) -> Result<FiberReport> {
    let dnn = Family::quadratic().delta_nn_mod_p(n, p, budget)?;
    fiber_report_from(n, p, &dnn)
}

/// [`fiber_report`] with `Delta_{n,n} mod p` supplied.
pub fn fiber_report_from(n: u64, p: u64, dnn: &ModPoly) -> Result<FiberReport> {
    if dnn.p != p || dnn.is_zero() {
        return invalid("Delta_{n,n} mod p must be a nonzero polynomial over F_p");
    }
    let nu_n = Family::quadratic().nu(n) / n;
    let center = |c: Center| -> Result<CenterReport> {
        let orbits = orbits_mod_p(n, c, p, Level::Y0)?;
        let total: u64 = orbits.iter().map(|o| o.e).sum();
        if total != nu_n {
            return inconsistent(format!("ramification indices over {c} sum to {total}, expected {nu_n}"));
        }
        let t = orbits.len() as u64;
        let s = orbits.iter().filter(|o| o.wild).count() as u64;
        let tame = s == 0;
        let rho_bar_lb = nu_n - t + s;
        let root = (c.value().rem_euclid(p as i64)) as u64;
        let rho = dnn.valuation_at(root) as u64;
        if rho_bar_lb > rho {
            return inconsistent(format!("rho_bar over {c} is at least {rho_bar_lb} but rho = {rho}"));
        }
        let e = e_list(&orbits);
        Ok(CenterReport { center: c, rho, rho_bar_lb, tame, orbits, e })
    };
    let zero = center(Center::Zero)?;
    let minus_two = center(Center::MinusTwo)?;

    let gamma = gcd_mod(dnn, &dnn.derivative()?)?;
    let fp = PrimeField::new(p)?;
    let mut rest = gamma.to_elems(&fp);
    for r in [0, p - 2] {
        let lin = vec![fp.from_u64((p - r) % p), fp.one()];
        while let Some(q) = upoly::div_exact(&fp, &rest, &lin) {
            rest = q;
        }
    }
    let mut other = Vec::new();
    if upoly::degree::<PrimeField>(&rest).unwrap_or(0) >= 1 {
        let d = dnn.to_elems(&fp);
        for (h, _) in upoly::factor(&fp, &rest) {
            let mut k = 0;
            let mut q = d.clone();
            while let Some(next) = upoly::div_exact(&fp, &q, &h) {
                q = next;
                k += 1;
            }
            other.push(ExtraFactor { factor: ModPoly::from_elems(&fp, Var::C, &h), rho: k });
        }
    }

    let mut gaps = Vec::new();
    for c in [&zero, &minus_two] {
        if !c.settled() {
            gaps.push(format!(
                "over c = {}: rho = {} but rho_bar {} {}",
                c.center,
                c.rho,
                if c.tame { "=" } else { ">=" },
                c.rho_bar_lb
            ));
        }
    }
    for f in &other {
        gaps.push(format!("repeated factor {} of Delta_{{{n},{n}}} mod {p} not certified", f));
    }
    let verdict = if gaps.is_empty() { Verdict::Good } else { Verdict::Inconclusive };
    Ok(FiberReport { n, p, zero, minus_two, gamma, other_singular_factors: other, verdict, gaps })
}

/// `c^2 + 2c + 2` style rendering.
pub fn render_mod_poly(a: &ModPoly) -> String {
    let mut terms = Vec::new();
    for (i, &c) in a.coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let var = a.var.name();
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// One row of the reduction table, or the error that stopped it.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub n: u64,
    pub p: u64,
    pub report: std::result::Result<FiberReport, String>,
}

pub const TABLE_HEADER: [&str; 13] = [
    "n", "p", "rho0", "rho_bar0", "e0", "tame0", "rho_m2", "rho_bar_m2", "e_m2", "tame_m2", "other_sing", "verdict", "error",
];

impl TableRow {
    pub fn fields(&self) -> Vec<String> {
        let yes = |b: bool| if b { "yes" } else { "no" }.to_string();
        match &self.report {
            Ok(r) => {
                let other = if r.other_singular_factors.is_empty() {
                    "no".to_string()
                } else {
                    r.other_singular_factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ")
                };
                vec![
                    self.n.to_string(),
                    self.p.to_string(),
                    r.zero.rho.to_string(),
                    r.zero.rho_bar_text(),
                    render_e_list(&r.zero.e),
                    yes(r.zero.tame),
                    r.minus_two.rho.to_string(),
                    r.minus_two.rho_bar_text(),
                    render_e_list(&r.minus_two.e),
                    yes(r.minus_two.tame),
                    other,
                    format!("{:?}", r.verdict),
                    String::new(),
                ]
            }
            Err(e) => {
                let mut v = vec![self.n.to_string(), self.p.to_string()];
                v.extend(std::iter::repeat(String::new()).take(10));
                v.push(e.clone());
                v
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.report {
            Ok(r) => {
                let c = |c: &CenterReport| {
                    json!({
                        "rho": c.rho,
                        "rho_bar": c.rho_bar_lb,
                        "rho_bar_exact": c.tame || c.settled(),
                        "e": c.e.iter().map(|&(e, k)| json!([e, k])).collect::<Vec<_>>(),
                        "tame": c.tame,
                    })
                };
                json!({
                    "n": self.n,
                    "p": self.p,
                    "c0": c(&r.zero),
                    "c_minus2": c(&r.minus_two),
                    "other_singularities": r.other_singular_factors.iter()
                        .map(|f| json!({"factor": render_mod_poly(&f.factor), "rho": f.rho}))
                        .collect::<Vec<_>>(),
                    "verdict": format!("{:?}", r.verdict),
                    "gaps": r.gaps,
                })
            }
            Err(e) => json!({"n": self.n, "p": self.p, "error": e}),
        }
    }
}

/// Rows computed concurrently; a failing row carries its error.
pub fn reduction_table(rows: &[(u64, u64)], budget: &Budget) -> Vec<TableRow> {
    par::map_slice(rows, |&(n, p)| TableRow { n, p, report: fiber_report(n, p, budget).map_err(|e| e.to_string()) })
}

/// CSV rendering of [`reduction_table`] rows.
pub fn render_table_csv(rows: &[TableRow]) -> Result<String> {
    let mut out = TABLE_HEADER.join(",");
    out.push('\n');
    for r in rows {
        let f: Vec<String> = r.fields().into_iter().map(|s| if s.contains(',') { format!("\"{s}\"") } else { s }).collect();
        out.push_str(&f.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_set_sizes() {
        assert_eq!(formal_period_points(6, Center::Zero).unwrap().len(), 54);
        assert_eq!(formal_period_points(7, Center::Zero).unwrap().len(), 126);
        assert_eq!(formal_period_points(5, Center::MinusTwo).unwrap().len(), 30);
        for n in 2..=12 {
            formal_period_points(n, Center::Zero).unwrap();
            formal_period_points(n, Center::MinusTwo).unwrap();
        }
    }

    #[test]
    fn ramification_examples() {
        let o = orbits_mod_p(11, Center::Zero, 23, Level::Y0).unwrap();
        assert_eq!(e_list(&o), vec![(23, 8), (2, 1)]);
        assert_eq!(render_e_list(&e_list(&o)), "23^8,2");
        let o = orbits_mod_p(5, Center::Zero, 31, Level::Y0).unwrap();
        assert_eq!(e_list(&o), vec![(6, 1)]);
        let o = orbits_mod_p(5, Center::MinusTwo, 11, Level::Y1).unwrap();
        assert_eq!(e_list(&o), vec![(10, 1), (5, 1)]);
        assert_eq!(o.iter().filter(|x| x.e == 1).count(), 15);
        let o = orbits_mod_p(5, Center::MinusTwo, 11, Level::Y0).unwrap();
        assert_eq!(e_list(&o), vec![(2, 1)]);
        assert!(orbits_mod_p(5, Center::Zero, 7, Level::Y0).is_err());
    }

    #[test]
    fn six_three_extra_factor() {
        let r = fiber_report(6, 3, &Budget::unlimited()).unwrap();
        assert_eq!((r.zero.rho, r.zero.rho_bar_lb, r.minus_two.rho), (6, 6, 3));
        assert_eq!(r.other_singular_factors.len(), 1);
        assert_eq!(render_mod_poly(&r.other_singular_factors[0].factor), "c^2 + 2c + 2");
        assert_eq!(r.other_singular_factors[0].rho, 2);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn five_thirty_one_good() {
        let r = fiber_report(5, 31, &Budget::unlimited()).unwrap();
        assert_eq!((r.zero.rho, r.minus_two.rho), (5, 2));
        assert_eq!(r.verdict, Verdict::Good);
    }
}
