//! Dense univariate polynomials over any [`Field`].
//!
//! A polynomial is a `Vec` of coefficients, lowest degree first, with no
//! trailing zeros; the zero polynomial is the empty vector. Every function
//! takes the field as its first argument.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::field::Field;

pub type Poly<F> = Vec<<F as Field>::Elem>;

pub fn trim<F: Field>(f: &F, mut a: Poly<F>) -> Poly<F> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

/// Degree, `None` for zero.
pub fn degree<F: Field>(a: &[F::Elem]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn constant<F: Field>(f: &F, c: F::Elem) -> Poly<F> {
    trim(f, vec![c])
}

/// `x`.
pub fn x<F: Field>(f: &F) -> Poly<F> {
    vec![f.zero(), f.one()]
}

pub fn is_one<F: Field>(f: &F, a: &[F::Elem]) -> bool {
    a.len() == 1 && a[0] == f.one()
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o = f.add(o, s);
    }
    trim(f, out)
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| f.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| f.zero());
        out.push(f.sub(&x, &y));
    }
    trim(f, out)
}

pub fn neg<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F> {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn scale<F: Field>(f: &F, a: &[F::Elem], s: &F::Elem) -> Poly<F> {
    if f.is_zero(s) {
        return Vec::new();
    }
    a.iter().map(|c| f.mul(c, s)).collect()
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = f.mul(x, y);
            out[i + j] = f.add(&out[i + j], &t);
        }
    }
    trim(f, out)
}

/// `a * b mod x^n`.
pub fn mul_trunc<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem], n: usize) -> Poly<F> {
    if a.is_empty() || b.is_empty() || n == 0 {
        return Vec::new();
    }
    let len = (a.len() + b.len() - 1).min(n);
    let mut out = vec![f.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            let t = f.mul(x, y);
            out[i + j] = f.add(&out[i + j], &t);
        }
    }
    trim(f, out)
}

pub fn pow<F: Field>(f: &F, a: &[F::Elem], mut e: u64) -> Poly<F> {
    let mut acc = vec![f.one()];
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(f, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(f, &base, &base);
        }
    }
    acc
}

/// Replace `a` by `a mod b` in place. `b` must be nonzero.
pub fn rem_in_place<F: Field>(f: &F, a: &mut Poly<F>, b: &[F::Elem]) {
    let db = b.len() - 1;
    let inv = f.inv(&b[db]).expect("nonzero leading coefficient");
    while a.len() > db {
        let top = a.len() - 1;
        let q = f.mul(&a[top], &inv);
        if !f.is_zero(&q) {
            let shift = top - db;
            for (j, bj) in b.iter().enumerate().take(db) {
                let t = f.mul(&q, bj);
                a[shift + j] = f.sub(&a[shift + j], &t);
            }
        }
        a.pop();
        while a.last().is_some_and(|c| f.is_zero(c)) {
            a.pop();
        }
    }
}

pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
    let mut r = trim(f, a.to_vec());
    rem_in_place(f, &mut r, b);
    r
}

/// Quotient and remainder. `b` must be nonzero.
pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F>, Poly<F>) {
    let mut r = trim(f, a.to_vec());
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let inv = f.inv(&b[db]).expect("nonzero leading coefficient");
    let mut q = vec![f.zero(); r.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = f.mul(&r[top], &inv);
        let shift = top - db;
        for (j, bj) in b.iter().enumerate().take(db) {
            let t = f.mul(&c, bj);
            r[shift + j] = f.sub(&r[shift + j], &t);
        }
        q[shift] = c;
        r.pop();
        while r.last().is_some_and(|c| f.is_zero(c)) {
            r.pop();
        }
    }
    (trim(f, q), r)
}

/// `a / b` if the division is exact.
pub fn div_exact<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Option<Poly<F>> {
    let (q, r) = divrem(f, a, b);
    r.is_empty().then_some(q)
}

pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F> {
    match a.last() {
        None => Vec::new(),
        Some(lc) => {
            let inv = f.inv(lc).expect("nonzero");
            scale(f, a, &inv)
        }
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
    let mut a = trim(f, a.to_vec());
    let mut b = trim(f, b.to_vec());
    while !b.is_empty() {
        rem_in_place(f, &mut a, &b);
        std::mem::swap(&mut a, &mut b);
    }
    monic(f, &a)
}

/// `(g, s, t)` with `g = s a + t b` monic.
pub fn ext_gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F>, Poly<F>, Poly<F>) {
    let (mut r0, mut r1) = (trim(f, a.to_vec()), trim(f, b.to_vec()));
    let (mut s0, mut s1) = (vec![f.one()], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![f.one()]);
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &q, &s1));
        let t2 = sub(f, &t0, &mul(f, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match r0.last() {
        None => (r0, s0, t0),
        Some(lc) => {
            let inv = f.inv(lc).expect("nonzero");
            (scale(f, &r0, &inv), scale(f, &s0, &inv), scale(f, &t0, &inv))
        }
    }
}

pub fn derivative<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F> {
    let out: Vec<_> =
        a.iter().enumerate().skip(1).map(|(i, c)| f.mul(c, &f.from_u64(i as u64))).collect();
    trim(f, out)
}

pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    let mut acc = f.zero();
    for c in a.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

/// Evaluate a polynomial with coefficients in a subfield `K` at a point of
/// an extension `L`, given the embedding.
pub fn eval_embedded<K: Field, L: Field>(
    l: &L,
    a: &[K::Elem],
    embed: impl Fn(&K::Elem) -> L::Elem,
    x: &L::Elem,
) -> L::Elem {
    let mut acc = l.zero();
    for c in a.iter().rev() {
        acc = l.add(&l.mul(&acc, x), &embed(c));
    }
    acc
}

pub fn mulmod<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Poly<F> {
    let mut p = mul(f, a, b);
    rem_in_place(f, &mut p, m);
    p
}

pub fn powmod<F: Field>(f: &F, a: &[F::Elem], mut e: u64, m: &[F::Elem]) -> Poly<F> {
    let mut acc = rem(f, &[f.one()], m);
    let mut base = rem(f, a, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mulmod(f, &base, &base, m);
        }
    }
    acc
}

pub fn powmod_big<F: Field>(f: &F, a: &[F::Elem], e: &BigUint, m: &[F::Elem]) -> Poly<F> {
    let base = rem(f, a, m);
    let mut acc = rem(f, &[f.one()], m);
    for i in (0..e.bits()).rev() {
        acc = mulmod(f, &acc, &acc, m);
        if e.bit(i) {
            acc = mulmod(f, &acc, &base, m);
        }
    }
    acc
}

/// Root of a monic linear polynomial `z + a0`.
pub fn neg_coeff_root<F: Field>(f: &F, g: &[F::Elem]) -> F::Elem {
    f.neg(&g[0])
}

fn sign_pow<F: Field>(f: &F, v: F::Elem, odd: bool) -> F::Elem {
    if odd {
        f.neg(&v)
    } else {
        v
    }
}

/// Resultant with respect to formal degrees `da >= deg a`, `db >= deg b`,
/// i.e. the determinant of the `(da+db)`-square Sylvester matrix. This is
/// the form that commutes with specialisation of coefficients.
pub fn resultant_formal<F: Field>(
    f: &F,
    a: &[F::Elem],
    da: usize,
    b: &[F::Elem],
    db: usize,
) -> F::Elem {
    let mut a = trim(f, a.to_vec());
    let mut b = trim(f, b.to_vec());
    let (mut da, mut db) = (da, db);
    assert!(a.len() <= da + 1 && b.len() <= db + 1, "formal degree below actual degree");
    let mut acc = f.one();
    loop {
        if da == 0 {
            let a0 = a.first().cloned().unwrap_or_else(|| f.zero());
            return f.mul(&acc, &f.pow(&a0, db as u64));
        }
        if db == 0 {
            let b0 = b.first().cloned().unwrap_or_else(|| f.zero());
            return f.mul(&acc, &f.pow(&b0, da as u64));
        }
        if a.is_empty() || b.is_empty() {
            return f.zero();
        }
        let na = a.len() - 1;
        let nb = b.len() - 1;
        if na < da {
            if nb < db {
                return f.zero();
            }
            // Res_{da,db}(a,b) = (-1)^{db(da+na)} lc(b)^{da-na} Res_{na,db}(a,b)
            let t = f.pow(b.last().unwrap(), (da - na) as u64);
            acc = f.mul(&acc, &sign_pow(f, t, (db * (da + na)) % 2 == 1));
            da = na;
            continue;
        }
        if nb < db {
            let t = f.pow(a.last().unwrap(), (db - nb) as u64);
            acc = f.mul(&acc, &t);
            db = nb;
            continue;
        }
        if da < db {
            if (da * db) % 2 == 1 {
                acc = f.neg(&acc);
            }
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut da, &mut db);
            continue;
        }
        // da >= db > 0, both exact.
        let lcb = b.last().unwrap().clone();
        rem_in_place(f, &mut a, &b);
        if a.is_empty() {
            return f.zero();
        }
        let k = a.len() - 1;
        let t = f.pow(&lcb, (da - k) as u64);
        acc = f.mul(&acc, &sign_pow(f, t, (da * db) % 2 == 1));
        // now Res_{db,k}(b, r)
        std::mem::swap(&mut a, &mut b);
        da = db;
        db = k;
    }
}

/// Resultant with respect to the actual degrees.
pub fn resultant<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    let da = a.len().saturating_sub(1);
    let db = b.len().saturating_sub(1);
    if a.is_empty() || b.is_empty() {
        return f.zero();
    }
    resultant_formal(f, a, da, b, db)
}

/// Newton interpolation through `(xs[i], ys[i])`; the `xs` must be distinct.
pub fn interpolate<F: Field>(f: &F, xs: &[F::Elem], ys: &[F::Elem]) -> Poly<F> {
    let n = xs.len();
    assert_eq!(n, ys.len());
    // divided differences in place
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = f.sub(&dd[i], &dd[i - 1]);
            let den = f.sub(&xs[i], &xs[i - j]);
            dd[i] = f.mul(&num, &f.inv(&den).expect("distinct interpolation nodes"));
        }
    }
    // Horner on the Newton form
    let mut out: Vec<F::Elem> = Vec::with_capacity(n);
    for i in (0..n).rev() {
        // out = out * (x - xs[i]) + dd[i]
        out.push(f.zero());
        for k in (1..out.len()).rev() {
            let t = f.mul(&out[k], &xs[i]);
            out[k] = f.sub(&out[k - 1], &t);
        }
        let t = f.mul(&out[0], &xs[i]);
        out[0] = f.sub(&dd[i], &t);
    }
    trim(f, out)
}

/// `1 / a mod x^n` for `a(0) != 0`.
pub fn series_inverse<F: Field>(f: &F, a: &[F::Elem], n: usize) -> Poly<F> {
    let inv0 = f.inv(&a[0]).expect("unit constant term");
    let mut out = Vec::with_capacity(n);
    out.push(inv0.clone());
    for k in 1..n {
        let mut s = f.zero();
        for j in 1..=k.min(a.len() - 1) {
            s = f.add(&s, &f.mul(&a[j], &out[k - j]));
        }
        out.push(f.neg(&f.mul(&s, &inv0)));
    }
    out
}

/// `p`-th root of a polynomial whose exponents are all multiples of `p`.
fn pth_root_poly<F: Field>(f: &F, a: &[F::Elem]) -> Option<Poly<F>> {
    let p = f.characteristic() as usize;
    let q = f.order();
    let e = &q / BigUint::from(p);
    let mut out = Vec::with_capacity(a.len() / p + 1);
    for (i, c) in a.iter().enumerate() {
        if i % p == 0 {
            out.push(f.pow_big(c, &e));
        } else if !f.is_zero(c) {
            return None;
        }
    }
    Some(trim(f, out))
}

/// `a^{1/n}` as a series with constant term 1, to precision `prec`.
fn series_root<F: Field>(f: &F, b: &[F::Elem], n: u64, prec: usize) -> Poly<F> {
    let ninv = f.inv(&f.from_u64(n)).expect("n invertible");
    let mut a = vec![f.one()];
    let mut cur = 1;
    while cur < prec {
        cur = (2 * cur).min(prec);
        // a <- a - (a^n - b) / (n a^{n-1})
        let mut pw = vec![f.one()];
        let mut base = a.clone();
        let mut e = n - 1;
        while e > 0 {
            if e & 1 == 1 {
                pw = mul_trunc(f, &pw, &base, cur);
            }
            e >>= 1;
            if e > 0 {
                base = mul_trunc(f, &base, &base, cur);
            }
        }
        let an = mul_trunc(f, &pw, &a, cur);
        let bt: Vec<_> = b.iter().take(cur).cloned().collect();
        let diff = sub(f, &an, &bt);
        let inv = series_inverse(f, &pw, cur);
        let corr = scale(f, &mul_trunc(f, &diff, &inv, cur), &ninv);
        a = sub(f, &a, &corr);
    }
    a
}

/// Write `a = u * m^n` with `m` monic and `u` a constant. Returns `None`
/// when `a` is not of that form (including `a = 0`).
pub fn nth_root<F: Field>(f: &F, a: &[F::Elem], n: u64) -> Option<(F::Elem, Poly<F>)> {
    let a = trim(f, a.to_vec());
    let lc = a.last()?.clone();
    if n == 1 {
        return Some((lc, monic(f, &a)));
    }
    let mut b = monic(f, &a);
    let p = f.characteristic();
    let mut n1 = n;
    while n1 % p == 0 {
        b = pth_root_poly(f, &b)?;
        n1 /= p;
    }
    let deg = b.len() - 1;
    if deg as u64 % n1 != 0 {
        return None;
    }
    let d = deg / n1 as usize;
    let rev: Vec<_> = b.iter().rev().cloned().collect();
    let root_rev = series_root(f, &rev, n1, d + 1);
    let mut m: Vec<_> = root_rev.into_iter().chain(std::iter::repeat(f.zero())).take(d + 1).collect();
    m.reverse();
    let m = trim(f, m);
    if pow(f, &m, n) != monic(f, &a) {
        return None;
    }
    Some((lc, m))
}

/// Square-free decomposition of a nonzero polynomial: monic pairwise coprime
/// square-free `(g_i, e_i)` with `a = lc(a) * prod g_i^{e_i}`.
pub fn squarefree<F: Field>(f: &F, a: &[F::Elem]) -> Vec<(Poly<F>, u64)> {
    let a = monic(f, a);
    let mut out = Vec::new();
    sqf_rec(f, &a, 1, &mut out);
    out.sort_by_key(|(_, e)| *e);
    out
}

fn sqf_rec<F: Field>(f: &F, a: &[F::Elem], mult: u64, out: &mut Vec<(Poly<F>, u64)>) {
    if a.len() <= 1 {
        return;
    }
    let da = derivative(f, a);
    let mut c = gcd(f, a, &da);
    let mut w = div_exact(f, a, &c).expect("gcd divides");
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd(f, &w, &c);
        let z = div_exact(f, &w, &y).expect("gcd divides");
        if z.len() > 1 {
            out.push((z, i * mult));
        }
        i += 1;
        c = div_exact(f, &c, &y).expect("gcd divides");
        w = y;
    }
    if c.len() > 1 {
        let r = pth_root_poly(f, &c).expect("remaining factor is a p-th power");
        sqf_rec(f, &r, mult * f.characteristic(), out);
    }
}

/// Distinct-degree factorisation of a monic square-free polynomial:
/// `(product of all irreducible factors of degree d, d)`.
pub fn ddf<F: Field>(f: &F, a: &[F::Elem]) -> Vec<(Poly<F>, usize)> {
    let q = f.order();
    let mut out = Vec::new();
    let mut rest = monic(f, a);
    let xx = x(f);
    let mut h = rem(f, &xx, &rest);
    let mut i = 1;
    while rest.len() > 2 * i {
        h = powmod_big(f, &h, &q, &rest);
        let g = gcd(f, &rest, &sub(f, &h, &xx));
        if g.len() > 1 {
            rest = div_exact(f, &rest, &g).expect("gcd divides");
            h = rem(f, &h, &rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.len() > 1 {
        let d = rest.len() - 1;
        out.push((rest, d));
    }
    out
}

/// Equal-degree splitting (odd characteristic): `a` is monic, square-free and
/// a product of irreducibles of degree `d`.
pub fn edf<F: Field>(f: &F, a: &[F::Elem], d: usize) -> Vec<Poly<F>> {
    assert!(f.characteristic() % 2 == 1, "equal-degree splitting needs odd characteristic");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ a.len() as u64);
    let e = (f.order().pow(d as u32) - 1u32) / 2u32;
    let mut out = Vec::new();
    let mut stack = vec![monic(f, a)];
    while let Some(g) = stack.pop() {
        if g.len() - 1 == d {
            out.push(g);
            continue;
        }
        loop {
            let r: Vec<_> = (0..g.len() - 1).map(|_| f.random(&mut rng)).collect();
            let r = trim(f, r);
            if r.len() <= 1 {
                continue;
            }
            let h = sub(f, &powmod_big(f, &r, &e, &g), &[f.one()]);
            let s = gcd(f, &g, &h);
            if s.len() > 1 && s.len() < g.len() {
                let t = div_exact(f, &g, &s).expect("gcd divides");
                stack.push(s);
                stack.push(t);
                break;
            }
        }
    }
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| format!("{x:?}").cmp(&format!("{y:?}"))));
    out
}

/// Complete factorisation into monic irreducibles with multiplicities.
pub fn factor<F: Field>(f: &F, a: &[F::Elem]) -> Vec<(Poly<F>, u64)> {
    let mut out = Vec::new();
    for (g, e) in squarefree(f, a) {
        for (h, d) in ddf(f, &g) {
            for irr in edf(f, &h, d) {
                out.push((irr, e));
            }
        }
    }
    out
}

/// Roots in the field itself (no multiplicities).
pub fn roots<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    let a = monic(f, a);
    if a.len() <= 1 {
        return Vec::new();
    }
    let xx = x(f);
    let xq = powmod_big(f, &xx, &f.order(), &a);
    let g = gcd(f, &a, &sub(f, &xq, &xx));
    if g.len() <= 1 {
        return Vec::new();
    }
    edf(f, &g, 1).into_iter().map(|l| f.neg(&l[0])).collect()
}

/// Ben-Or irreducibility test for a nonzero polynomial.
pub fn is_irreducible<F: Field>(f: &F, a: &[F::Elem]) -> bool {
    let a = monic(f, a);
    let n = match degree::<F>(&a) {
        None | Some(0) => return false,
        Some(n) => n,
    };
    let q = f.order();
    let xx = x(f);
    let mut h = rem(f, &xx, &a);
    for _ in 0..n / 2 {
        h = powmod_big(f, &h, &q, &a);
        if gcd(f, &a, &sub(f, &h, &xx)).len() > 1 {
            return false;
        }
    }
    true
}

/// Multiplicity of the root `r` of `a` (0 if not a root). `a` nonzero.
pub fn root_multiplicity<F: Field>(f: &F, a: &[F::Elem], r: &F::Elem) -> usize {
    let lin = vec![f.neg(r), f.one()];
    let mut cur = trim(f, a.to_vec());
    let mut k = 0;
    while !cur.is_empty() {
        match div_exact(f, &cur, &lin) {
            Some(q) => {
                cur = q;
                k += 1;
            }
            None => break,
        }
    }
    k
}
