//! The monodromy graph `Gamma(n)` of the quadratic family, sheet
//! permutations of `Y_1(n)` around its branch points, successor edges and
//! edge-removal robustness.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::ntheory::inv_mod;
use crate::budget::Budget;
use crate::error::{inconsistent, invalid, Result};
use crate::kneading::{angles_of_period, kneading_sequence, word_period, words_of_period, Angle, Itinerary, KneadingSequence};
use crate::par;

/// A vertex is the maximal rotation of an exact-period-`n` word.
pub type Vertex = Itinerary;

/// Maximal exact-period-`n` words, ordered by disparity (descending) then
/// lexicographically.
pub fn vertices(n: usize) -> Result<Vec<Vertex>> {
    let mut out: Vec<Vertex> = words_of_period(n)?.into_iter().filter(|v| v.is_maximal()).collect();
    out.sort_by(|a, b| b.disparity().cmp(&a.disparity()).then(a.cmp(b)));
    Ok(out)
}

fn orbit_vertex(bits: Vec<u8>) -> Result<Vertex> {
    Ok(Itinerary::new(bits)?.maximal_shift().0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Finite,
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub kind: EdgeKind,
    /// In vertex order.
    pub endpoints: [Vertex; 2],
    /// Primitive kneading sequence of the branch points (finite edges only).
    pub kneading: Option<KneadingSequence>,
    pub multiplicity: u64,
}

#[derive(Clone, Debug)]
pub struct MonodromyGraph {
    pub n: usize,
    pub vertices: Vec<Vertex>,
    pub finite: Vec<Edge>,
    pub infinite: Vec<Edge>,
    index: HashMap<Vertex, usize>,
}

impl MonodromyGraph {
    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn finite_multiplicity(&self) -> u64 {
        self.finite.iter().map(|e| e.multiplicity).sum()
    }

    /// Finite edges merged over kneading labels, keyed by the
    /// lexicographically ordered endpoint pair.
    pub fn finite_multiset(&self) -> BTreeMap<(Vertex, Vertex), u64> {
        let mut out = BTreeMap::new();
        for e in &self.finite {
            let [a, b] = e.endpoints.clone();
            let key = if a <= b { (a, b) } else { (b, a) };
            *out.entry(key).or_insert(0) += e.multiplicity;
        }
        out
    }

    fn pair(&self, e: &Edge) -> (usize, usize) {
        (self.index[&e.endpoints[0]], self.index[&e.endpoints[1]])
    }

    /// Connectivity using every edge except finite edges whose index in
    /// `removed_finite` is set.
    fn connected_without(&self, removed_finite: &[bool]) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        for (i, e) in self.finite.iter().enumerate() {
            if !removed_finite[i] {
                let (a, b) = self.pair(e);
                uf.union(a, b);
            }
        }
        for e in &self.infinite {
            let (a, b) = self.pair(e);
            uf.union(a, b);
        }
        uf.components == 1
    }

    pub fn is_connected(&self) -> bool {
        self.connected_without(&vec![false; self.finite.len()])
    }
}

struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), components: n }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.components -= 1;
        }
    }
}

fn order_pair(index: &HashMap<Vertex, usize>, a: Vertex, b: Vertex) -> [Vertex; 2] {
    if index[&a] <= index[&b] {
        [a, b]
    } else {
        [b, a]
    }
}

/// Kneading sequences of all exact-period-`n` angles with their counts.
pub fn kneading_counts(n: usize, budget: &Budget) -> Result<BTreeMap<KneadingSequence, Vec<Angle>>> {
    if n < 2 {
        return invalid("monodromy graphs need n >= 2");
    }
    budget.charge(1u64 << n.min(62), "angle enumeration")?;
    let angles = angles_of_period(n as u32)?;
    let ks = par::map_slice(&angles, |&t| kneading_sequence(t));
    let mut out: BTreeMap<KneadingSequence, Vec<Angle>> = BTreeMap::new();
    for (t, k) in angles.into_iter().zip(ks) {
        out.entry(k).or_default().push(t);
    }
    Ok(out)
}

/// `Gamma(n)`: one finite edge per primitive kneading sequence `K`, joining
/// the orbits of `K_0` and `K_1` with multiplicity half the number of angles
/// with kneading sequence `K`, and one infinite edge per complement pair.
pub fn build_graph(n: usize, budget: &Budget) -> Result<MonodromyGraph> {
    let verts = vertices(n)?;
    let index: HashMap<Vertex, usize> = verts.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let mut finite = Vec::new();
    for (k, angles) in kneading_counts(n, budget)? {
        if !k.is_primitive() {
            continue;
        }
        if angles.len() % 2 != 0 {
            return inconsistent(format!("{} angles have kneading sequence {k}", angles.len()));
        }
        let a = orbit_vertex(k.resolve(0))?;
        let b = orbit_vertex(k.resolve(1))?;
        finite.push(Edge { kind: EdgeKind::Finite, endpoints: order_pair(&index, a, b), kneading: Some(k), multiplicity: angles.len() as u64 / 2 });
    }
    finite.sort_by_key(|e| (index[&e.endpoints[0]], index[&e.endpoints[1]], e.kneading.clone()));
    let mut infinite = Vec::new();
    for v in &verts {
        let c = v.complement().maximal_shift().0;
        if index[v] < index[&c] {
            infinite.push(Edge { kind: EdgeKind::Infinite, endpoints: [v.clone(), c], kneading: None, multiplicity: 1 });
        }
    }
    Ok(MonodromyGraph { n, vertices: verts, finite, infinite, index })
}

/// Successor of a vertex, as a vertex.
pub fn successor(v: &Vertex) -> Result<Vertex> {
    v.successor()
}

/// An edge `v -> s(v)` guaranteed to exist in `Gamma(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuccessorEdge {
    pub from: Vertex,
    pub to: Vertex,
    /// Guaranteed lower bound on the number of such edges.
    pub multiplicity: u64,
}

pub fn successor_edge(v: &Vertex) -> Result<SuccessorEdge> {
    let n = v.n() as i64;
    if v.disparity() >= n - 2 {
        return invalid(format!("{v} has maximal disparity and no successor edge"));
    }
    let to = v.successor()?;
    Ok(SuccessorEdge { from: v.maximal_shift().0, to, multiplicity: if v.disparity() >= 0 { 2 } else { 1 } })
}

/// Successor edges from every vertex of disparity below `n - 2`.
pub fn successor_edges(n: usize) -> Result<Vec<SuccessorEdge>> {
    let n_i = n as i64;
    vertices(n)?.iter().filter(|v| v.disparity() < n_i - 2).map(successor_edge).collect()
}

/// Sheets of `Y_1(n)` are the exact-period-`n` words, numbered by orbit
/// (orbits ordered by least rotation) and within an orbit by successive
/// shifts of the least rotation.
pub fn sheets(n: usize) -> Result<Vec<Itinerary>> {
    let mut mins: Vec<Itinerary> = words_of_period(n)?.into_iter().filter(|w| w.minimal_shift() == *w).collect();
    mins.sort();
    Ok(mins.iter().flat_map(|w| (0..n).map(move |j| w.shift_by(j))).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BranchKind {
    /// Root of a primitive component.
    Primitive,
    /// Root of a period-`n` component bifurcating from a period-`k`
    /// component with multiplier `exp(2 pi i p / q)`, `n = k q`.
    Satellite { k: usize, p: u64, q: u64 },
    /// The branch point at infinity.
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheetPermutation {
    pub n: usize,
    pub kind: BranchKind,
    /// `None` at infinity.
    pub kneading: Option<KneadingSequence>,
    /// Angles landing at branch points of this class.
    pub angles: Vec<Angle>,
    /// `images[i]` is the image of sheet `i` (0-based).
    pub images: Vec<usize>,
}

impl SheetPermutation {
    /// Nontrivial cycles with 1-based sheet numbers, each starting at its
    /// least element, ordered by least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for s in 0..self.images.len() {
            if seen[s] || self.images[s] == s {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x + 1);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }

    pub fn cycle_string(&self) -> String {
        self.cycles()
            .iter()
            .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
            .collect()
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64))
    }
}

struct SheetIndex {
    sheets: Vec<Itinerary>,
    index: HashMap<Itinerary, usize>,
}

impl SheetIndex {
    fn new(n: usize) -> Result<Self> {
        let sheets = sheets(n)?;
        let index = sheets.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Ok(SheetIndex { sheets, index })
    }

    fn of(&self, bits: Vec<u8>) -> Result<usize> {
        let w = Itinerary::new(bits)?;
        Ok(self.index[&w])
    }

    fn identity(&self) -> Vec<usize> {
        (0..self.sheets.len()).collect()
    }
}

/// Kind of the branch point where `theta` lands.
pub fn branch_kind(theta: Angle) -> Result<BranchKind> {
    let k = kneading_sequence(theta);
    if k.is_primitive() {
        return Ok(BranchKind::Primitive);
    }
    let n = k.n();
    let (p0, p1) = (word_period(&k.resolve(0)), word_period(&k.resolve(1)));
    let parent = match (p0 == n, p1 == n) {
        (true, false) => p1,
        (false, true) => p0,
        _ => return inconsistent(format!("kneading sequence {k} of {theta} has resolutions of periods {p0} and {p1}")),
    };
    let q = n / parent;
    let (p, q) = rotation_number(theta, parent, q)?;
    Ok(BranchKind::Satellite { k: parent, p, q })
}

/// Rotation number of the first return `2^k` on `theta, 2^k theta, ...`,
/// read from the cyclic order of those `q` points.
fn rotation_number(theta: Angle, k: usize, q: usize) -> Result<(u64, u64)> {
    let mut pts = vec![theta];
    for _ in 1..q {
        let mut t = *pts.last().expect("nonempty");
        for _ in 0..k {
            t = t.double();
        }
        pts.push(t);
    }
    let mut sorted = pts.clone();
    sorted.sort();
    let pos = |t: &Angle| sorted.iter().position(|s| s == t).expect("present");
    let advance = (pos(&pts[1 % q]) + q - pos(&pts[0])) % q;
    for j in 0..q {
        if (pos(&pts[(j + 1) % q]) + q - pos(&pts[j])) % q != advance {
            return inconsistent(format!("doubling orbit of {theta} is not a combinatorial rotation"));
        }
    }
    if num_integer::gcd(advance, q) != 1 {
        return inconsistent(format!("rotation {advance}/{q} of {theta} is not in lowest terms"));
    }
    Ok((advance as u64, q as u64))
}

fn permutation_for(kind: &BranchKind, k: &KneadingSequence, idx: &SheetIndex) -> Result<Vec<usize>> {
    let n = k.n();
    let mut images = idx.identity();
    match *kind {
        BranchKind::Primitive => {
            let (k0, k1) = (Itinerary::new(k.resolve(0))?, Itinerary::new(k.resolve(1))?);
            for j in 0..n {
                let (a, b) = (idx.index[&k0.shift_by(j)], idx.index[&k1.shift_by(j)]);
                images[a] = b;
                images[b] = a;
            }
        }
        BranchKind::Satellite { k: parent, p, q } => {
            let kp = if word_period(&k.resolve(0)) == n { k.resolve(0) } else { k.resolve(1) };
            let kp = Itinerary::new(kp)?;
            let p_inv = inv_mod(p, q).ok_or_else(|| crate::Error::Inconsistent(format!("{p} not invertible mod {q}")))?;
            let step = parent * p_inv as usize;
            for j in 0..n {
                images[idx.index[&kp.shift_by(j)]] = idx.index[&kp.shift_by(j + step)];
            }
        }
        BranchKind::Infinity => unreachable!("infinity has no kneading sequence"),
    }
    Ok(images)
}

/// The sheet permutation around the branch point where `theta` lands.
pub fn branch_permutation(theta: Angle) -> Result<SheetPermutation> {
    let n = theta.period as usize;
    let idx = SheetIndex::new(n)?;
    let k = kneading_sequence(theta);
    let kind = branch_kind(theta)?;
    let images = permutation_for(&kind, &k, &idx)?;
    Ok(SheetPermutation { n, kind, kneading: Some(k), angles: vec![theta], images })
}

/// Complement involution on the sheets.
pub fn infinity_permutation(n: usize) -> Result<SheetPermutation> {
    let idx = SheetIndex::new(n)?;
    let images = idx.sheets.iter().map(|w| idx.of(w.complement().bits().to_vec())).collect::<Result<Vec<_>>>()?;
    Ok(SheetPermutation { n, kind: BranchKind::Infinity, kneading: None, angles: vec![], images })
}

/// One permutation per class of finite branch points (angles with the same
/// kneading sequence and kind give the same permutation), then infinity.
pub fn monodromy_permutations(n: usize, budget: &Budget) -> Result<Vec<SheetPermutation>> {
    let idx = SheetIndex::new(n)?;
    let mut classes: BTreeMap<(KneadingSequence, BranchKind), Vec<Angle>> = BTreeMap::new();
    for (k, angles) in kneading_counts(n, budget)? {
        for t in angles {
            classes.entry((k.clone(), branch_kind(t)?)).or_default().push(t);
        }
    }
    let mut out = Vec::new();
    for ((k, kind), angles) in classes {
        let images = permutation_for(&kind, &k, &idx)?;
        out.push(SheetPermutation { n, kind, kneading: Some(k), angles, images });
    }
    out.sort_by_key(|s| s.angles[0]);
    out.push(infinity_permutation(n)?);
    Ok(out)
}

/// True when the permutations generate a transitive group.
pub fn is_transitive(perms: &[SheetPermutation]) -> bool {
    let Some(first) = perms.first() else {
        return false;
    };
    let mut uf = UnionFind::new(first.images.len());
    for p in perms {
        for (i, &j) in p.images.iter().enumerate() {
            uf.union(i, j);
        }
    }
    uf.components == 1
}

/// Copies of one finite edge removed by a robustness witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Removal {
    pub endpoints: [Vertex; 2],
    pub kneading: Option<KneadingSequence>,
    pub copies: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Robustness {
    pub n: usize,
    pub k: u64,
    pub connected: bool,
    pub subsets_checked: u64,
    /// First disconnecting removal in lexicographic order.
    pub witness: Option<Vec<Removal>>,
}

/// Multisets of `k` finite edge copies, as `(edge index, copies)` lists,
/// in lexicographic order.
fn removal_sets(mult: &[u64], k: u64) -> Vec<Vec<(usize, u64)>> {
    fn rec(mult: &[u64], start: usize, left: u64, cur: &mut Vec<(usize, u64)>, out: &mut Vec<Vec<(usize, u64)>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..mult.len() {
            for c in (1..=mult[i].min(left)).rev() {
                cur.push((i, c));
                rec(mult, i + 1, left - c, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(mult, 0, k, &mut Vec::new(), &mut out);
    out
}

fn count_removal_sets(mult: &[u64], k: u64) -> u128 {
    // ways[j] = number of multisets of size j over the edges seen so far
    let mut ways = vec![0u128; k as usize + 1];
    ways[0] = 1;
    for &m in mult {
        let mut next = vec![0u128; k as usize + 1];
        for (j, &w) in ways.iter().enumerate() {
            for c in 0..=m.min(k - j as u64) {
                let t = j + c as usize;
                next[t] = next[t].saturating_add(w);
            }
        }
        ways = next;
    }
    ways[k as usize]
}

/// Remove every `k` copies of finite edges and test connectivity (infinite
/// edges included). Removing some copies of a multiple edge keeps the rest.
pub fn robustness(g: &MonodromyGraph, k: u64, budget: &Budget) -> Result<Robustness> {
    if k == 0 {
        return invalid("robustness needs k >= 1");
    }
    let mult: Vec<u64> = g.finite.iter().map(|e| e.multiplicity).collect();
    let total = count_removal_sets(&mult, k);
    let cost = u64::try_from(total.saturating_mul(g.finite.len().max(1) as u128)).unwrap_or(u64::MAX);
    budget.charge(cost, "robustness enumeration")?;
    if g.finite_multiplicity() < k {
        return Ok(Robustness { n: g.n, k, connected: g.is_connected(), subsets_checked: 0, witness: None });
    }
    let sets = removal_sets(&mult, k);
    let hit = par::find_first(sets.len(), |i| {
        let mut removed = vec![false; mult.len()];
        for &(e, c) in &sets[i] {
            removed[e] = c == mult[e];
        }
        (!g.connected_without(&removed)).then_some(())
    });
    let witness = hit.map(|(i, ())| {
        sets[i]
            .iter()
            .map(|&(e, c)| Removal { endpoints: g.finite[e].endpoints.clone(), kneading: g.finite[e].kneading.clone(), copies: c })
            .collect()
    });
    let checked = match hit {
        Some((i, _)) => i as u64 + 1,
        None => sets.len() as u64,
    };
    Ok(Robustness { n: g.n, k, connected: witness.is_none(), subsets_checked: checked, witness })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

/// DOT (one line per edge copy; finite solid, infinite dashed) or JSON.
pub fn export_graph(g: &MonodromyGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Dot => {
            let mut s = format!("graph gamma_{} {{\n", g.n);
            for v in &g.vertices {
                let _ = writeln!(s, "  \"{v}\" [disparity={}];", v.disparity());
            }
            for e in &g.finite {
                let label = e.kneading.as_ref().map(|k| k.to_string()).unwrap_or_default();
                for _ in 0..e.multiplicity {
                    let _ = writeln!(s, "  \"{}\" -- \"{}\" [style=solid, label=\"{label}\"];", e.endpoints[0], e.endpoints[1]);
                }
            }
            for e in &g.infinite {
                let _ = writeln!(s, "  \"{}\" -- \"{}\" [style=dashed];", e.endpoints[0], e.endpoints[1]);
            }
            s.push_str("}\n");
            s
        }
        GraphFormat::Json => {
            let verts: Vec<Value> = g.vertices.iter().map(|v| json!({"necklace": v, "disparity": v.disparity()})).collect();
            let edges: Vec<Value> = g.finite.iter().chain(&g.infinite).map(|e| json!(e)).collect();
            serde_json::to_string_pretty(&json!({"n": g.n, "vertices": verts, "edges": edges})).expect("serializable") + "\n"
        }
    }
}
