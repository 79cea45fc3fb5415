//! Webs: crossings plus 2-valent marks, the working diagrams of movies.
//!
//! A mark subdivides an edge (and may carry framing weight). Edge ids are
//! arbitrary; a local move replaces some nodes by new ones on the same
//! boundary edges, so ids outside the move survive it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::MoveError;
use crate::cobcat::{FlatTangle, Pt};
use crate::complex::{BigradedComplex, CobRef, Grading};
use crate::diagram::{Dir, LinkDiagram};
use crate::khovanov::DENSE_LIMIT;
use crate::rational::q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    /// PD slots counterclockwise from the incoming under-strand.
    X { e: [Pt; 4], sign: i8 },
    /// `e = [in, out]`.
    Mark { e: [Pt; 2], w: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub kind: Kind,
    pub tag: Option<String>,
}

impl Node {
    pub fn x(e: [Pt; 4], sign: i8) -> Node {
        Node { kind: Kind::X { e, sign }, tag: None }
    }

    pub fn mark(i: Pt, o: Pt, w: i64) -> Node {
        Node { kind: Kind::Mark { e: [i, o], w }, tag: None }
    }

    pub fn tagged(mut self, t: impl Into<String>) -> Node {
        self.tag = Some(t.into());
        self
    }

    pub fn is_x(&self) -> bool {
        matches!(self.kind, Kind::X { .. })
    }

    pub fn edges(&self) -> &[Pt] {
        match &self.kind {
            Kind::X { e, .. } => e,
            Kind::Mark { e, .. } => e,
        }
    }

    fn edges_mut(&mut self) -> &mut [Pt] {
        match &mut self.kind {
            Kind::X { e, .. } => e,
            Kind::Mark { e, .. } => e,
        }
    }

    pub fn sign(&self) -> i8 {
        match self.kind {
            Kind::X { sign, .. } => sign,
            Kind::Mark { .. } => 0,
        }
    }

    /// Whether slot `k` is where a strand enters.
    pub fn is_in(&self, k: usize) -> bool {
        match self.kind {
            Kind::X { sign, .. } => k == 0 || k == if sign > 0 { 3 } else { 1 },
            Kind::Mark { .. } => k == 0,
        }
    }

    /// The other end of the strand through slot `k`.
    pub fn through(&self, k: usize) -> usize {
        match self.kind {
            Kind::X { .. } => (k + 2) % 4,
            Kind::Mark { .. } => 1 - k,
        }
    }

    /// Slot pairs (in, out) of the strands.
    pub fn strands(&self) -> Vec<(usize, usize)> {
        match self.kind {
            Kind::X { sign, .. } if sign > 0 => vec![(0, 2), (3, 1)],
            Kind::X { .. } => vec![(0, 2), (1, 3)],
            Kind::Mark { .. } => vec![(0, 1)],
        }
    }
}

/// Resolution arcs: 0-smoothing P[a,b]P[c,d], 1-smoothing P[a,d]P[b,c].
pub fn smoothing(e: [Pt; 4], bit: bool) -> [(Pt, Pt); 2] {
    if bit {
        [(e[0], e[3]), (e[1], e[2])]
    } else {
        [(e[0], e[1]), (e[2], e[3])]
    }
}

/// Crossing from directions of the under- and over-strand and their edges.
pub fn xnode(u: (i32, i32), o: (i32, i32), ui: Pt, uo: Pt, oi: Pt, oo: Pt) -> Node {
    let r = (u.1, -u.0);
    if r.0 * o.0 + r.1 * o.1 > 0 {
        Node::x([ui, oo, uo, oi], 1)
    } else {
        Node::x([ui, oi, uo, oo], -1)
    }
}

/// Slot position of one end of an edge.
pub type End = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Web {
    pub nodes: Vec<Node>,
    pub loops: BTreeSet<Pt>,
    next: Pt,
}

impl Web {
    pub fn new(nodes: Vec<Node>, loops: impl IntoIterator<Item = Pt>) -> Result<Web, MoveError> {
        let loops: BTreeSet<Pt> = loops.into_iter().collect();
        let next = nodes.iter().flat_map(|n| n.edges().iter().copied()).chain(loops.iter().copied()).max().map_or(0, |m| m + 1);
        let w = Web { nodes, loops, next };
        w.ends()?;
        Ok(w)
    }

    pub fn empty() -> Web {
        Web { nodes: vec![], loops: BTreeSet::new(), next: 0 }
    }

    pub fn fresh(&mut self) -> Pt {
        self.next += 1;
        self.next - 1
    }

    /// Tail and head slot of every non-loop edge.
    pub fn ends(&self) -> Result<HashMap<Pt, (End, End)>, MoveError> {
        let mut tail: HashMap<Pt, End> = HashMap::new();
        let mut head: HashMap<Pt, End> = HashMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for (k, &e) in n.edges().iter().enumerate() {
                let slot = if n.is_in(k) { &mut head } else { &mut tail };
                if slot.insert(e, (i, k)).is_some() || self.loops.contains(&e) {
                    return Err(MoveError::Malformed(format!("edge {e} is attached twice the same way")));
                }
            }
        }
        if tail.len() != head.len() || tail.keys().any(|e| !head.contains_key(e)) {
            return Err(MoveError::Malformed("dangling edge".into()));
        }
        Ok(tail.into_iter().map(|(e, t)| (e, (t, head[&e]))).collect())
    }

    /// Indices of crossing nodes in cube order.
    pub fn crossings(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_x()).collect()
    }

    pub fn framing_total(&self) -> i64 {
        self.nodes.iter().map(|n| if let Kind::Mark { w, .. } = n.kind { w } else { 0 }).sum()
    }

    pub fn writhe(&self) -> i64 {
        self.nodes.iter().map(|n| n.sign() as i64).sum::<i64>() + self.framing_total()
    }

    pub fn find_tag(&self, t: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.tag.as_deref() == Some(t))
    }

    /// All edges, sorted.
    pub fn edges(&self) -> Vec<Pt> {
        let mut v: BTreeSet<Pt> = self.loops.clone();
        for n in &self.nodes {
            v.extend(n.edges().iter().copied());
        }
        v.into_iter().collect()
    }

    /// Circles (sorted edge lists, sorted by smallest edge) of a resolution;
    /// bit i of `state` resolves the i-th crossing.
    pub fn circles(&self, state: u64) -> Vec<Vec<Pt>> {
        let edges = self.edges();
        let idx: HashMap<Pt, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut uf = Uf::new(edges.len());
        let mut bit = 0;
        for n in &self.nodes {
            match n.kind {
                Kind::X { e, .. } => {
                    for (a, b) in smoothing(e, state >> bit & 1 == 1) {
                        uf.union(idx[&a], idx[&b]);
                    }
                    bit += 1;
                }
                Kind::Mark { e, .. } => uf.union(idx[&e[0]], idx[&e[1]]),
            }
        }
        let mut groups: BTreeMap<usize, Vec<Pt>> = BTreeMap::new();
        for (i, &e) in edges.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(e);
        }
        let mut v: Vec<Vec<Pt>> = groups.into_values().collect();
        v.sort();
        v
    }

    pub fn state_grading(&self, state: u64) -> Grading {
        let mut g = Grading::default();
        for (bit, i) in self.crossings().into_iter().enumerate() {
            let (g1, g0) = resolution_gradings(self.nodes[i].sign());
            g = g + if state >> bit & 1 == 1 { g1 } else { g0 };
        }
        g.shift(0, -2 * self.framing_total())
    }

    /// Cube with one generator per state (index = state), loops labelled by
    /// their smallest edge, tags the state bits.
    pub fn full_cube(&self, cob: &CobRef) -> Result<BigradedComplex, MoveError> {
        let xs = self.crossings();
        let n = xs.len();
        if n > DENSE_LIMIT {
            return Err(MoveError::TooLarge(n));
        }
        let states: Vec<Vec<Vec<Pt>>> = (0..1u64 << n).map(|s| self.circles(s)).collect();
        let mut c = BigradedComplex::new(cob, vec![]);
        for (s, circ) in states.iter().enumerate() {
            let obj = cob.borrow_mut().intern(&FlatTangle::new([], circ.iter().map(|c| c[0])));
            let tag = (0..n).map(|i| (s >> i & 1) as i32).collect();
            c.add_gen(self.state_grading(s as u64), obj, tag);
        }
        for s in 0..1usize << n {
            for (i, &xi) in xs.iter().enumerate() {
                if s >> i & 1 == 0 {
                    continue;
                }
                let t = s ^ (1 << i);
                let sign = if (s & ((1 << i) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                let touched: BTreeSet<Pt> = self.nodes[xi].edges().iter().copied().collect();
                let m = closed_saddle(cob, &states[s], &states[t], &touched, c.gen(s).obj, c.gen(t).obj);
                c.add_d(s, t, &m.scaled(&q(sign)));
            }
        }
        Ok(c)
    }

    /// The edges of the oriented component through `e`.
    pub fn component(&self, e: Pt) -> BTreeSet<Pt> {
        let mut out = BTreeSet::from([e]);
        if self.loops.contains(&e) {
            return out;
        }
        let ends = self.ends().expect("valid web");
        let mut cur = e;
        loop {
            let (n, k) = ends[&cur].1;
            let node = &self.nodes[n];
            cur = node.edges()[node.through(k)];
            if !out.insert(cur) {
                return out;
            }
        }
    }

    /// Reverses the orientation of the component made of `comp`.
    pub fn reversed(&self, comp: &BTreeSet<Pt>) -> Web {
        let mut w = self.clone();
        for n in &mut w.nodes {
            match &mut n.kind {
                Kind::X { e, sign } => {
                    let under = comp.contains(&e[0]);
                    let over = comp.contains(&e[1]);
                    if under {
                        *e = [e[2], e[3], e[0], e[1]];
                    }
                    if under != over {
                        *sign = -*sign;
                    }
                }
                Kind::Mark { e, .. } => {
                    if comp.contains(&e[0]) {
                        e.swap(0, 1);
                    }
                }
            }
        }
        w
    }

    /// Inserts a weight-0 mark on `e`; returns (mark index, edge leaving it).
    /// On a loop the mark's two slots share the edge. The cube is unchanged.
    pub fn split_edge(&mut self, e: Pt) -> Result<(usize, Pt), MoveError> {
        if self.loops.remove(&e) {
            self.nodes.push(Node::mark(e, e, 0));
            return Ok((self.nodes.len() - 1, e));
        }
        let ends = self.ends()?;
        let &(_, (hn, hk)) = ends.get(&e).ok_or(MoveError::NoEdge(e))?;
        let f = self.fresh();
        self.nodes[hn].edges_mut()[hk] = f;
        self.nodes.push(Node::mark(e, f, 0));
        Ok((self.nodes.len() - 1, f))
    }

    /// Sum over connected components with crossings of 2 − (V − E + F), for
    /// the rotation system given by the slot order. Zero iff every
    /// component is drawn on a sphere.
    pub fn genus_defect(&self) -> Result<i64, MoveError> {
        let ends = self.ends()?;
        let xs = self.crossings();
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut comp: BTreeMap<usize, usize> = BTreeMap::new();
        let mut uf = Uf::new(self.nodes.len());
        let mut faces: Vec<usize> = Vec::new();
        for &n in &xs {
            for k in 0..4 {
                if seen.contains(&(n, k)) {
                    continue;
                }
                // arrive at (n, k), leave through the next slot counterclockwise
                let mut cur = (n, k);
                while seen.insert(cur) {
                    let go = (cur.1 + 1) % 4;
                    let nxt = super::iso::follow(self, &ends, cur.0, go)
                        .ok_or_else(|| MoveError::Malformed("crossing strand closed without a crossing".into()))?;
                    uf.union(cur.0, nxt.0);
                    cur = nxt;
                }
                faces.push(n);
            }
        }
        let mut nf: BTreeMap<usize, i64> = BTreeMap::new();
        for n in faces {
            *nf.entry(uf.find(n)).or_default() += 1;
        }
        for &n in &xs {
            *comp.entry(uf.find(n)).or_default() += 1;
        }
        Ok(comp.iter().map(|(r, &v)| 2 - (v as i64 - 2 * v as i64 + nf[r])).sum())
    }

    /// Removes weight-0 untagged marks, merging their edges.
    pub fn cleaned(&self) -> Web {
        let mut w = self.clone();
        loop {
            let Some(i) = w.nodes.iter().position(|n| matches!(n.kind, Kind::Mark { w: 0, .. }) && n.tag.is_none()) else {
                return w;
            };
            let [a, b] = match w.nodes[i].kind {
                Kind::Mark { e, .. } => e,
                _ => unreachable!(),
            };
            w.nodes.remove(i);
            if a == b {
                w.loops.insert(a);
                continue;
            }
            for n in &mut w.nodes {
                for x in n.edges_mut() {
                    if *x == b {
                        *x = a;
                    }
                }
            }
        }
    }

    /// From a closed diagram: crossings tagged `L{i}`, framing points as marks.
    pub fn from_diagram(d: &LinkDiagram) -> Web {
        let mut w = Web::from_crossings(d);
        for (k, &(e, wt)) in d.framing_points().iter().enumerate() {
            let (m, _) = w.split_edge(e).expect("diagram edge");
            if let Kind::Mark { w: x, .. } = &mut w.nodes[m].kind {
                *x = wt;
            }
            w.nodes[m].tag = Some(format!("f{k}"));
        }
        w
    }

    fn from_crossings(d: &LinkDiagram) -> Web {
        let nodes = d.crossings().iter().enumerate().map(|(i, x)| Node::x(x.e, x.sign).tagged(format!("L{i}"))).collect();
        let loops = (0..d.edges().len() as Pt).filter(|&e| d.is_loop_edge(e));
        Web::new(nodes, loops).expect("diagram is well formed")
    }
}

pub(crate) fn resolution_gradings(sign: i8) -> (Grading, Grading) {
    if sign > 0 {
        (Grading::hq(-1, 1), Grading::hq(0, 0))
    } else {
        (Grading::hq(0, 0), Grading::hq(1, -1))
    }
}

pub(crate) struct Uf(Vec<usize>);

impl Uf {
    pub fn new(n: usize) -> Uf {
        Uf((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let n = self.0[c];
            self.0[c] = r;
            c = n;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

fn closed_saddle(
    cob: &CobRef,
    src: &[Vec<Pt>],
    tgt: &[Vec<Pt>],
    touched: &BTreeSet<Pt>,
    so: u32,
    to: u32,
) -> crate::cobcat::Mor {
    use crate::cobcat::{CircleKey, Cobordism, Component};
    let hits = |c: &Vec<Pt>| c.iter().any(|e| touched.contains(e));
    let mut comps = Vec::new();
    let mut saddle = Component { circles: vec![], genus: 0, dots: 0 };
    for c in src {
        if hits(c) {
            saddle.circles.push(CircleKey::Src(c[0]));
        } else {
            comps.push(Component { circles: vec![CircleKey::Src(c[0]), CircleKey::Tgt(c[0])], genus: 0, dots: 0 });
        }
    }
    for c in tgt.iter().filter(|c| hits(c)) {
        saddle.circles.push(CircleKey::Tgt(c[0]));
    }
    comps.push(saddle);
    cob.borrow_mut().reduce_cobordism(so, to, &Cobordism { components: comps }).expect("saddle is well formed")
}

/// Belt geometry around one surgery region.
///
/// Strand i sits at x = i, belt m is a rectangle of radius m + 1 around the
/// strands, innermost first. On the lower arc the belt passes over the
/// strand and a positive belt runs east; on the upper arc the strand passes
/// over. Each strand carries a mark tagged `c{i}` between its lower and
/// upper crossings; belt crossings are tagged `b{m}.{i}.lo` / `.up`.
pub struct BeltStage {
    pub web: Web,
    pub dirs: Vec<Dir>,
    pub orient: Vec<bool>,
}

impl BeltStage {
    /// `d` with region `j`; other regions are ignored.
    pub fn new(d: &LinkDiagram, j: u32, orient: &[bool]) -> Result<BeltStage, MoveError> {
        let region = d.region(j).map_err(|e| MoveError::Malformed(e.to_string()))?.clone();
        let mut w = Web::from_diagram(d);
        // transits in listing order along each edge
        let mut last: HashMap<Pt, Pt> = HashMap::new();
        let mut centers = Vec::new();
        for (i, t) in region.strands.iter().enumerate() {
            let e = *last.get(&t.edge).unwrap_or(&t.edge);
            let (m, out) = w.split_edge(e)?;
            last.insert(t.edge, out);
            w.nodes[m].tag = Some(format!("c{i}"));
            if out == e && w.nodes[m].edges()[0] == e {
                // a loop: give the centre distinct sides
                w.split_edge(e)?;
            }
            centers.push(m);
        }
        let dirs: Vec<Dir> = region.strands.iter().map(|t| t.dir).collect();
        let l = dirs.len();
        let k = orient.len();
        if l == 0 {
            for _ in 0..k {
                let f = w.fresh();
                w.loops.insert(f);
            }
            return Ok(BeltStage { web: w, dirs, orient: orient.to_vec() });
        }
        // per crossing (strand, belt, upper): [strand in, strand out, belt in, belt out]
        let mut ports: BTreeMap<(usize, usize, bool), [Pt; 4]> = BTreeMap::new();
        for (i, &dir) in dirs.iter().enumerate() {
            let c = centers[i];
            let [cin, cout] = match w.nodes[c].kind {
                Kind::Mark { e, .. } => e,
                _ => unreachable!(),
            };
            let lower: Vec<(usize, bool)> = (0..k).rev().map(|m| (m, false)).collect();
            let upper: Vec<(usize, bool)> = (0..k).map(|m| (m, true)).collect();
            let (before, after) = match dir {
                Dir::Up => (lower, upper),
                Dir::Down => ((0..k).rev().map(|m| (m, true)).collect(), (0..k).map(|m| (m, false)).collect()),
            };
            // cin runs into the first crossing, cout leaves the last one
            let mut prev = cin;
            for &(m, up) in &before {
                let nx = w.fresh();
                let p = ports.entry((i, m, up)).or_insert([0; 4]);
                p[0] = prev;
                p[1] = nx;
                prev = nx;
            }
            let mid = prev;
            let mut prev = w.fresh();
            let center_out = prev;
            for (idx, &(m, up)) in after.iter().enumerate() {
                let nx = if idx + 1 == after.len() { cout } else { w.fresh() };
                let p = ports.entry((i, m, up)).or_insert([0; 4]);
                p[0] = prev;
                p[1] = nx;
                prev = nx;
            }
            if k > 0 {
                if let Kind::Mark { e, .. } = &mut w.nodes[c].kind {
                    *e = [mid, center_out];
                }
            }
        }
        for (m, &pos) in orient.iter().enumerate() {
            let seq: Vec<(usize, bool)> = if pos {
                (0..l).map(|i| (i, false)).chain((0..l).rev().map(|i| (i, true))).collect()
            } else {
                (0..l).map(|i| (i, true)).chain((0..l).rev().map(|i| (i, false))).collect()
            };
            let es: Vec<Pt> = seq.iter().map(|_| w.fresh()).collect();
            for (idx, key) in seq.iter().enumerate() {
                let p = ports.get_mut(&(key.0, m, key.1)).unwrap();
                p[2] = es[(idx + seq.len() - 1) % seq.len()];
                p[3] = es[idx];
            }
        }
        for ((i, m, up), p) in &ports {
            let vs = if dirs[*i] == Dir::Up { (0, 1) } else { (0, -1) };
            let lower = if orient[*m] { (1, 0) } else { (-1, 0) };
            let node = if *up {
                xnode((-lower.0, 0), vs, p[2], p[3], p[0], p[1])
            } else {
                xnode(vs, lower, p[0], p[1], p[2], p[3])
            };
            w.nodes.push(node.tagged(format!("b{m}.{i}.{}", if *up { "up" } else { "lo" })));
        }
        let web = Web::new(w.nodes, w.loops)?;
        Ok(BeltStage { web, dirs, orient: orient.to_vec() })
    }

    pub fn strands(&self) -> usize {
        self.dirs.len()
    }

    pub fn node(&self, m: usize, i: usize, up: bool) -> usize {
        self.web.find_tag(&format!("b{m}.{i}.{}", if up { "up" } else { "lo" })).expect("belt crossing")
    }
}
