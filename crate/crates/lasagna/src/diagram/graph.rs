//! Diagrams as port graphs: crossings are 4-valent nodes, framing points and
//! region transits are 2-valent marks. Rewrites splice nodes into segments and
//! `rebuild` turns the graph back into an edge list.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortRef {
    pub node: usize,
    pub port: u8,
}

#[derive(Clone, Debug, PartialEq)]
enum PNode {
    X { sign: i8 },
    Frame(i64),
    Transit { region: u32, pos: usize, dir: Dir },
    Pass,
    Dead,
}

/// An open end of a partially built strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dangling {
    /// An out-port waiting for its successor.
    Out(PortRef),
    /// An in-port waiting for its predecessor.
    In(PortRef),
}

/// Crossing placed from traversal directions of the two strands.
#[derive(Clone, Copy, Debug)]
pub struct GeomCrossing {
    pub node: usize,
    pub under_in: PortRef,
    pub under_out: PortRef,
    pub over_in: PortRef,
    pub over_out: PortRef,
}

impl GeomCrossing {
    pub fn ports(&self, over: bool) -> (PortRef, PortRef) {
        if over {
            (self.over_in, self.over_out)
        } else {
            (self.under_in, self.under_out)
        }
    }
}

#[derive(Clone, Debug)]
pub struct PortGraph {
    nodes: Vec<PNode>,
    next: HashMap<PortRef, (PortRef, String)>,
    prev: HashMap<PortRef, PortRef>,
    regions: Vec<u32>,
    fresh: usize,
    generated: HashSet<String>,
}

fn pr(node: usize, port: u8) -> PortRef {
    PortRef { node, port }
}

impl PortGraph {
    pub fn from_diagram(d: &LinkDiagram) -> PortGraph {
        let mut g = PortGraph {
            nodes: d.crossings().iter().map(|x| PNode::X { sign: x.sign }).collect(),
            next: HashMap::new(),
            prev: HashMap::new(),
            regions: d.regions().iter().map(|r| r.id).collect(),
            fresh: 0,
            generated: HashSet::new(),
        };
        let mut marks: Vec<Vec<usize>> = vec![vec![]; d.edges().len()];
        for &(e, w) in d.framing_points() {
            let n = g.push(PNode::Frame(w));
            marks[e as usize].push(n);
        }
        for r in d.regions() {
            for (pos, t) in r.strands.iter().enumerate() {
                let n = g.push(PNode::Transit { region: r.id, pos, dir: t.dir });
                marks[t.edge as usize].push(n);
            }
        }
        for e in 0..d.edges().len() as EdgeId {
            let hint = d.edge_name(e).to_string();
            let ms = &mut marks[e as usize];
            match (d.tail(e), d.head(e)) {
                (Some(t), Some(h)) => {
                    let mut cur = pr(t.crossing, t.slot as u8);
                    for &m in ms.iter() {
                        g.connect(cur, pr(m, 0), &hint);
                        cur = pr(m, 1);
                    }
                    g.connect(cur, pr(h.crossing, h.slot as u8), &hint);
                }
                _ => {
                    if ms.is_empty() {
                        let n = g.push(PNode::Pass);
                        ms.push(n);
                    }
                    for i in 0..ms.len() {
                        g.connect(pr(ms[i], 1), pr(ms[(i + 1) % ms.len()], 0), &hint);
                    }
                }
            }
        }
        g
    }

    fn push(&mut self, n: PNode) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    pub fn fresh_name(&mut self, stem: &str) -> String {
        self.fresh += 1;
        let s = format!("{stem}{}", self.fresh);
        self.generated.insert(s.clone());
        s
    }

    pub fn connect(&mut self, out: PortRef, inp: PortRef, hint: &str) {
        debug_assert!(self.is_out(out) && !self.is_out(inp), "connect {out:?} -> {inp:?}");
        self.next.insert(out, (inp, hint.to_string()));
        self.prev.insert(inp, out);
    }

    fn disconnect_out(&mut self, out: PortRef) -> Option<(PortRef, String)> {
        let r = self.next.remove(&out)?;
        self.prev.remove(&r.0);
        Some(r)
    }

    pub fn join(&mut self, a: Dangling, b: Dangling, hint: &str) {
        match (a, b) {
            (Dangling::Out(o), Dangling::In(i)) | (Dangling::In(i), Dangling::Out(o)) => self.connect(o, i, hint),
            _ => panic!("cannot join {a:?} and {b:?}: orientation mismatch"),
        }
    }

    fn is_out(&self, p: PortRef) -> bool {
        match &self.nodes[p.node] {
            PNode::X { sign } => {
                let over_out = if *sign > 0 { 1 } else { 3 };
                p.port == 2 || p.port == over_out
            }
            _ => p.port == 1,
        }
    }

    pub fn add_crossing(&mut self, sign: i8) -> usize {
        self.push(PNode::X { sign })
    }

    /// Places a crossing whose under/over strands travel along `u`/`o` (perpendicular).
    pub fn geom_crossing(&mut self, u: (i32, i32), o: (i32, i32)) -> GeomCrossing {
        assert_eq!(u.0 * o.0 + u.1 * o.1, 0, "strands must be perpendicular");
        // counterclockwise quarter turn of −u
        let r = (u.1, -u.0);
        let positive = r.0 * o.0 + r.1 * o.1 > 0;
        let node = self.add_crossing(if positive { 1 } else { -1 });
        let (oi, oo) = if positive { (3, 1) } else { (1, 3) };
        GeomCrossing { node, under_in: pr(node, 0), under_out: pr(node, 2), over_in: pr(node, oi), over_out: pr(node, oo) }
    }

    pub fn add_mark_frame(&mut self, w: i64) -> usize {
        self.push(PNode::Frame(w))
    }

    /// Splice a 2-valent mark into the segment leaving `out`.
    fn splice_after(&mut self, out: PortRef, node: usize) {
        let (inp, hint) = self.disconnect_out(out).expect("segment exists");
        self.connect(out, pr(node, 0), &hint);
        self.connect(pr(node, 1), inp, &hint);
    }

    fn transits(&self, j: u32) -> Vec<(usize, usize, Dir)> {
        let mut v: Vec<_> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(n, x)| match x {
                PNode::Transit { region, pos, dir } if *region == j => Some((*pos, n, *dir)),
                _ => None,
            })
            .collect();
        v.sort();
        v.into_iter().map(|(p, n, d)| (n, p, d)).collect()
    }

    /// Surrounds each transit of region `j` with pass marks and returns, per
    /// strand (left to right): (transit node, pass before, pass after, dir).
    fn isolate(&mut self, j: u32) -> Result<Vec<(usize, usize, usize, Dir)>, DiagramError> {
        if !self.regions.contains(&j) {
            return Err(DiagramError::UnknownRegion(j));
        }
        let ts = self.transits(j);
        let mut out = Vec::new();
        for (n, _, dir) in ts {
            let before = self.push(PNode::Pass);
            let p = self.prev[&pr(n, 0)];
            self.splice_after(p, before);
            let after = self.push(PNode::Pass);
            self.splice_after(pr(n, 1), after);
            out.push((n, before, after, dir));
        }
        Ok(out)
    }

    fn remove_mark(&mut self, n: usize) -> (PortRef, PortRef, String) {
        let p = self.prev[&pr(n, 0)];
        let (_, hint) = self.disconnect_out(p).unwrap();
        let (q, _) = self.disconnect_out(pr(n, 1)).unwrap();
        self.nodes[n] = PNode::Dead;
        (p, q, hint)
    }

    /// Replaces region `j` by a braid on its strands (bottom to top),
    /// optionally putting a framing mark of weight `fw` on each strand.
    pub fn replace_region_by_braid(&mut self, j: u32, word: &[i32], fw: i64) -> Result<(), DiagramError> {
        let strands = self.isolate(j)?;
        let l = strands.len();
        let mut bottom = Vec::with_capacity(l);
        let mut top = Vec::with_capacity(l);
        let mut dirs = Vec::with_capacity(l);
        let mut hints = Vec::with_capacity(l);
        for &(t, before, after, dir) in &strands {
            let (_, _, hint) = self.remove_mark(t);
            // before.out and after.in are free now
            match dir {
                Dir::Up => {
                    bottom.push(Dangling::Out(pr(before, 1)));
                    top.push(Dangling::In(pr(after, 0)));
                }
                Dir::Down => {
                    bottom.push(Dangling::In(pr(after, 0)));
                    top.push(Dangling::Out(pr(before, 1)));
                }
            }
            dirs.push(dir);
            hints.push(hint);
        }
        let mut cur = bottom.clone();
        let mut cur_dirs = dirs.clone();
        let stem = format!("t{j}.");
        for &g in word {
            let p = (g.unsigned_abs() as usize)
                .checked_sub(1)
                .filter(|p| p + 1 < l)
                .ok_or_else(|| DiagramError::Invalid(format!("braid generator {g} out of range for {l} strands")))?;
            let (da, db) = (cur_dirs[p], cur_dirs[p + 1]);
            // strand a: bottom-left to top-right; strand b: bottom-right to top-left
            let va = if da == Dir::Up { (1, 1) } else { (-1, -1) };
            let vb = if db == Dir::Up { (-1, 1) } else { (1, -1) };
            let a_over = g > 0;
            let x = if a_over { self.geom_crossing(vb, va) } else { self.geom_crossing(va, vb) };
            let (a_in, a_out) = x.ports(a_over);
            let (b_in, b_out) = x.ports(!a_over);
            let new_a = self.attach(cur[p], da, a_in, a_out, &stem);
            let new_b = self.attach(cur[p + 1], db, b_in, b_out, &stem);
            cur[p] = new_b;
            cur[p + 1] = new_a;
            cur_dirs.swap(p, p + 1);
        }
        for i in 0..l {
            if cur_dirs[i] != dirs[i] {
                return Err(DiagramError::Orientation(format!(
                    "braid sends a strand onto position {} with the opposite direction",
                    i + 1
                )));
            }
            let mut end = cur[i];
            if fw != 0 {
                let m = self.add_mark_frame(fw);
                let name = self.fresh_name(&stem);
                end = match end {
                    Dangling::Out(o) => {
                        self.connect(o, pr(m, 0), &name);
                        Dangling::Out(pr(m, 1))
                    }
                    Dangling::In(p) => {
                        self.connect(pr(m, 1), p, &name);
                        Dangling::In(pr(m, 0))
                    }
                };
            }
            let name = if i < hints.len() { hints[i].clone() } else { self.fresh_name(&stem) };
            self.join(end, top[i], &name);
        }
        self.regions.retain(|&r| r != j);
        Ok(())
    }

    /// Connects the dangling end `d` (below the crossing) to the crossing's
    /// strand ports and returns the new dangling end above it.
    fn attach(&mut self, d: Dangling, dir: Dir, p_in: PortRef, p_out: PortRef, stem: &str) -> Dangling {
        let name = self.fresh_name(stem);
        match dir {
            Dir::Up => {
                self.join(d, Dangling::In(p_in), &name);
                Dangling::Out(p_out)
            }
            Dir::Down => {
                self.join(d, Dangling::Out(p_out), &name);
                Dangling::In(p_in)
            }
        }
    }

    /// Adds belts around region `j` just above its marker, innermost first.
    pub fn add_belts(&mut self, j: u32, orient: &[bool]) -> Result<(), DiagramError> {
        let strands = self.isolate(j)?;
        let l = strands.len();
        let k = orient.len();
        // crossing per (strand, belt, upper arc?)
        let mut xs: BTreeMap<(usize, usize, bool), GeomCrossing> = BTreeMap::new();
        for (i, &(_, _, _, dir)) in strands.iter().enumerate() {
            let vs = if dir == Dir::Up { (0, 1) } else { (0, -1) };
            for (m, &pos) in orient.iter().enumerate() {
                // lower arc: belt over strand; positive belts run east there
                let lower = if pos { (1, 0) } else { (-1, 0) };
                xs.insert((i, m, false), self.geom_crossing(vs, lower));
                let upper = (-lower.0, 0);
                xs.insert((i, m, true), self.geom_crossing(upper, vs));
            }
        }
        // strands, in traversal order
        for (i, &(t, before, after, dir)) in strands.iter().enumerate() {
            let mut seq: Vec<(usize, bool)> = (0..k).rev().map(|m| (m, false)).chain((0..k).map(|m| (m, true))).collect();
            let (start, end) = match dir {
                Dir::Up => (pr(t, 1), pr(after, 0)),
                Dir::Down => {
                    seq = (0..k).rev().map(|m| (m, true)).chain((0..k).map(|m| (m, false))).collect();
                    (pr(before, 1), pr(t, 0))
                }
            };
            let (_, hint) = self.disconnect_out(start).unwrap();
            let mut cur = start;
            for (idx, &(m, upper)) in seq.iter().enumerate() {
                let x = xs[&(i, m, upper)];
                let (pin, pout) = x.ports(upper);
                let name = if idx == 0 { hint.clone() } else { self.fresh_name(&format!("s{j}.")) };
                self.connect(cur, pin, &name);
                cur = pout;
            }
            let name = self.fresh_name(&format!("s{j}."));
            self.connect(cur, end, &name);
        }
        // belts
        for (m, &pos) in orient.iter().enumerate() {
            let name_stem = format!("b{j}.");
            if l == 0 {
                let n = self.push(PNode::Pass);
                let name = self.fresh_name(&name_stem);
                self.connect(pr(n, 1), pr(n, 0), &name);
                continue;
            }
            let seq: Vec<(usize, bool)> = if pos {
                (0..l).map(|i| (i, false)).chain((0..l).rev().map(|i| (i, true))).collect()
            } else {
                (0..l).map(|i| (i, true)).chain((0..l).rev().map(|i| (i, false))).collect()
            };
            for idx in 0..seq.len() {
                let (i, upper) = seq[idx];
                let (i2, upper2) = seq[(idx + 1) % seq.len()];
                let out = xs[&(i, m, upper)].ports(!upper).1;
                let inp = xs[&(i2, m, upper2)].ports(!upper2).0;
                let name = self.fresh_name(&name_stem);
                self.connect(out, inp, &name);
            }
        }
        Ok(())
    }

    /// Prefers names inherited from the input over generated ones.
    fn pick_hint<'a>(&self, hints: &'a [String]) -> &'a str {
        hints.iter().find(|h| !self.generated.contains(*h)).unwrap_or(&hints[0])
    }

    pub fn rebuild(&self) -> Result<LinkDiagram, DiagramError> {
        let mut names: Vec<String> = Vec::new();
        let mut used: HashSet<String> = HashSet::new();
        let mut edge_of_out: HashMap<PortRef, EdgeId> = HashMap::new();
        let mut edge_of_in: HashMap<PortRef, EdgeId> = HashMap::new();
        let mut framing: Vec<(EdgeId, i64)> = Vec::new();
        let mut transits: BTreeMap<u32, Vec<(usize, Transit)>> = BTreeMap::new();
        let mut visited_marks: HashSet<usize> = HashSet::new();
        let new_name = |hint: &str, used: &mut HashSet<String>| -> String {
            let mut s = hint.to_string();
            let mut k = 1;
            while used.contains(&s) {
                s = format!("{hint}.{k}");
                k += 1;
            }
            used.insert(s.clone());
            s
        };
        let record_mark = |n: usize, e: EdgeId, framing: &mut Vec<(EdgeId, i64)>, transits: &mut BTreeMap<u32, Vec<(usize, Transit)>>| {
            match &self.nodes[n] {
                PNode::Frame(w) => framing.push((e, *w)),
                PNode::Transit { region, pos, dir } => {
                    transits.entry(*region).or_default().push((*pos, Transit { edge: e, dir: *dir }))
                }
                _ => {}
            }
        };
        let xnodes: Vec<usize> = (0..self.nodes.len()).filter(|&n| matches!(self.nodes[n], PNode::X { .. })).collect();
        for &n in &xnodes {
            for port in 0..4u8 {
                let start = pr(n, port);
                if !self.is_out(start) {
                    continue;
                }
                let (mut cur, hint) = self
                    .next
                    .get(&start)
                    .cloned()
                    .ok_or_else(|| DiagramError::Dangling(format!("crossing port {start:?} unconnected")))?;
                let e = names.len() as EdgeId;
                let mut hints = vec![hint];
                edge_of_out.insert(start, e);
                while !matches!(self.nodes[cur.node], PNode::X { .. }) {
                    visited_marks.insert(cur.node);
                    record_mark(cur.node, e, &mut framing, &mut transits);
                    let nx = self
                        .next
                        .get(&pr(cur.node, 1))
                        .ok_or_else(|| DiagramError::Dangling(format!("mark {} unconnected", cur.node)))?;
                    hints.push(nx.1.clone());
                    cur = nx.0;
                }
                names.push(new_name(self.pick_hint(&hints), &mut used));
                edge_of_in.insert(cur, e);
            }
        }
        for n in 0..self.nodes.len() {
            if matches!(self.nodes[n], PNode::X { .. } | PNode::Dead) || visited_marks.contains(&n) {
                continue;
            }
            let e = names.len() as EdgeId;
            let mut hints = vec![];
            let mut cur = n;
            loop {
                visited_marks.insert(cur);
                record_mark(cur, e, &mut framing, &mut transits);
                let (nx, hint) = self
                    .next
                    .get(&pr(cur, 1))
                    .ok_or_else(|| DiagramError::Dangling(format!("mark {cur} unconnected")))?;
                hints.push(hint.clone());
                let nx = *nx;
                if matches!(self.nodes[nx.node], PNode::X { .. }) {
                    return Err(DiagramError::Invalid("loop walk reached a crossing".into()));
                }
                if nx.node == n {
                    break;
                }
                cur = nx.node;
            }
            names.push(new_name(self.pick_hint(&hints), &mut used));
        }
        let mut crossings = Vec::with_capacity(xnodes.len());
        for &n in &xnodes {
            let PNode::X { sign } = self.nodes[n] else { unreachable!() };
            let mut e = [0; 4];
            for port in 0..4u8 {
                let p = pr(n, port);
                e[port as usize] = if self.is_out(p) { edge_of_out[&p] } else { edge_of_in[&p] };
            }
            crossings.push(Crossing { e, sign });
        }
        let regions = self
            .regions
            .iter()
            .map(|&id| {
                let mut v = transits.remove(&id).unwrap_or_default();
                v.sort_by_key(|(p, _)| *p);
                SurgeryRegion { id, strands: v.into_iter().map(|(_, t)| t).collect() }
            })
            .collect();
        LinkDiagram::new(names, crossings, framing, regions, BTreeMap::new())
    }
}
