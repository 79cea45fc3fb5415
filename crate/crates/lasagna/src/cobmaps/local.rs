//! Local replacements and the maps they induce on full cubes.
//!
//! A local map g: C(T) → C(T') between tangle cubes of the replaced region
//! becomes a map of closed cubes by gluing each basis surface to the product
//! cobordism outside the region. Bits of the local cube follow the region's
//! crossing order; the target web lists the untouched nodes first, so only
//! the source needs the reordering sign.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::web::{resolution_gradings, smoothing, Kind, Node, Uf, Web};
use super::MoveError;
use crate::cobcat::{CircleKey, Cob, Cobordism, Component, FlatTangle, Mor, ObjId, Pt};
use crate::complex::{BigradedComplex, ChainMap, CobRef, Grading};
use crate::linalg::{nullspace, SVec};
use crate::rational::{q, Q};

/// Nodes (indices into the web) and loops removed by a move, and what replaces them.
#[derive(Clone, Debug)]
pub struct Edit {
    pub remove: Vec<usize>,
    pub remove_loops: Vec<Pt>,
    pub insert: Vec<Node>,
    pub insert_loops: Vec<Pt>,
}

impl Edit {
    pub fn src_nodes(&self, w: &Web) -> Vec<Node> {
        self.remove.iter().map(|&i| w.nodes[i].clone()).collect()
    }

    pub fn apply(&self, w: &Web) -> Result<Web, MoveError> {
        let gone: BTreeSet<usize> = self.remove.iter().copied().collect();
        let mut nodes: Vec<Node> =
            w.nodes.iter().enumerate().filter(|(i, _)| !gone.contains(i)).map(|(_, n)| n.clone()).collect();
        nodes.extend(self.insert.iter().cloned());
        let mut loops = w.loops.clone();
        for l in &self.remove_loops {
            if !loops.remove(l) {
                return Err(MoveError::NoEdge(*l));
            }
        }
        loops.extend(self.insert_loops.iter().copied());
        if boundary(&self.src_nodes(w)) != boundary(&self.insert) {
            return Err(MoveError::Malformed("replacement changes the boundary".into()));
        }
        Web::new(nodes, loops)
    }
}

/// Edges met exactly once by the slots of `nodes`.
pub fn boundary(nodes: &[Node]) -> Vec<Pt> {
    let mut count: BTreeMap<Pt, usize> = BTreeMap::new();
    for n in nodes {
        for &e in n.edges() {
            *count.entry(e).or_default() += 1;
        }
    }
    count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect()
}

#[derive(Clone, Debug)]
enum Piece {
    Arc(Pt),
    Loop(Pt),
}

/// Components of the resolution `state` of a region: (edges, piece).
fn pieces(nodes: &[Node], loops: &[Pt], bnd: &[Pt], state: u64) -> Vec<(BTreeSet<Pt>, Piece)> {
    let mut edges: BTreeSet<Pt> = loops.iter().copied().collect();
    for n in nodes {
        edges.extend(n.edges().iter().copied());
    }
    let edges: Vec<Pt> = edges.into_iter().collect();
    let idx: HashMap<Pt, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut uf = Uf::new(edges.len());
    let mut bit = 0;
    for n in nodes {
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
    let mut groups: BTreeMap<usize, BTreeSet<Pt>> = BTreeMap::new();
    for (i, &e) in edges.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().insert(e);
    }
    groups
        .into_values()
        .map(|g| {
            let b: Vec<Pt> = g.iter().copied().filter(|e| bnd.binary_search(e).is_ok()).collect();
            let p = if b.is_empty() { Piece::Loop(*g.iter().next().unwrap()) } else { Piece::Arc(b[0]) };
            (g, p)
        })
        .collect()
}

fn piece_tangle(ps: &[(BTreeSet<Pt>, Piece)], bnd: &[Pt]) -> FlatTangle {
    let mut arcs = Vec::new();
    let mut loops = Vec::new();
    for (g, p) in ps {
        match p {
            Piece::Loop(l) => loops.push(*l),
            Piece::Arc(_) => {
                let b: Vec<Pt> = g.iter().copied().filter(|e| bnd.binary_search(e).is_ok()).collect();
                assert_eq!(b.len(), 2, "an arc has two ends");
                arcs.push((b[0], b[1]));
            }
        }
    }
    FlatTangle::new(arcs, loops)
}

/// Tangle cube of a region: generator index = local state.
pub fn tangle_cube(cob: &CobRef, nodes: &[Node], loops: &[Pt]) -> BigradedComplex {
    let bnd = boundary(nodes);
    let xs: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].is_x()).collect();
    let n = xs.len();
    let frame: i64 = nodes.iter().map(|x| if let Kind::Mark { w, .. } = x.kind { w } else { 0 }).sum();
    let states: Vec<_> = (0..1u64 << n).map(|s| pieces(nodes, loops, &bnd, s)).collect();
    let mut c = BigradedComplex::new(cob, bnd.clone());
    for (s, ps) in states.iter().enumerate() {
        let mut g = Grading::default();
        for (bit, &i) in xs.iter().enumerate() {
            let (g1, g0) = resolution_gradings(nodes[i].sign());
            g = g + if s >> bit & 1 == 1 { g1 } else { g0 };
        }
        let obj = cob.borrow_mut().intern(&piece_tangle(ps, &bnd));
        c.add_gen(g.shift(0, -2 * frame), obj, (0..n).map(|i| (s >> i & 1) as i32).collect());
    }
    for s in 0..1usize << n {
        for (bit, &i) in xs.iter().enumerate() {
            if s >> bit & 1 == 0 {
                continue;
            }
            let t = s ^ (1 << bit);
            let sign = if (s & ((1 << bit) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
            let touched: BTreeSet<Pt> = nodes[i].edges().iter().copied().collect();
            let m = local_saddle(cob, &states[s], &states[t], &touched, c.gen(s).obj, c.gen(t).obj);
            c.add_d(s, t, &m.scaled(&q(sign)));
        }
    }
    c
}

fn local_saddle(
    cob: &CobRef,
    src: &[(BTreeSet<Pt>, Piece)],
    tgt: &[(BTreeSet<Pt>, Piece)],
    touched: &BTreeSet<Pt>,
    so: ObjId,
    to: ObjId,
) -> Mor {
    let mut cob = cob.borrow_mut();
    let pair = cob.pair(so, to);
    let mut hit = BTreeSet::new();
    for (g, p) in src {
        if g.is_disjoint(touched) {
            continue;
        }
        hit.insert(match p {
            Piece::Arc(a) => pair.circle_of_point(*a),
            Piece::Loop(l) => pair.index_of(CircleKey::Src(*l)).unwrap(),
        });
    }
    for (g, p) in tgt {
        if g.is_disjoint(touched) {
            continue;
        }
        hit.insert(match p {
            Piece::Arc(a) => pair.circle_of_point(*a),
            Piece::Loop(l) => pair.index_of(CircleKey::Tgt(*l)).unwrap(),
        });
    }
    let mut comps = vec![Component { circles: hit.iter().map(|&i| pair.keys[i]).collect(), genus: 0, dots: 0 }];
    for (i, k) in pair.keys.iter().enumerate() {
        if hit.contains(&i) {
            continue;
        }
        match k {
            CircleKey::Arc(_) => comps.push(Component { circles: vec![*k], genus: 0, dots: 0 }),
            CircleKey::Src(l) => {
                comps.push(Component { circles: vec![*k, CircleKey::Tgt(*l)], genus: 0, dots: 0 });
            }
            CircleKey::Tgt(_) => {}
        }
    }
    cob.reduce_cobordism(so, to, &Cobordism { components: comps }).expect("local saddle is well formed")
}

/// The surface with one component through every circle of the pair (the
/// local picture of a birth, death, saddle or dot), reduced.
pub fn morse(cob: &CobRef, so: ObjId, to: ObjId, dots: u32) -> Mor {
    let mut cob = cob.borrow_mut();
    let pair = cob.pair(so, to);
    let comp = Component { circles: pair.keys.clone(), genus: 0, dots };
    cob.reduce_cobordism(so, to, &Cobordism { components: vec![comp] }).expect("connected surface")
}

/// Glues a local basis combination with the identity outside the region.
#[allow(clippy::too_many_arguments)]
fn globalize(
    cob: &mut Cob,
    ls: ObjId,
    lt: ObjId,
    f: &Mor,
    bnd: &[Pt],
    sc: &[Vec<Pt>],
    tc: &[Vec<Pt>],
    gs: ObjId,
    gt: ObjId,
) -> Result<Mor, MoveError> {
    let pair = cob.pair(ls, lt);
    let nk = pair.len();
    let circ = |cs: &[Vec<Pt>]| -> HashMap<Pt, usize> {
        cs.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&e| (e, i))).collect()
    };
    let (so, to) = (circ(sc), circ(tc));
    let (ns, nt) = (sc.len(), tc.len());
    let mut uf = Uf::new(nk + ns + nt);
    let mut touched = vec![false; ns];
    for (i, k) in pair.keys.iter().enumerate() {
        match k {
            CircleKey::Arc(_) => {
                for &b in bnd.iter().filter(|&&b| pair.circle_of_point(b) == i) {
                    touched[so[&b]] = true;
                    uf.union(i, nk + so[&b]);
                    uf.union(i, nk + ns + to[&b]);
                }
            }
            CircleKey::Src(l) => {
                touched[so[l]] = true;
                uf.union(i, nk + so[l]);
            }
            CircleKey::Tgt(l) => uf.union(i, nk + ns + to[l]),
        }
    }
    for (c, t) in touched.iter().enumerate() {
        if !t {
            uf.union(nk + c, nk + ns + to[&sc[c][0]]);
        }
    }
    let in_bnd: BTreeSet<Pt> = bnd.iter().copied().collect();
    // per class: (keys, euler characteristic, boundary circles)
    let mut classes: BTreeMap<usize, (Vec<usize>, i64, Vec<CircleKey>)> = BTreeMap::new();
    for i in 0..nk {
        let e = classes.entry(uf.find(i)).or_default();
        e.0.push(i);
        e.1 += 1;
    }
    for (c, cs) in sc.iter().enumerate() {
        let e = classes.entry(uf.find(nk + c)).or_default();
        e.1 -= cs.iter().filter(|x| in_bnd.contains(x)).count() as i64 / 2;
        e.2.push(CircleKey::Src(cs[0]));
    }
    for (c, cs) in tc.iter().enumerate() {
        classes.entry(uf.find(nk + ns + c)).or_default().2.push(CircleKey::Tgt(cs[0]));
    }
    let mut out = Mor::zero();
    for (mask, x) in f.terms() {
        let mut comps = Vec::new();
        for (keys, chi, circles) in classes.values() {
            if circles.is_empty() {
                return Err(MoveError::Malformed("closed component inside a local move".into()));
            }
            let twice_genus = 2 - chi - circles.len() as i64;
            if twice_genus < 0 || twice_genus % 2 != 0 {
                return Err(MoveError::Malformed(format!("glued surface has χ = {chi} with {} circles", circles.len())));
            }
            let dots = keys.iter().filter(|&&k| mask >> k & 1 == 1).count() as u32;
            comps.push(Component { circles: circles.clone(), genus: (twice_genus / 2) as u32, dots });
        }
        let r = cob.reduce_cobordism(gs, gt, &Cobordism { components: comps })?;
        out.add_scaled(x, &r);
    }
    Ok(out)
}

/// Global chain map of an edit with local map `g` (between the tangle cubes
/// of the removed and inserted nodes, in list order).
pub fn globalize_map(cob: &CobRef, src: &Web, edit: &Edit, g: &ChainMap) -> Result<(Web, ChainMap), MoveError> {
    let tgt = edit.apply(src)?;
    let gone: BTreeMap<usize, usize> = edit.remove.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let xs = src.crossings();
    let local_x: Vec<usize> = edit.remove.iter().copied().filter(|&i| src.nodes[i].is_x()).collect();
    let rest_x: Vec<usize> = xs.iter().copied().filter(|i| !gone.contains_key(i)).collect();
    let nr = rest_x.len();
    // new position of each source bit
    let pos: Vec<usize> = xs
        .iter()
        .map(|i| match rest_x.iter().position(|r| r == i) {
            Some(p) => p,
            None => nr + local_x.iter().position(|r| r == i).unwrap(),
        })
        .collect();
    let src_nodes = edit.src_nodes(src);
    let bnd = boundary(&src_nodes);
    let loc_s = tangle_cube(cob, &src_nodes, &edit.remove_loops);
    let loc_t = tangle_cube(cob, &edit.insert, &edit.insert_loops);
    let mut rows: BTreeMap<usize, Vec<(usize, &Mor)>> = BTreeMap::new();
    for ((u, v), m) in &g.entries {
        rows.entry(*u).or_default().push((*v, m));
    }
    let mut out = ChainMap::new(g.shift);
    let mut tcache: HashMap<u64, (Vec<Vec<Pt>>, ObjId)> = HashMap::new();
    for s in 0..1u64 << xs.len() {
        let mut t_rest = 0u64;
        let mut u = 0u64;
        let mut inv = 0usize;
        for j in 0..xs.len() {
            if s >> j & 1 == 0 {
                continue;
            }
            if pos[j] < nr {
                t_rest |= 1 << pos[j];
            } else {
                u |= 1 << (pos[j] - nr);
            }
            inv += (0..j).filter(|&k| s >> k & 1 == 1 && pos[k] > pos[j]).count();
        }
        let Some(row) = rows.get(&(u as usize)) else { continue };
        let sc = src.circles(s);
        let gs = cob.borrow_mut().intern(&FlatTangle::new([], sc.iter().map(|c| c[0])));
        let sign = if inv % 2 == 0 { Q::one() } else { -Q::one() };
        for &(v, m) in row {
            let t = t_rest | (v as u64) << nr;
            let (tc, gt) = tcache
                .entry(t)
                .or_insert_with(|| {
                    let tc = tgt.circles(t);
                    let gt = cob.borrow_mut().intern(&FlatTangle::new([], tc.iter().map(|c| c[0])));
                    (tc, gt)
                })
                .clone();
            let glob = globalize(
                &mut cob.borrow_mut(),
                loc_s.gen(u as usize).obj,
                loc_t.gen(v).obj,
                m,
                &bnd,
                &sc,
                &tc,
                gs,
                gt,
            )?;
            out.add(s as usize, t as usize, &glob, &sign);
        }
    }
    Ok((tgt, out))
}

/// A map C(T) → C(T') of tangle cubes that is a homotopy equivalence when
/// T and T' are isotopic: project to the minimal complex of T, match it with
/// the minimal complex of T' by an isomorphism, include.
pub fn isotopy_map(cs: &BigradedComplex, ct: &BigradedComplex) -> Result<ChainMap, MoveError> {
    let a = cs.simplify_tracked();
    let b = ct.simplify_tracked();
    let phi = minimal_iso(&a.complex, &b.complex)?;
    let g = a.pi.then(&phi, cs, &a.complex, &b.complex);
    Ok(g.then(&b.iota, cs, &b.complex, ct))
}

/// A degree-0 chain isomorphism between minimal complexes, found as a generic
/// element of the solution space of f∘d = d∘f.
pub fn minimal_iso(a: &BigradedComplex, b: &BigradedComplex) -> Result<ChainMap, MoveError> {
    let key = |c: &BigradedComplex| {
        let mut v: Vec<(Grading, ObjId)> = c.gens().iter().map(|g| (g.grading, g.obj)).collect();
        v.sort();
        v
    };
    if key(a) != key(b) {
        return Err(MoveError::NotIsotopic(a.len(), b.len()));
    }
    let cob = a.cob().clone();
    let mut vars: Vec<(usize, usize, u64)> = Vec::new();
    for (i, gi) in a.gens().iter().enumerate() {
        for (j, gj) in b.gens().iter().enumerate() {
            if gi.grading.h2 != gj.grading.h2 {
                continue;
            }
            let d2 = gi.grading.q2 - gj.grading.q2;
            if d2 % 2 != 0 {
                continue;
            }
            let mut c = cob.borrow_mut();
            let nk = c.pair(gi.obj, gj.obj).len();
            for m in 0..1u64 << nk {
                if 2 * c.degree(gi.obj, gj.obj, m) == d2 {
                    vars.push((i, j, m));
                }
            }
        }
    }
    let mut into_a: BTreeMap<usize, Vec<(usize, &Mor)>> = BTreeMap::new();
    for (s, t, m) in a.entries() {
        into_a.entry(t).or_default().push((s, m));
    }
    let mut eqs: BTreeMap<(usize, usize, u64), Vec<(usize, Q)>> = BTreeMap::new();
    {
        let mut c = cob.borrow_mut();
        for (v, &(i, j, m)) in vars.iter().enumerate() {
            let unit = Mor::single(m, Q::one());
            for (k, dm) in b.out(j) {
                let r = c.compose(a.gen(i).obj, b.gen(j).obj, b.gen(*k).obj, &unit, dm);
                for (mm, x) in r.terms() {
                    eqs.entry((i, *k, *mm)).or_default().push((v, x.clone()));
                }
            }
            for (i0, dm) in into_a.get(&i).map(|v| v.as_slice()).unwrap_or(&[]) {
                let r = c.compose(a.gen(*i0).obj, a.gen(i).obj, b.gen(j).obj, dm, &unit);
                for (mm, x) in r.terms() {
                    eqs.entry((*i0, j, *mm)).or_default().push((v, -x.clone()));
                }
            }
        }
    }
    let rows: Vec<SVec> = eqs.into_values().map(SVec::from_pairs).collect();
    let basis = nullspace(&rows, vars.len());
    // deterministic pseudo-random combinations
    let mut seed: u64 = 0x9e37_79b9;
    for _ in 0..8 {
        let mut coef: Vec<Q> = Vec::with_capacity(vars.len());
        coef.resize(vars.len(), Q::zero());
        for bv in &basis {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let c = q((seed >> 33) as i64 % 89 + 1);
            for (k, x) in &bv.0 {
                coef[*k] += &c * x;
            }
        }
        let mut f = ChainMap::new(Grading::default());
        for (v, &(i, j, m)) in vars.iter().enumerate() {
            if !coef[v].is_zero() {
                f.add(i, j, &Mor::single(m, Q::one()), &coef[v]);
            }
        }
        if degree_zero_invertible(a, b, &f) {
            // scale so the first identity-like entry is 1
            let lead = vars.iter().zip(&coef).find(|((i, j, m), c)| {
                *m == 0 && !c.is_zero() && a.gen(*i).obj == b.gen(*j).obj && a.gen(*i).grading == b.gen(*j).grading
            });
            return Ok(match lead {
                Some((_, c)) => f.scaled(&(Q::one() / c.clone())),
                None => f,
            });
        }
    }
    Err(MoveError::NotIsotopic(a.len(), b.len()))
}

/// The degree-0 diagonal blocks (equal grading and object) are invertible;
/// everything else is strictly upper triangular in q.
fn degree_zero_invertible(a: &BigradedComplex, b: &BigradedComplex, f: &ChainMap) -> bool {
    let mut blocks: BTreeMap<(Grading, ObjId), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, g) in a.gens().iter().enumerate() {
        blocks.entry((g.grading, g.obj)).or_default().0.push(i);
    }
    for (j, g) in b.gens().iter().enumerate() {
        blocks.entry((g.grading, g.obj)).or_default().1.push(j);
    }
    blocks.values().all(|(is, js)| {
        let rows: Vec<SVec> = js
            .iter()
            .map(|&j| {
                SVec::from_pairs(
                    is.iter()
                        .enumerate()
                        .filter_map(|(k, &i)| f.entries.get(&(i, j)).map(|m| (k, m.coeff(0))))
                        .collect(),
                )
            })
            .collect();
        crate::linalg::rank(rows) == is.len() && is.len() == js.len()
    })
}
