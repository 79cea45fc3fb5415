//! Cube of resolutions and KhR₂ homology.
//!
//! The cube is built in the KhR₂ normalisation directly: the differential runs
//! from the 1-resolution to the 0-resolution of each crossing, a positive
//! crossing places them at (h,q) = (−1,+1) and (0,0), a negative one at (0,0)
//! and (+1,−1), and a framing point of weight n shifts by (0,−n). Homology
//! then satisfies KhR₂^{h,q} = Kh^{−h,q+w} against the classical oracle.

mod bracket;
mod dense;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::cobcat::{CircleKey, Cobordism, Component, FlatTangle, FrobeniusSpec, Mor, Pt};
use crate::complex::{new_context, BigradedComplex, CobRef, ComplexError, DimTable, Grading, Window};
use crate::diagram::{Crossing, LinkDiagram};
use crate::rational::q;

pub use bracket::{bracket_euler, kauffman_bracket, Laurent};
pub use dense::{dense_dims, dense_dims_by_h, DENSE_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KhError {
    RegionPresent(u32),
    TooLarge(usize),
    Complex(ComplexError),
}

impl fmt::Display for KhError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KhError::RegionPresent(j) => write!(f, "surgery region {j} must be resolved before taking homology"),
            KhError::TooLarge(n) => write!(f, "{n} crossings exceed the dense oracle limit of {DENSE_LIMIT}"),
            KhError::Complex(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for KhError {}

impl From<ComplexError> for KhError {
    fn from(e: ComplexError) -> Self {
        KhError::Complex(e)
    }
}

fn check_closed(d: &LinkDiagram) -> Result<(), KhError> {
    match d.regions().first() {
        Some(r) => Err(KhError::RegionPresent(r.id)),
        None => Ok(()),
    }
}

/// Resolution arcs on the four slots: 0-smoothing P[a,b]P[c,d], 1-smoothing P[a,d]P[b,c].
fn smoothing(e: [Pt; 4], bit: bool) -> [(Pt, Pt); 2] {
    if bit {
        [(e[0], e[3]), (e[1], e[2])]
    } else {
        [(e[0], e[1]), (e[2], e[3])]
    }
}

/// Gradings (doubled) of the 1- and 0-resolutions of a crossing.
fn resolution_gradings(sign: i8) -> (Grading, Grading) {
    if sign > 0 {
        (Grading::hq(-1, 1), Grading::hq(0, 0))
    } else {
        (Grading::hq(0, 0), Grading::hq(1, -1))
    }
}

const VIRTUAL: Pt = 1 << 24;

/// Two-term complex of one crossing on its edge points.
fn crossing_complex(cob: &CobRef, ci: usize, x: &Crossing) -> BigradedComplex {
    let distinct: HashSet<Pt> = x.e.iter().copied().collect();
    let pts: [Pt; 4] = if distinct.len() == 4 { x.e } else { std::array::from_fn(|k| VIRTUAL + 4 * ci as Pt + k as Pt) };
    let (g1, g0) = resolution_gradings(x.sign);
    let (o1, o0) = {
        let mut c = cob.borrow_mut();
        (c.intern(&FlatTangle::new(smoothing(pts, true), [])), c.intern(&FlatTangle::new(smoothing(pts, false), [])))
    };
    let mut xc = BigradedComplex::new(cob, pts.to_vec());
    let a = xc.add_gen(g1, o1, vec![]);
    let b = xc.add_gen(g0, o0, vec![]);
    xc.add_d(a, b, &Mor::single(0, q(1)));
    if distinct.len() == 4 {
        return xc;
    }
    // a kink: pair each virtual slot with its edge, or with the slot sharing its edge
    let mut arcs = Vec::new();
    let mut used = [false; 4];
    for k in 0..4 {
        if used[k] {
            continue;
        }
        used[k] = true;
        match (k + 1..4).find(|&j| x.e[j] == x.e[k]) {
            Some(j) => {
                used[j] = true;
                arcs.push((pts[k], pts[j]));
            }
            None => arcs.push((pts[k], x.e[k])),
        }
    }
    let conn = cob.borrow_mut().intern(&FlatTangle::new(arcs, []));
    let cc = BigradedComplex::single(cob, conn, Grading::default());
    xc.planar_tensor(&cc).expect("same context")
}

/// Greedy scanning order: next crossing shares the most edges with the current boundary.
pub fn scan_order(d: &LinkDiagram) -> Vec<usize> {
    let n = d.crossings().len();
    let mut done = vec![false; n];
    let mut boundary: HashMap<Pt, usize> = HashMap::new();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let best = (0..n)
            .filter(|&i| !done[i])
            .max_by_key(|&i| {
                let shared = d.crossings()[i].e.iter().filter(|e| boundary.contains_key(e)).count();
                (shared, std::cmp::Reverse(i))
            })
            .unwrap();
        done[best] = true;
        order.push(best);
        for &e in &d.crossings()[best].e {
            *boundary.entry(e).or_insert(0) += 1;
        }
        boundary.retain(|_, c| *c == 1);
    }
    order
}

fn check_size(c: &BigradedComplex) {
    log::trace!("scanning: {} generators, {} entries", c.len(), c.entry_count());
}

/// The simplified KhR₂ complex of a closed diagram (framing shift included).
pub fn cube(d: &LinkDiagram, spec: &FrobeniusSpec) -> Result<BigradedComplex, KhError> {
    cube_in(&new_context(spec.clone()), d)
}

pub fn cube_in(cob: &CobRef, d: &LinkDiagram) -> Result<BigradedComplex, KhError> {
    check_closed(d)?;
    let e = cob.borrow_mut().intern(&FlatTangle::empty());
    let mut cur = BigradedComplex::single(cob, e, Grading::default());
    for ci in scan_order(d) {
        let x = crossing_complex(cob, ci, &d.crossings()[ci]);
        cur = cur.planar_tensor(&x)?.simplify();
        check_size(&cur);
    }
    for edge in 0..d.edges().len() as Pt {
        if d.is_loop_edge(edge) {
            let o = cob.borrow_mut().intern(&FlatTangle::new([], [edge]));
            let u = BigradedComplex::single(cob, o, Grading::default());
            cur = cur.planar_tensor(&u)?.simplify();
        }
    }
    Ok(cur.shifted(0, -2 * d.framing_total()))
}

/// Unsimplified cube with one generator per state; resolutions are closed
/// loops labelled by their smallest edge; tags are the state bits.
pub fn full_cube(cob: &CobRef, d: &LinkDiagram) -> Result<BigradedComplex, KhError> {
    check_closed(d)?;
    let n = d.crossings().len();
    if n > DENSE_LIMIT {
        return Err(KhError::TooLarge(n));
    }
    let states: Vec<Vec<Vec<Pt>>> = (0..1u64 << n).map(|s| state_circles(d, s)).collect();
    let mut c = BigradedComplex::new(cob, vec![]);
    for (s, circles) in states.iter().enumerate() {
        let mut g = Grading::default();
        for (i, x) in d.crossings().iter().enumerate() {
            let (g1, g0) = resolution_gradings(x.sign);
            g = g + if s >> i & 1 == 1 { g1 } else { g0 };
        }
        let obj = cob.borrow_mut().intern(&FlatTangle::new([], circles.iter().map(|c| c[0])));
        let tag = (0..n).map(|i| (s >> i & 1) as i32).collect();
        c.add_gen(g.shift(0, -2 * d.framing_total()), obj, tag);
    }
    for s in 0..1usize << n {
        for i in 0..n {
            if s >> i & 1 == 0 {
                continue;
            }
            let t = s ^ (1 << i);
            let sign = if (s & ((1 << i) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
            let touched: HashSet<Pt> = d.crossings()[i].e.iter().copied().collect();
            let m = saddle_between(cob, &states[s], &states[t], &touched, c.gen(s).obj, c.gen(t).obj);
            c.add_d(s, t, &m.scaled(&q(sign)));
        }
    }
    Ok(c)
}

/// Circles (sorted edge lists) of the resolution `state`, sorted by smallest edge.
pub fn state_circles(d: &LinkDiagram, state: u64) -> Vec<Vec<Pt>> {
    let n = d.edges().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (i, x) in d.crossings().iter().enumerate() {
        for (a, b) in smoothing(x.e, state >> i & 1 == 1) {
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            parent[ra] = rb;
        }
    }
    let mut groups: BTreeMap<usize, Vec<Pt>> = BTreeMap::new();
    for e in 0..n {
        let r = find(&mut parent, e);
        groups.entry(r).or_default().push(e as Pt);
    }
    let mut v: Vec<Vec<Pt>> = groups.into_values().collect();
    v.sort();
    v
}

fn saddle_between(
    cob: &CobRef,
    src: &[Vec<Pt>],
    tgt: &[Vec<Pt>],
    touched: &HashSet<Pt>,
    so: u32,
    to: u32,
) -> Mor {
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

/// KhR₂ dimensions inside `w` (c = 0).
pub fn khr2_dims(d: &LinkDiagram, w: &Window) -> Result<DimTable, KhError> {
    Ok(cube(d, &FrobeniusSpec::khovanov())?.homology_dims(w)?)
}

/// Classical Kh via Kh^{h,q} = KhR₂^{−h,q−w}.
pub fn kh_dims(d: &LinkDiagram) -> Result<DimTable, KhError> {
    Ok(khr2_to_kh(&khr2_dims(d, &Window::all())?, d.writhe()))
}

pub fn khr2_to_kh(t: &DimTable, writhe: i64) -> DimTable {
    // KhR₂^{h,q} = Kh^{−h, q+w}
    let mut out = DimTable::new();
    for (g, n) in t.iter() {
        out.insert(Grading::new(-g.h2, g.q2 + 2 * writhe), n);
    }
    out
}

pub fn kh_to_khr2(t: &DimTable, writhe: i64) -> DimTable {
    let mut out = DimTable::new();
    for (g, n) in t.iter() {
        out.insert(Grading::new(-g.h2, g.q2 - 2 * writhe), n);
    }
    out
}

/// Shift by (w/2, −w/2): the renormalisation (tq⁻¹)^{w/2}.
pub fn tilde_renormalize(t: &DimTable, writhe: i64) -> DimTable {
    t.shift(writhe, -writhe)
}

/// Lee homology dimensions per homological degree (doubled h).
pub fn lee_dims_by_h(d: &LinkDiagram) -> Result<BTreeMap<i64, usize>, KhError> {
    Ok(cube(d, &FrobeniusSpec::lee())?.dims_by_h()?)
}
