//! Maps between belt stages: the swap of adjacent belts, the dotted annulus
//! that adds a pair of opposite belts, and the symmetrizer built from swaps.
//!
//! All maps are computed on homology. A movie pushes the inclusion of the
//! minimal model of its source through the chain maps of its steps and
//! projects onto the minimal model of the target at the end.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use log::warn;
use num_traits::One;

use super::hom::{HMap, Reduced};
use super::iso::web_iso;
use super::moves::{self, Prepared, Side};
use super::web::{BeltStage, Kind, Web};
use super::{induced_map, ElementaryMove, MoveError};
use crate::cobcat::Pt;
use crate::complex::{BigradedComplex, ChainMap, CobRef, Grading};
use crate::diagram::Dir;
use crate::rational::Q;

/// A movie in progress, carrying the image of the source homology basis.
pub struct Movie<'a> {
    cob: &'a CobRef,
    src: &'a Reduced,
    web: Web,
    cube: BigradedComplex,
    vecs: ChainMap,
}

impl<'a> Movie<'a> {
    pub fn start(cob: &'a CobRef, src: &'a Reduced, web: &Web) -> Movie<'a> {
        Movie { cob, src, web: web.clone(), cube: src.cube.clone(), vecs: src.min.iota.clone() }
    }

    pub fn web(&self) -> &Web {
        &self.web
    }

    pub fn apply(&mut self, mv: &ElementaryMove) -> Result<Prepared, MoveError> {
        let (step, p) = induced_map(self.cob, &self.web, mv)?;
        let g = step.web.genus_defect()?;
        if g != 0 {
            return Err(MoveError::Malformed(format!("{mv:?} leaves a non-planar web (defect {g})")));
        }
        let cube = step.web.full_cube(self.cob)?;
        self.vecs = self.vecs.then(&step.map, &self.src.min.complex, &self.cube, &cube);
        self.web = step.web;
        self.cube = cube;
        Ok(p)
    }

    /// Tags the last `tags.len()` nodes (the ones the last move inserted).
    pub fn tag_last(&mut self, tags: &[&str]) {
        let n = self.web.nodes.len();
        for (k, t) in tags.iter().enumerate() {
            self.web.nodes[n - tags.len() + k].tag = Some(t.to_string());
        }
    }

    /// Reverses components; the cube only shifts, so the carried vectors stay.
    pub fn reverse(&mut self, comps: &[BTreeSet<Pt>]) -> Result<(), MoveError> {
        for c in comps {
            self.web = self.web.reversed(c);
        }
        self.cube = self.web.full_cube(self.cob)?;
        Ok(())
    }

    /// Lands on `target` through a planar isomorphism of webs.
    pub fn land(self, target: &Reduced, target_web: &Web) -> Result<HMap, MoveError> {
        let (iso, shift) = web_iso(self.cob, &self.web, target_web, &seeds(target_web))?;
        if shift != Grading::default() {
            return Err(MoveError::Malformed(format!("movie lands with a grading shift {shift:?}")));
        }
        let f = self.vecs.then(&iso, &self.src.min.complex, &self.cube, &target.cube);
        let g = f.then(&target.min.pi, &self.src.min.complex, &target.cube, &target.min.complex);
        let mut m = HMap::zero(target.dim(), self.src.dim());
        for ((s, t), x) in &g.entries {
            m.rows[*t][*s] = crate::complex::scalar(x);
        }
        Ok(m)
    }
}

/// Tags that pin down a stage web: strand centres and link crossings.
fn seeds(w: &Web) -> Vec<String> {
    let mut v: Vec<String> = w
        .nodes
        .iter()
        .filter_map(|n| n.tag.clone())
        .filter(|t| t.starts_with('c') || t.starts_with('L'))
        .collect();
    v.sort();
    v
}

fn find(w: &Web, tag: &str) -> Result<usize, MoveError> {
    w.find_tag(tag).ok_or_else(|| MoveError::Malformed(format!("no node tagged {tag}")))
}

/// (in, out) of the over or under strand of a crossing.
fn pass_edges(w: &Web, n: usize, over: bool) -> (Pt, Pt) {
    match w.nodes[n].kind {
        Kind::X { e, sign } => match (over, sign > 0) {
            (false, _) => (e[0], e[2]),
            (true, true) => (e[3], e[1]),
            (true, false) => (e[1], e[3]),
        },
        _ => unreachable!("crossing expected"),
    }
}

fn belt_tag(m: usize, i: usize, up: bool) -> String {
    format!("b{m}.{i}.{}", if up { "up" } else { "lo" })
}

/// Belt m's edges at strand i: the belt is over on the lower arc.
fn belt_pass(w: &Web, m: usize, i: usize, up: bool) -> Result<(Pt, Pt), MoveError> {
    Ok(pass_edges(w, find(w, &belt_tag(m, i, up))?, !up))
}

fn strand_pass(w: &Web, m: usize, i: usize, up: bool) -> Result<(Pt, Pt), MoveError> {
    Ok(pass_edges(w, find(w, &belt_tag(m, i, up))?, up))
}

/// The vertical edge of belt m west of strand 0.
fn left_edge(w: &Web, m: usize, pos: bool) -> Result<Pt, MoveError> {
    let (up, lo) = (belt_pass(w, m, 0, true)?, belt_pass(w, m, 0, false)?);
    // a positive belt runs south on its left side
    let (from, to) = if pos { (up, lo) } else { (lo, up) };
    if from.1 != to.0 {
        return Err(MoveError::Malformed(format!("belt {m} has no left side edge")));
    }
    Ok(from.1)
}

fn center(w: &Web, i: usize) -> Result<(Pt, Pt), MoveError> {
    match w.nodes[find(w, &format!("c{i}"))?].kind {
        Kind::Mark { e, .. } => Ok((e[0], e[1])),
        _ => unreachable!(),
    }
}

/// The segment of strand j between belts a − 1 and a on one half.
fn gap(st: &BeltStage, j: usize, a: usize, upper: bool) -> Result<Pt, MoveError> {
    let k = st.orient.len();
    let inward = (st.dirs[j] == Dir::Up) != upper;
    let w = &st.web;
    Ok(if a < k {
        let (i, o) = strand_pass(w, a, j, upper)?;
        if inward {
            o
        } else {
            i
        }
    } else if k > 0 {
        let (i, o) = strand_pass(w, k - 1, j, upper)?;
        if inward {
            i
        } else {
            o
        }
    } else {
        let (i, o) = center(w, j)?;
        if inward {
            i
        } else {
            o
        }
    })
}

fn belt_component(w: &Web, m: usize) -> Result<BTreeSet<Pt>, MoveError> {
    Ok(w.component(belt_pass(w, m, 0, false)?.0))
}

/// Swap of belts i and i + 1 (opposite orientations) on H(stage).
pub fn swap_map(cob: &CobRef, st: &BeltStage, red: &Reduced, i: usize) -> Result<HMap, MoveError> {
    let p = &st.orient;
    if i + 1 >= p.len() || p[i] == p[i + 1] || st.strands() == 0 {
        return Err(MoveError::Malformed(format!("belts {i}, {} are not an opposite adjacent pair", i + 1)));
    }
    let l = st.strands();
    let w = &st.web;
    let (ea, eb) = (left_edge(w, i, p[i])?, left_edge(w, i + 1, p[i + 1])?);
    // the face between the two left sides: west of belt i, east of belt i + 1
    let sa = if p[i] { Side::Right } else { Side::Left };
    let sb = if p[i + 1] { Side::Left } else { Side::Right };
    let mut mv = Movie::start(cob, red, w);
    mv.apply(&ElementaryMove::R2 { a: ea, sa, b: eb, sb, a_over: false })?;
    mv.tag_last(&["s0", "s1"]);
    let tri = |w: &Web, c: &str, j: usize, up: bool| -> Result<[usize; 3], MoveError> {
        Ok([find(w, c)?, find(w, &belt_tag(i, j, up))?, find(w, &belt_tag(i + 1, j, up))?])
    };
    let bottom = if moves::r3(mv.web(), tri(mv.web(), "s0", 0, false)?).is_ok() { "s0" } else { "s1" };
    let top = if bottom == "s0" { "s1" } else { "s0" };
    for j in 0..l {
        let nodes = tri(mv.web(), bottom, j, false)?;
        mv.apply(&ElementaryMove::R3 { nodes })?;
    }
    for j in 0..l {
        let nodes = tri(mv.web(), top, j, true)?;
        mv.apply(&ElementaryMove::R3 { nodes })?;
    }
    let nodes = [find(mv.web(), bottom)?, find(mv.web(), top)?];
    mv.apply(&ElementaryMove::R2Inverse { nodes })?;
    let comps = [belt_component(mv.web(), i)?, belt_component(mv.web(), i + 1)?];
    mv.reverse(&comps)?;
    mv.land(red, w)
}

/// Dotted annulus creating belts a (orientation `inner`) and a + 1 (the
/// opposite one) between the old belts a − 1 and a.
pub fn dcoev_map(
    cob: &CobRef,
    src: &BeltStage,
    red_src: &Reduced,
    a: usize,
    tgt: &BeltStage,
    red_tgt: &Reduced,
) -> Result<HMap, MoveError> {
    let l = src.strands();
    if l == 0 {
        return Err(MoveError::Malformed("split belts use the tensor model".into()));
    }
    let mut last = None;
    // the loop's orientation decides which of the two new belts is inner
    for tip_side in [Side::Right, Side::Left] {
        let mut mv = Movie::start(cob, red_src, &src.web);
        let birth = mv.apply(&ElementaryMove::Birth { dotted: true })?;
        let body = birth.new_edges[0];
        let mut tip = body;
        let run = (|| -> Result<HMap, MoveError> {
            for j in 0..l {
                let b = gap(src, j, a, false)?;
                let sb = if src.dirs[j] == Dir::Up { Side::Left } else { Side::Right };
                let p = mv.apply(&ElementaryMove::R2 { a: tip, sa: tip_side, b, sb, a_over: true })?;
                tip = p.new_edges[0];
            }
            for j in (0..l).rev() {
                let b = gap(src, j, a, true)?;
                let sb = if src.dirs[j] == Dir::Up { Side::Right } else { Side::Left };
                let p = mv.apply(&ElementaryMove::R2 { a: tip, sa: tip_side, b, sb, a_over: false })?;
                tip = p.new_edges[0];
            }
            mv.apply(&ElementaryMove::Saddle { a: tip, sa: tip_side, b: body, sb: tip_side })?;
            mv.land(red_tgt, &tgt.web)
        })();
        match run {
            Ok(m) => return Ok(m),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// The swap of belts i, i + 1 normalised so that it fixes the image of the
/// dotted annulus creating them. Co-oriented pairs use the web with belt
/// i + 1 reversed, whose cube agrees up to a global shift.
pub fn normalised_swap(cob: &CobRef, d: &crate::diagram::LinkDiagram, j: u32, st: &BeltStage, red: &Reduced, i: usize) -> Result<HMap, MoveError> {
    let p = &st.orient;
    let (st2, red2);
    let (sw, rw) = if p[i] == p[i + 1] {
        let comp = belt_component(&st.web, i + 1)?;
        let mut o = p.clone();
        o[i + 1] = !o[i + 1];
        let web = st.web.reversed(&comp);
        red2 = Reduced::new(cob, &web)?;
        let objs = |r: &Reduced| r.min.complex.gens().iter().map(|g| g.obj).collect::<Vec<_>>();
        if objs(&red2) != objs(red) {
            return Err(MoveError::Malformed("reversed stage has a different minimal model".into()));
        }
        st2 = BeltStage { web, dirs: st.dirs.clone(), orient: o };
        (&st2, &red2)
    } else {
        (st, red)
    };
    let t = swap_map(cob, sw, rw, i)?;
    let mut o = sw.orient.clone();
    o.drain(i..i + 2);
    let base = BeltStage::new(d, j, &o)?;
    let rb = Reduced::new(cob, &base.web)?;
    let dc = dcoev_map(cob, &base, &rb, i, sw, rw)?;
    if dc.is_zero() {
        // T² is a scalar; take its positive square root
        let t2 = t.after(&t);
        let c = t2.ratio(&HMap::identity(t.nrows())).ok_or_else(|| MoveError::Malformed("swap does not square to a scalar".into()))?;
        let r = crate::rational::sqrt_exact(&c).ok_or_else(|| MoveError::Malformed("swap square is not a rational square".into()))?;
        warn!("dotted annulus vanishes; swap normalised by T² = {c}");
        return Ok(t.scaled(&(Q::one() / r)));
    }
    let lam = t.after(&dc).ratio(&dc).ok_or_else(|| MoveError::Malformed("swap does not preserve the annulus image".into()))?;
    Ok(t.scaled(&(Q::one() / lam)))
}

/// Average over the group generated by the adjacent swaps (as permutations).
pub fn group_average(gens: &[HMap], n: usize) -> Result<HMap, MoveError> {
    let k = gens.len() + 1;
    let id: Vec<usize> = (0..k).collect();
    let mut seen: BTreeMap<Vec<usize>, HMap> = BTreeMap::from([(id.clone(), HMap::identity(n))]);
    let mut queue = VecDeque::from([id]);
    while let Some(perm) = queue.pop_front() {
        let m = seen[&perm].clone();
        for (i, g) in gens.iter().enumerate() {
            let mut p2 = perm.clone();
            p2.swap(i, i + 1);
            let m2 = g.after(&m);
            match seen.get(&p2) {
                Some(x) if *x != m2 => {
                    return Err(MoveError::Malformed("swap maps do not satisfy the symmetric group relations".into()))
                }
                Some(_) => {}
                None => {
                    seen.insert(p2.clone(), m2);
                    queue.push_back(p2);
                }
            }
        }
    }
    let count = Q::from_integer((seen.len() as i64).into());
    let mut sum = HMap::zero(n, n);
    for m in seen.values() {
        sum = sum.plus(m);
    }
    Ok(sum.scaled(&(Q::one() / count)))
}

/// Symmetrizer on H of a non-split belt stage.
pub fn sym_nonsplit(cob: &CobRef, d: &crate::diagram::LinkDiagram, j: u32, st: &BeltStage, red: &Reduced) -> Result<HMap, MoveError> {
    let k = st.orient.len();
    let gens: Vec<HMap> = (0..k.saturating_sub(1)).map(|i| normalised_swap(cob, d, j, st, red, i)).collect::<Result<_, _>>()?;
    group_average(&gens, red.dim())
}

/// Split belts: H = H(L) ⊗ V^{⊗k}, with V spanned by 1 (bit 0, q = −1) and
/// x (bit 1, q = +1). Sym is the average of tensor permutations.
pub fn sym_split(k: usize) -> HMap {
    // S_k is transitive on strings of one weight, so the average sends a
    // string to the mean of all strings with its number of x's
    let n = 1usize << k;
    let mut by: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
    for b in 0..n {
        by[b.count_ones() as usize].push(b);
    }
    let mut m = HMap::zero(n, n);
    for class in &by {
        let w = Q::one() / Q::from_integer((class.len() as i64).into());
        for &b in class {
            for &c in class {
                m.rows[c][b] = w.clone();
            }
        }
    }
    m
}

/// The same projector as an explicit average over permutations.
pub fn sym_split_by_permutations(k: usize) -> HMap {
    let n = 1usize << k;
    let mut m = HMap::zero(n, n);
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for i in 0..k {
        let mut next = Vec::new();
        for p in &perms {
            for pos in 0..=i {
                let mut q = p.clone();
                q.insert(pos, i);
                next.push(q);
            }
        }
        perms = next;
    }
    let w = Q::one() / Q::from_integer((perms.len() as i64).into());
    for b in 0..n {
        for p in &perms {
            let mut c = 0usize;
            for (src, &dst) in p.iter().enumerate() {
                c |= (b >> src & 1) << dst;
            }
            m.rows[c][b] += &w;
        }
    }
    m
}

/// q-grading (doubled) of a split tensor basis vector.
pub fn split_q2(k: usize, b: usize) -> i64 {
    let xs = (b as u64).count_ones() as i64;
    2 * xs - k as i64
}

/// Dotted annulus on split belts: insert x ⊗ x at positions a, a + 1.
pub fn dcoev_split(k: usize, a: usize) -> HMap {
    let mut m = HMap::zero(1 << (k + 2), 1 << k);
    for b in 0..1usize << k {
        let low = b & ((1 << a) - 1);
        let high = b >> a;
        let c = low | (0b11 << a) | (high << (a + 2));
        m.rows[c][b] = Q::one();
    }
    m
}

pub fn is_idempotent(p: &HMap) -> bool {
    p.after(p) == *p
}
