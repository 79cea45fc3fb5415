//! Planar isomorphism between webs and the induced cube isomorphism.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::One;

use super::web::{End, Web};
use super::MoveError;
use crate::cobcat::{CircleKey, Cobordism, Component, FlatTangle, Pt};
use crate::complex::{ChainMap, CobRef, Grading};
use crate::rational::Q;

/// From slot `k` of node `n`, walk through marks to the next crossing slot.
/// None means the walk closed up without meeting a crossing.
pub(crate) fn follow(w: &Web, ends: &HashMap<Pt, (End, End)>, n: usize, k: usize) -> Option<(usize, usize)> {
    let node = &w.nodes[n];
    let mut back = node.is_in(k);
    let mut e = node.edges()[k];
    let start = e;
    loop {
        let (tail, head) = ends[&e];
        let (m, j) = if back { tail } else { head };
        let next = &w.nodes[m];
        if next.is_x() {
            return Some((m, j));
        }
        // a mark: continue out the other side
        let other = next.through(j);
        e = next.edges()[other];
        back = next.is_in(other);
        if e == start {
            return None;
        }
    }
}

/// Crossingless components as edge sets, keyed by their least edge.
fn free_components(w: &Web) -> Vec<BTreeSet<Pt>> {
    let mut out: Vec<BTreeSet<Pt>> = Vec::new();
    let mut seen: BTreeSet<Pt> = BTreeSet::new();
    for e in w.edges() {
        if seen.contains(&e) {
            continue;
        }
        let comp = w.component(e);
        seen.extend(comp.iter().copied());
        let has_x = w.nodes.iter().any(|n| n.is_x() && n.edges().iter().any(|x| comp.contains(x)));
        if !has_x {
            out.push(comp);
        }
    }
    out
}

/// A cube isomorphism C(a) → C(b) for planar-isomorphic webs. Tags in
/// `seeds` anchor the match; nodes with those tags must correspond. Returns
/// the map and the grading shift (constant over the cube).
pub fn web_iso(cob: &CobRef, a: &Web, b: &Web, seeds: &[String]) -> Result<(ChainMap, Grading), MoveError> {
    let fail = |why: String| MoveError::Malformed(format!("webs are not isomorphic: {why}"));
    let (ea, eb) = (a.ends()?, b.ends()?);
    let (xa, xb) = (a.crossings(), b.crossings());
    if xa.len() != xb.len() {
        return Err(fail("crossing counts differ".into()));
    }
    let mut nmap: HashMap<usize, usize> = HashMap::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let mut free_pairs: Vec<(Pt, Pt)> = Vec::new();
    let bind = |na: usize, nb: usize, nmap: &mut HashMap<usize, usize>, queue: &mut VecDeque<(usize, usize)>| {
        match nmap.get(&na) {
            Some(&m) if m != nb => Err(fail(format!("node {na} maps to both {m} and {nb}"))),
            Some(_) => Ok(()),
            None => {
                if a.nodes[na].sign() != b.nodes[nb].sign() {
                    return Err(fail(format!("sign mismatch at {na}")));
                }
                nmap.insert(na, nb);
                queue.push_back((na, nb));
                Ok(())
            }
        }
    };
    for t in seeds {
        let (Some(na), Some(nb)) = (a.find_tag(t), b.find_tag(t)) else { continue };
        match (a.nodes[na].is_x(), b.nodes[nb].is_x()) {
            (true, true) => bind(na, nb, &mut nmap, &mut queue)?,
            (false, false) => match (follow(a, &ea, na, 1), follow(b, &eb, nb, 1)) {
                (Some((ma, ka)), Some((mb, kb))) => {
                    if ka != kb {
                        return Err(fail(format!("seed {t} reaches different slots")));
                    }
                    bind(ma, mb, &mut nmap, &mut queue)?;
                }
                (None, None) => free_pairs.push((a.nodes[na].edges()[0], b.nodes[nb].edges()[0])),
                _ => return Err(fail(format!("seed {t} is on a crossingless component in one web only"))),
            },
            _ => return Err(fail(format!("seed {t} is a crossing in one web only"))),
        }
    }
    if nmap.is_empty() && !xa.is_empty() {
        bind(xa[0], xb[0], &mut nmap, &mut queue)?;
    }
    loop {
        while let Some((na, nb)) = queue.pop_front() {
            for k in 0..4 {
                match (follow(a, &ea, na, k), follow(b, &eb, nb, k)) {
                    (Some((ma, ka)), Some((mb, kb))) if ka == kb => bind(ma, mb, &mut nmap, &mut queue)?,
                    _ => return Err(fail(format!("neighbourhoods of {na} and {nb} differ"))),
                }
            }
        }
        // another diagram component: anchor on the first unmatched crossing
        let Some(&na) = xa.iter().find(|n| !nmap.contains_key(n)) else { break };
        let used: BTreeSet<usize> = nmap.values().copied().collect();
        let Some(&nb) = xb.iter().find(|n| !used.contains(n)) else { break };
        bind(na, nb, &mut nmap, &mut queue)?;
    }
    if nmap.len() != xa.len() {
        return Err(fail("unmatched crossings".into()));
    }
    let mut emap: HashMap<Pt, Pt> = HashMap::new();
    for (&na, &nb) in &nmap {
        for k in 0..4 {
            emap.insert(a.nodes[na].edges()[k], b.nodes[nb].edges()[k]);
        }
    }
    // crossingless components: seeded ones first, the rest in order
    let (fa, fb) = (free_components(a), free_components(b));
    if fa.len() != fb.len() {
        return Err(fail("crossingless component counts differ".into()));
    }
    let find = |cs: &[BTreeSet<Pt>], e: Pt| cs.iter().position(|c| c.contains(&e));
    let mut fpair: BTreeMap<usize, usize> = BTreeMap::new();
    for (x, y) in &free_pairs {
        fpair.insert(find(&fa, *x).unwrap(), find(&fb, *y).unwrap());
    }
    let taken: BTreeSet<usize> = fpair.values().copied().collect();
    let mut rest_b = (0..fb.len()).filter(|j| !taken.contains(j));
    for i in 0..fa.len() {
        if !fpair.contains_key(&i) {
            fpair.insert(i, rest_b.next().unwrap());
        }
    }
    let pos_b: HashMap<usize, usize> = xb.iter().enumerate().map(|(p, &n)| (n, p)).collect();
    let target_bit: Vec<usize> = xa.iter().map(|n| pos_b[&nmap[n]]).collect();
    let mut shift: Option<Grading> = None;
    let mut out = ChainMap::new(Grading::default());
    let mut c = cob.borrow_mut();
    for s in 0..1u64 << xa.len() {
        let mut t = 0u64;
        let mut inv = 0usize;
        for j in 0..xa.len() {
            if s >> j & 1 == 1 {
                t |= 1 << target_bit[j];
                inv += (0..j).filter(|&k| s >> k & 1 == 1 && target_bit[k] > target_bit[j]).count();
            }
        }
        let (ga, gb) = (a.state_grading(s), b.state_grading(t));
        let d = Grading { h2: gb.h2 - ga.h2, q2: gb.q2 - ga.q2 };
        match shift {
            None => shift = Some(d),
            Some(x) if x != d => return Err(fail("gradings do not shift uniformly".into())),
            _ => {}
        }
        let (ca, cb) = (a.circles(s), b.circles(t));
        let mut comps = Vec::new();
        for circ in &ca {
            let img = match circ.iter().find_map(|e| emap.get(e)) {
                Some(&e) => cb.iter().find(|c| c.contains(&e)),
                None => {
                    let i = find(&fa, circ[0]).ok_or_else(|| fail("lost a circle".into()))?;
                    let e0 = *fb[fpair[&i]].iter().next().unwrap();
                    cb.iter().find(|c| c.contains(&e0))
                }
            };
            let img = img.ok_or_else(|| fail(format!("no image circle in state {s}")))?;
            comps.push(Component {
                circles: vec![CircleKey::Src(circ[0]), CircleKey::Tgt(img[0])],
                genus: 0,
                dots: 0,
            });
        }
        if comps.len() != cb.len() {
            return Err(fail(format!("circle counts differ in state {s}")));
        }
        let oa = c.intern(&FlatTangle::new([], ca.iter().map(|x| x[0])));
        let ob = c.intern(&FlatTangle::new([], cb.iter().map(|x| x[0])));
        let m = c.reduce_cobordism(oa, ob, &Cobordism { components: comps })?;
        let sign = if inv % 2 == 0 { Q::one() } else { -Q::one() };
        out.add(s as usize, t as usize, &m, &sign);
    }
    out.shift = shift.unwrap_or_default();
    Ok((out.clone(), out.shift))
}
