//! Single-owner mutable state for delooping and Gaussian elimination.

use std::collections::{HashMap, HashSet};

use num_traits::Inv;

use super::{BigradedComplex, ChainMap, CobRef, Gen, Grading};
use crate::cobcat::{Mor, ObjId};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotPolicy {
    /// Smallest fill-in (in(t)−1)(out(s)−1) first, ties by (h2, q2, s, t).
    Greedy,
    /// Plain (h2, q2, s, t) order.
    Lexicographic,
}

/// A simplified complex with the projection from and inclusion into the
/// original one (empty maps when tracking was off).
pub struct Simplified {
    pub complex: BigradedComplex,
    pub pi: ChainMap,
    pub iota: ChainMap,
}

pub(super) struct Session {
    cob: CobRef,
    boundary: Vec<u32>,
    built: (Option<i64>, Option<i64>),
    gens: Vec<Gen>,
    alive: Vec<bool>,
    out: Vec<HashMap<usize, Mor>>,
    inc: Vec<HashSet<usize>>,
    orig_objs: Vec<ObjId>,
    track: bool,
    // per current generator: original generator ↦ morphism (orig → current)
    pi: Vec<HashMap<usize, Mor>>,
    // per current generator: original generator ↦ morphism (current → orig)
    iota: Vec<HashMap<usize, Mor>>,
}

fn add_into(map: &mut HashMap<usize, Mor>, k: usize, a: &Q, m: &Mor) {
    let e = map.entry(k).or_default();
    e.add_scaled(a, m);
    if e.is_zero() {
        map.remove(&k);
    }
}

impl Session {
    pub fn new(c: &BigradedComplex, track: bool) -> Self {
        let n = c.len();
        let mut inc = vec![HashSet::new(); n];
        let mut out = vec![HashMap::new(); n];
        for (s, t, m) in c.entries() {
            out[s].insert(t, m.clone());
            inc[t].insert(s);
        }
        let (mut pi, mut iota) = (vec![], vec![]);
        if track {
            let mut cob = c.cob.borrow_mut();
            for (i, g) in c.gens.iter().enumerate() {
                let id = cob.identity(g.obj);
                pi.push(HashMap::from([(i, id.clone())]));
                iota.push(HashMap::from([(i, id)]));
            }
        }
        Session {
            cob: c.cob.clone(),
            boundary: c.boundary.clone(),
            built: c.built,
            gens: c.gens.clone(),
            alive: vec![true; n],
            out,
            inc,
            orig_objs: c.gens.iter().map(|g| g.obj).collect(),
            track,
            pi,
            iota,
        }
    }

    fn push_gen(&mut self, g: Gen) -> usize {
        self.gens.push(g);
        self.alive.push(true);
        self.out.push(HashMap::new());
        self.inc.push(HashSet::new());
        if self.track {
            self.pi.push(HashMap::new());
            self.iota.push(HashMap::new());
        }
        self.gens.len() - 1
    }

    fn set(&mut self, s: usize, t: usize, m: Mor) {
        if m.is_zero() {
            self.out[s].remove(&t);
            self.inc[t].remove(&s);
        } else {
            self.out[s].insert(t, m);
            self.inc[t].insert(s);
        }
    }

    fn kill(&mut self, a: usize) {
        for t in std::mem::take(&mut self.out[a]).into_keys() {
            self.inc[t].remove(&a);
        }
        for s in std::mem::take(&mut self.inc[a]) {
            self.out[s].remove(&a);
        }
        self.alive[a] = false;
        if self.track {
            self.pi[a].clear();
            self.iota[a].clear();
        }
    }

    fn first_loop(&self, a: usize) -> Option<u32> {
        self.cob.borrow().obj(self.gens[a].obj).loops().first().copied()
    }

    pub fn deloop_all(&mut self) {
        let mut work: Vec<usize> = (0..self.gens.len()).filter(|&a| self.alive[a]).collect();
        while let Some(a) = work.pop() {
            if !self.alive[a] {
                continue;
            }
            let Some(l) = self.first_loop(a) else { continue };
            let [gx, g1] = self.deloop_one(a, l);
            work.push(g1);
            work.push(gx);
        }
    }

    fn deloop_one(&mut self, a: usize, l: u32) -> [usize; 2] {
        let obj = self.gens[a].obj;
        let red = self.cob.borrow_mut().deloop(obj, l).expect("loop present").reduced;
        let g = self.gens[a].clone();
        let mk = |dq2: i64, bit: i32| Gen {
            grading: g.grading.shift(0, dq2),
            obj: red,
            tag: g.tag.iter().copied().chain([l as i32, bit]).collect(),
        };
        let gx = self.push_gen(mk(2, 1));
        let g1 = self.push_gen(mk(-2, 0));
        let outs: Vec<(usize, Mor)> = self.out[a].iter().map(|(t, m)| (*t, m.clone())).collect();
        let ins: Vec<usize> = self.inc[a].iter().copied().collect();
        for (t, m) in outs {
            let tobj = self.gens[t].obj;
            let (fx, f1) = self.cob.borrow_mut().deloop_source(obj, tobj, l, &m);
            self.set(gx, t, fx);
            self.set(g1, t, f1);
        }
        for s in ins {
            let sobj = self.gens[s].obj;
            let m = self.out[s][&a].clone();
            let (tx, t1) = self.cob.borrow_mut().deloop_target(sobj, obj, l, &m);
            self.set(s, gx, tx);
            self.set(s, g1, t1);
        }
        if self.track {
            let mut cob = self.cob.borrow_mut();
            for (o, m) in std::mem::take(&mut self.pi[a]) {
                let (tx, t1) = cob.deloop_target(self.orig_objs[o], obj, l, &m);
                if !tx.is_zero() {
                    self.pi[gx].insert(o, tx);
                }
                if !t1.is_zero() {
                    self.pi[g1].insert(o, t1);
                }
            }
            for (o, m) in std::mem::take(&mut self.iota[a]) {
                let (fx, f1) = cob.deloop_source(obj, self.orig_objs[o], l, &m);
                if !fx.is_zero() {
                    self.iota[gx].insert(o, fx);
                }
                if !f1.is_zero() {
                    self.iota[g1].insert(o, f1);
                }
            }
        }
        self.kill(a);
        [gx, g1]
    }

    pub fn is_pivot(&self, s: usize, t: usize) -> bool {
        self.pivot_scalar(s, t).is_some()
    }

    fn pivot_scalar(&self, s: usize, t: usize) -> Option<Q> {
        if !self.alive[s] || !self.alive[t] {
            return None;
        }
        let m = self.out[s].get(&t)?;
        self.cob.borrow().iso_scalar(self.gens[s].obj, self.gens[t].obj, m)
    }

    pub fn eliminate(&mut self, s: usize, t: usize) {
        let lambda = self.pivot_scalar(s, t).expect("invertible entry");
        let neg_inv = -lambda.inv();
        let mid = self.gens[t].obj;
        let outs: Vec<(usize, Mor)> = self.out[s].iter().filter(|e| *e.0 != t).map(|(k, m)| (*k, m.clone())).collect();
        let ins: Vec<(usize, Mor)> =
            self.inc[t].iter().filter(|&&k| k != s).map(|&k| (k, self.out[k][&t].clone())).collect();
        {
            let mut cob = self.cob.borrow_mut();
            for (s2, a) in &ins {
                let sobj = self.gens[*s2].obj;
                for (t2, b) in &outs {
                    let corr = cob.compose(sobj, mid, self.gens[*t2].obj, a, b);
                    if corr.is_zero() {
                        continue;
                    }
                    let e = self.out[*s2].entry(*t2).or_default();
                    e.add_scaled(&neg_inv, &corr);
                    if e.is_zero() {
                        self.out[*s2].remove(t2);
                        self.inc[*t2].remove(s2);
                    } else {
                        self.inc[*t2].insert(*s2);
                    }
                }
            }
            if self.track {
                let pit: Vec<(usize, Mor)> = self.pi[t].iter().map(|(k, m)| (*k, m.clone())).collect();
                for (o, m) in &pit {
                    for (t2, b) in &outs {
                        let c = cob.compose(self.orig_objs[*o], mid, self.gens[*t2].obj, m, b);
                        add_into(&mut self.pi[*t2], *o, &neg_inv, &c);
                    }
                }
                let ios: Vec<(usize, Mor)> = self.iota[s].iter().map(|(k, m)| (*k, m.clone())).collect();
                for (s2, a) in &ins {
                    for (o, m) in &ios {
                        let c = cob.compose(self.gens[*s2].obj, mid, self.orig_objs[*o], a, m);
                        add_into(&mut self.iota[*s2], *o, &neg_inv, &c);
                    }
                }
            }
        }
        self.kill(s);
        self.kill(t);
    }

    fn candidates(&self, policy: PivotPolicy) -> Vec<(usize, usize)> {
        let mut v: Vec<((usize, i64, i64, usize, usize), (usize, usize))> = Vec::new();
        for s in 0..self.gens.len() {
            if !self.alive[s] {
                continue;
            }
            for &t in self.out[s].keys() {
                if self.is_pivot(s, t) {
                    let cost = match policy {
                        PivotPolicy::Greedy => (self.inc[t].len() - 1) * (self.out[s].len() - 1),
                        PivotPolicy::Lexicographic => 0,
                    };
                    let g: Grading = self.gens[s].grading;
                    v.push(((cost, g.h2, g.q2, s, t), (s, t)));
                }
            }
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v.into_iter().map(|x| x.1).collect()
    }

    pub fn run(&mut self, policy: PivotPolicy) {
        self.deloop_all();
        loop {
            let cands = self.candidates(policy);
            let mut done = 0;
            for (s, t) in cands {
                if self.is_pivot(s, t) {
                    self.eliminate(s, t);
                    done += 1;
                    if policy == PivotPolicy::Lexicographic {
                        // strict order: recompute after each step
                        break;
                    }
                }
            }
            if done == 0 {
                break;
            }
        }
    }

    pub fn finish(self) -> Simplified {
        let mut pos = vec![usize::MAX; self.gens.len()];
        let mut c = BigradedComplex::new(&self.cob, self.boundary.clone());
        c.built = self.built;
        for (i, g) in self.gens.iter().enumerate() {
            if self.alive[i] {
                pos[i] = c.add_gen(g.grading, g.obj, g.tag.clone());
            }
        }
        for (i, row) in self.out.iter().enumerate() {
            if !self.alive[i] {
                continue;
            }
            let mut keys: Vec<&usize> = row.keys().collect();
            keys.sort();
            for t in keys {
                c.d[pos[i]].insert(pos[*t], row[t].clone());
            }
        }
        let mut pi = ChainMap::new(Grading::default());
        let mut iota = ChainMap::new(Grading::default());
        if self.track {
            for i in 0..self.gens.len() {
                if !self.alive[i] {
                    continue;
                }
                for (o, m) in &self.pi[i] {
                    if !m.is_zero() {
                        pi.entries.insert((*o, pos[i]), m.clone());
                    }
                }
                for (o, m) in &self.iota[i] {
                    if !m.is_zero() {
                        iota.entries.insert((pos[i], *o), m.clone());
                    }
                }
            }
        }
        Simplified { complex: c, pi, iota }
    }
}
