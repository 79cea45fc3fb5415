//! Bigraded complexes over the cobordism category, with planar tensor,
//! delooping, Gaussian elimination and homology ranks.

mod dims;
mod session;

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cobcat::{Cob, CobError, FrobeniusSpec, Mor, ObjId, Pt};
use crate::linalg::{self, SVec};
use crate::rational::Q;

pub use dims::{DimTable, Window};
pub use session::{PivotPolicy, Simplified};

pub type CobRef = Rc<RefCell<Cob>>;

pub fn new_context(spec: FrobeniusSpec) -> CobRef {
    Rc::new(RefCell::new(Cob::new(spec)))
}

/// Doubled bigrading: h2 = 2h, q2 = 2q.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Grading {
    pub h2: i64,
    pub q2: i64,
}

impl Grading {
    pub fn new(h2: i64, q2: i64) -> Self {
        Grading { h2, q2 }
    }

    /// From undoubled integer degrees.
    pub fn hq(h: i64, q: i64) -> Self {
        Grading { h2: 2 * h, q2: 2 * q }
    }

    pub fn shift(self, dh2: i64, dq2: i64) -> Self {
        Grading { h2: self.h2 + dh2, q2: self.q2 + dq2 }
    }
}

impl std::ops::Add for Grading {
    type Output = Grading;
    fn add(self, o: Grading) -> Grading {
        Grading { h2: self.h2 + o.h2, q2: self.q2 + o.q2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexError {
    NotInvertible(usize, usize),
    NotClosed,
    Ungraded,
    InsufficientSlack { h2: i64 },
    ContextMismatch,
    Cob(CobError),
}

impl fmt::Display for ComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexError::NotInvertible(s, t) => write!(f, "differential entry {s} -> {t} is not invertible"),
            ComplexError::NotClosed => write!(f, "complex still has tangle boundary; homology needs a closed diagram"),
            ComplexError::Ungraded => write!(f, "quantum grading is not preserved for c != 0; use dims_by_h"),
            ComplexError::InsufficientSlack { h2 } => write!(
                f,
                "homological degree {} is at the edge of the built range; widen the construction window",
                crate::rational::half(*h2)
            ),
            ComplexError::ContextMismatch => write!(f, "complexes live in different cobordism contexts"),
            ComplexError::Cob(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ComplexError {}

impl From<CobError> for ComplexError {
    fn from(e: CobError) -> Self {
        ComplexError::Cob(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gen {
    pub grading: Grading,
    pub obj: ObjId,
    /// Provenance label (cube state, loop choices), kept through delooping.
    pub tag: Vec<i32>,
}

#[derive(Clone)]
pub struct BigradedComplex {
    cob: CobRef,
    boundary: Vec<Pt>,
    gens: Vec<Gen>,
    d: Vec<BTreeMap<usize, Mor>>,
    /// Homological range actually constructed (doubled); None = unbounded.
    built: (Option<i64>, Option<i64>),
}

impl fmt::Debug for BigradedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BigradedComplex")
            .field("boundary", &self.boundary)
            .field("gens", &self.gens.len())
            .field("entries", &self.entry_count())
            .finish()
    }
}

impl BigradedComplex {
    pub fn new(cob: &CobRef, boundary: Vec<Pt>) -> Self {
        let mut boundary = boundary;
        boundary.sort();
        BigradedComplex { cob: cob.clone(), boundary, gens: vec![], d: vec![], built: (None, None) }
    }

    /// The complex with one generator.
    pub fn single(cob: &CobRef, obj: ObjId, g: Grading) -> Self {
        let bd = cob.borrow().obj(obj).boundary();
        let mut c = Self::new(cob, bd);
        c.add_gen(g, obj, vec![]);
        c
    }

    pub fn cob(&self) -> &CobRef {
        &self.cob
    }

    pub fn boundary(&self) -> &[Pt] {
        &self.boundary
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn gen(&self, i: usize) -> &Gen {
        &self.gens[i]
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn add_gen(&mut self, grading: Grading, obj: ObjId, tag: Vec<i32>) -> usize {
        debug_assert_eq!(self.cob.borrow().obj(obj).boundary(), self.boundary);
        self.gens.push(Gen { grading, obj, tag });
        self.d.push(BTreeMap::new());
        self.gens.len() - 1
    }

    /// d[s → t] += m
    pub fn add_d(&mut self, s: usize, t: usize, m: &Mor) {
        if m.is_zero() {
            return;
        }
        let e = self.d[s].entry(t).or_default();
        e.add_scaled(&Q::one(), m);
        if e.is_zero() {
            self.d[s].remove(&t);
        }
    }

    pub fn d(&self, s: usize, t: usize) -> Option<&Mor> {
        self.d[s].get(&t)
    }

    pub fn out(&self, s: usize) -> &BTreeMap<usize, Mor> {
        &self.d[s]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Mor)> {
        self.d.iter().enumerate().flat_map(|(s, m)| m.iter().map(move |(t, f)| (s, *t, f)))
    }

    pub fn entry_count(&self) -> usize {
        self.d.iter().map(|m| m.len()).sum()
    }

    pub fn built(&self) -> (Option<i64>, Option<i64>) {
        self.built
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn spec(&self) -> FrobeniusSpec {
        self.cob.borrow().spec().clone()
    }

    pub fn shifted(&self, dh2: i64, dq2: i64) -> Self {
        let mut c = self.clone();
        for g in c.gens.iter_mut() {
            g.grading = g.grading.shift(dh2, dq2);
        }
        c.built = (c.built.0.map(|x| x + dh2), c.built.1.map(|x| x + dh2));
        c
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, ComplexError> {
        if !Rc::ptr_eq(&self.cob, &other.cob) || self.boundary != other.boundary {
            return Err(ComplexError::ContextMismatch);
        }
        let mut c = self.clone();
        let off = c.len();
        for (i, g) in other.gens.iter().enumerate() {
            c.add_gen(g.grading, g.obj, g.tag.clone());
            for (t, m) in &other.d[i] {
                c.d[off + i].insert(off + t, m.clone());
            }
        }
        c.built = (None, None);
        Ok(c)
    }

    /// Keeps generators with h2 in [lo, hi]. The result is exact for homology
    /// strictly inside the range; the edges are recorded as unreliable.
    pub fn truncated(&self, lo: Option<i64>, hi: Option<i64>) -> Self {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| {
                let h = self.gens[i].grading.h2;
                lo.is_none_or(|l| h >= l) && hi.is_none_or(|u| h <= u)
            })
            .collect();
        let mut c = self.restrict_to(&keep);
        c.built = (lo.or(self.built.0), hi.or(self.built.1));
        c
    }

    fn restrict_to(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        let mut c = BigradedComplex::new(&self.cob, self.boundary.clone());
        for &i in keep {
            let g = &self.gens[i];
            c.add_gen(g.grading, g.obj, g.tag.clone());
        }
        for &i in keep {
            for (t, m) in &self.d[i] {
                if pos[*t] != usize::MAX {
                    c.d[pos[i]].insert(pos[*t], m.clone());
                }
            }
        }
        c.built = self.built;
        c
    }

    /// Every entry raises h2 by 2 and has cobordism degree (q2(s) − q2(t))/2.
    pub fn check_gradings(&self) -> bool {
        let graded = self.spec().is_graded();
        let mut cob = self.cob.borrow_mut();
        self.entries().all(|(s, t, m)| {
            let (gs, gt) = (&self.gens[s], &self.gens[t]);
            if gt.grading.h2 != gs.grading.h2 + 2 {
                return false;
            }
            if !graded {
                return true;
            }
            match cob.homogeneous_degree(gs.obj, gt.obj, m) {
                Some(deg) => 2 * deg == gs.grading.q2 - gt.grading.q2,
                None => false,
            }
        })
    }

    pub fn verify_d_squared(&self) -> bool {
        let mut cob = self.cob.borrow_mut();
        for s in 0..self.len() {
            let mut acc: BTreeMap<usize, Mor> = BTreeMap::new();
            for (t, m1) in &self.d[s] {
                for (u, m2) in &self.d[*t] {
                    let c = cob.compose(self.gens[s].obj, self.gens[*t].obj, self.gens[*u].obj, m1, m2);
                    acc.entry(*u).or_default().add_scaled(&Q::one(), &c);
                }
            }
            if acc.values().any(|m| !m.is_zero()) {
                return false;
            }
        }
        true
    }

    /// Total complex of a planar gluing; differential d⊗1 + (−1)^h 1⊗d.
    pub fn planar_tensor(&self, other: &Self) -> Result<Self, ComplexError> {
        if !Rc::ptr_eq(&self.cob, &other.cob) {
            return Err(ComplexError::ContextMismatch);
        }
        let mut bd: Vec<Pt> = self.boundary.iter().filter(|p| !other.boundary.contains(p)).copied().collect();
        bd.extend(other.boundary.iter().filter(|p| !self.boundary.contains(p)));
        let mut c = BigradedComplex::new(&self.cob, bd);
        let nb = other.len();
        {
            let mut cob = self.cob.borrow_mut();
            for ga in &self.gens {
                for gb in &other.gens {
                    let obj = cob.glue_objects(ga.obj, gb.obj);
                    let tag = ga.tag.iter().chain(gb.tag.iter()).copied().collect();
                    c.gens.push(Gen { grading: ga.grading + gb.grading, obj, tag });
                    c.d.push(BTreeMap::new());
                }
            }
            let ids_a: Vec<Mor> = self.gens.iter().map(|g| cob.identity(g.obj)).collect();
            let ids_b: Vec<Mor> = other.gens.iter().map(|g| cob.identity(g.obj)).collect();
            for (i, ga) in self.gens.iter().enumerate() {
                for (i2, m) in &self.d[i] {
                    let ga2 = &self.gens[*i2];
                    for (j, gb) in other.gens.iter().enumerate() {
                        let (_, _, g) = cob.glue(ga.obj, ga2.obj, gb.obj, gb.obj, m, &ids_b[j]);
                        if !g.is_zero() {
                            c.d[i * nb + j].insert(i2 * nb + j, g);
                        }
                    }
                }
                assert!(ga.grading.h2 % 2 == 0, "Koszul sign needs integral homological degrees");
                let sign = if (ga.grading.h2 / 2) % 2 == 0 { Q::one() } else { -Q::one() };
                for (j, gb) in other.gens.iter().enumerate() {
                    for (j2, m) in &other.d[j] {
                        let gb2 = &other.gens[*j2];
                        let (_, _, g) = cob.glue(ga.obj, ga.obj, gb.obj, gb2.obj, &ids_a[i], m);
                        c.add_d(i * nb + j, i * nb + j2, &g.scaled(&sign));
                    }
                }
            }
        }
        c.built = match (self.built, other.built) {
            ((None, None), (None, None)) => (None, None),
            _ => {
                // bounded factors: the tensor is exact only where both are
                let lo = |x: Option<i64>, y: Option<i64>, ox: i64, oy: i64| match (x, y) {
                    (Some(a), Some(b)) => Some((a + oy).max(b + ox)),
                    (Some(a), None) => Some(a + oy),
                    (None, Some(b)) => Some(b + ox),
                    _ => None,
                };
                let amin = self.gens.iter().map(|g| g.grading.h2).min().unwrap_or(0);
                let bmin = other.gens.iter().map(|g| g.grading.h2).min().unwrap_or(0);
                let amax = self.gens.iter().map(|g| g.grading.h2).max().unwrap_or(0);
                let bmax = other.gens.iter().map(|g| g.grading.h2).max().unwrap_or(0);
                let up = |x: Option<i64>, y: Option<i64>| match (x, y) {
                    (Some(a), Some(b)) => Some((a + bmin).min(b + amin)),
                    (Some(a), None) => Some(a + bmin),
                    (None, Some(b)) => Some(b + amin),
                    _ => None,
                };
                (lo(self.built.0, other.built.0, amax, bmax), up(self.built.1, other.built.1))
            }
        };
        Ok(c)
    }

    /// Removes the invertible entry s → t with the zig-zag correction.
    pub fn gaussian_eliminate(&self, s: usize, t: usize) -> Result<Self, ComplexError> {
        let mut ses = session::Session::new(self, false);
        if !ses.is_pivot(s, t) {
            return Err(ComplexError::NotInvertible(s, t));
        }
        ses.eliminate(s, t);
        Ok(ses.finish().complex)
    }

    pub fn simplify(&self) -> Self {
        self.simplify_with(PivotPolicy::Greedy)
    }

    pub fn simplify_with(&self, policy: PivotPolicy) -> Self {
        let mut ses = session::Session::new(self, false);
        ses.run(policy);
        ses.finish().complex
    }

    /// Simplification together with the projection and inclusion chain maps.
    pub fn simplify_tracked(&self) -> Simplified {
        let mut ses = session::Session::new(self, true);
        ses.run(PivotPolicy::Greedy);
        ses.finish()
    }

    /// Replaces every generator with closed loops by its delooped copies.
    pub fn delooped(&self) -> Self {
        let mut ses = session::Session::new(self, false);
        ses.deloop_all();
        ses.finish().complex
    }

    fn scalar_blocks(&self) -> Result<(), ComplexError> {
        if !self.is_closed() {
            return Err(ComplexError::NotClosed);
        }
        let cob = self.cob.borrow();
        if self.gens.iter().any(|g| cob.obj(g.obj).has_loops()) {
            // loops would need delooping first
            return Err(ComplexError::NotClosed);
        }
        Ok(())
    }

    fn check_slack(&self, h_lo: Option<i64>, h_hi: Option<i64>) -> Result<(), ComplexError> {
        if let Some(b) = self.built.0 {
            match h_lo {
                Some(l) if l > b => {}
                _ => return Err(ComplexError::InsufficientSlack { h2: h_lo.unwrap_or(b).min(b) }),
            }
        }
        if let Some(b) = self.built.1 {
            match h_hi {
                Some(u) if u < b => {}
                _ => return Err(ComplexError::InsufficientSlack { h2: h_hi.unwrap_or(b).max(b) }),
            }
        }
        Ok(())
    }

    /// Homology dimensions per bigrading inside `w` (closed complexes, c = 0).
    pub fn homology_dims(&self, w: &Window) -> Result<DimTable, ComplexError> {
        if !self.spec().is_graded() {
            return Err(ComplexError::Ungraded);
        }
        self.scalar_blocks()?;
        self.check_slack(w.h_lo, w.h_hi)?;
        let mut blocks: BTreeMap<Grading, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.gens.iter().enumerate() {
            blocks.entry(g.grading).or_default().push(i);
        }
        let mut t = DimTable::new();
        for (&g, idx) in &blocks {
            if !w.contains(g) {
                continue;
            }
            let out_rank = self.block_rank(idx, |x| x.grading == g.shift(2, 0));
            let prev: &[usize] = blocks.get(&g.shift(-2, 0)).map(|v| v.as_slice()).unwrap_or(&[]);
            let in_rank = self.block_rank(prev, |x| x.grading == g);
            let dim = idx.len() - out_rank - in_rank;
            if dim > 0 {
                t.insert(g, dim);
            }
        }
        Ok(t)
    }

    /// Homology dimensions per homological degree, ignoring q (any c).
    pub fn dims_by_h(&self) -> Result<BTreeMap<i64, usize>, ComplexError> {
        self.scalar_blocks()?;
        self.check_slack(None, None).or_else(|e| if self.built == (None, None) { Ok(()) } else { Err(e) })?;
        let mut blocks: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.gens.iter().enumerate() {
            blocks.entry(g.grading.h2).or_default().push(i);
        }
        let mut out = BTreeMap::new();
        for (&h, idx) in &blocks {
            let out_rank = self.block_rank(idx, |x| x.grading.h2 == h + 2);
            let prev: &[usize] = blocks.get(&(h - 2)).map(|v| v.as_slice()).unwrap_or(&[]);
            let in_rank = self.block_rank(prev, |x| x.grading.h2 == h);
            let dim = idx.len() - out_rank - in_rank;
            if dim > 0 {
                out.insert(h, dim);
            }
        }
        Ok(out)
    }

    fn block_rank(&self, rows: &[usize], tgt: impl Fn(&Gen) -> bool) -> usize {
        linalg::rank(rows.iter().map(|&s| {
            SVec::from_pairs(
                self.d[s]
                    .iter()
                    .filter(|(t, _)| tgt(&self.gens[**t]))
                    .map(|(t, m)| (*t, scalar(m)))
                    .collect(),
            )
        }))
    }

    /// Σ (−1)^h q^q over generators, keyed by q2 (integral h assumed).
    pub fn euler(&self) -> BTreeMap<i64, i64> {
        let mut e = BTreeMap::new();
        for g in &self.gens {
            let s = if (g.grading.h2 / 2) % 2 == 0 { 1 } else { -1 };
            *e.entry(g.grading.q2).or_insert(0) += s;
        }
        e.retain(|_, v| *v != 0);
        e
    }
}

/// The coefficient of a morphism between loopless closed objects.
pub fn scalar(m: &Mor) -> Q {
    match m.terms() {
        [] => Q::zero(),
        [(0, x)] => x.clone(),
        _ => panic!("not a scalar morphism: {m:?}"),
    }
}

/// Chain map between two complexes in the same context; entries (src gen, tgt gen).
#[derive(Clone, Debug, Default)]
pub struct ChainMap {
    pub entries: BTreeMap<(usize, usize), Mor>,
    pub shift: Grading,
}

impl ChainMap {
    pub fn new(shift: Grading) -> Self {
        ChainMap { entries: BTreeMap::new(), shift }
    }

    pub fn identity(c: &BigradedComplex) -> Self {
        let mut f = ChainMap::new(Grading::default());
        let mut cob = c.cob.borrow_mut();
        for (i, g) in c.gens.iter().enumerate() {
            f.entries.insert((i, i), cob.identity(g.obj));
        }
        f
    }

    pub fn add(&mut self, s: usize, t: usize, m: &Mor, a: &Q) {
        let e = self.entries.entry((s, t)).or_default();
        e.add_scaled(a, m);
        if e.is_zero() {
            self.entries.remove(&(s, t));
        }
    }

    pub fn scaled(&self, a: &Q) -> ChainMap {
        let mut f = ChainMap::new(self.shift);
        for (k, m) in &self.entries {
            let x = m.scaled(a);
            if !x.is_zero() {
                f.entries.insert(*k, x);
            }
        }
        f
    }

    pub fn plus(&self, other: &ChainMap) -> ChainMap {
        let mut f = self.clone();
        for ((s, t), m) in &other.entries {
            f.add(*s, *t, m, &Q::one());
        }
        f
    }

    fn rows(&self) -> BTreeMap<usize, Vec<(usize, &Mor)>> {
        let mut r: BTreeMap<usize, Vec<(usize, &Mor)>> = BTreeMap::new();
        for ((s, t), m) in &self.entries {
            r.entry(*s).or_default().push((*t, m));
        }
        r
    }

    /// g ∘ f with f = self: X → Y and g: Y → Z.
    pub fn then(&self, g: &ChainMap, x: &BigradedComplex, y: &BigradedComplex, z: &BigradedComplex) -> ChainMap {
        let mut out = ChainMap::new(self.shift + g.shift);
        let grows = g.rows();
        let mut cob = x.cob.borrow_mut();
        for ((s, t), m1) in &self.entries {
            if let Some(row) = grows.get(t) {
                for (u, m2) in row {
                    let c = cob.compose(x.gens[*s].obj, y.gens[*t].obj, z.gens[*u].obj, m1, m2);
                    if !c.is_zero() {
                        let e = out.entries.entry((*s, *u)).or_default();
                        e.add_scaled(&Q::one(), &c);
                    }
                }
            }
        }
        out.entries.retain(|_, m| !m.is_zero());
        out
    }

    /// d ∘ f = f ∘ d on the nose.
    pub fn is_chain_map(&self, src: &BigradedComplex, tgt: &BigradedComplex) -> bool {
        let mut cob = src.cob.borrow_mut();
        let rows = self.rows();
        for s in 0..src.len() {
            let mut acc: BTreeMap<usize, Mor> = BTreeMap::new();
            if let Some(row) = rows.get(&s) {
                for (t, m) in row {
                    for (u, dm) in &tgt.d[*t] {
                        let c = cob.compose(src.gens[s].obj, tgt.gens[*t].obj, tgt.gens[*u].obj, m, dm);
                        acc.entry(*u).or_default().add_scaled(&Q::one(), &c);
                    }
                }
            }
            for (s2, dm) in &src.d[s] {
                if let Some(row) = rows.get(s2) {
                    for (u, m) in row {
                        let c = cob.compose(src.gens[s].obj, src.gens[*s2].obj, tgt.gens[*u].obj, dm, m);
                        acc.entry(*u).or_default().add_scaled(&-Q::one(), &c);
                    }
                }
            }
            if acc.values().any(|m| !m.is_zero()) {
                return false;
            }
        }
        true
    }

    /// Every entry respects the declared bidegree shift.
    pub fn is_homogeneous(&self, src: &BigradedComplex, tgt: &BigradedComplex) -> bool {
        let mut cob = src.cob.borrow_mut();
        self.entries.iter().all(|((s, t), m)| {
            let (gs, gt) = (&src.gens[*s], &tgt.gens[*t]);
            if gt.grading.h2 != gs.grading.h2 + self.shift.h2 {
                return false;
            }
            match cob.homogeneous_degree(gs.obj, gt.obj, m) {
                Some(deg) => 2 * deg + gt.grading.q2 - gs.grading.q2 == self.shift.q2,
                None => m.is_zero(),
            }
        })
    }

    /// Rank of the induced map on homology restricted to source grading `g`
    /// (closed complexes with scalar entries).
    pub fn homology_rank(&self, src: &BigradedComplex, tgt: &BigradedComplex, g: Grading) -> usize {
        self.homology_rank_where(src, tgt, |x| x.grading == g)
    }

    /// Rank of the induced map on total homology in homological degree h2.
    pub fn homology_rank_h(&self, src: &BigradedComplex, tgt: &BigradedComplex, h2: i64) -> usize {
        self.homology_rank_where(src, tgt, |x| x.grading.h2 == h2)
    }

    fn homology_rank_where(&self, src: &BigradedComplex, tgt: &BigradedComplex, sel: impl Fn(&Gen) -> bool) -> usize {
        let sidx: Vec<usize> = (0..src.len()).filter(|&i| sel(&src.gens[i])).collect();
        let spos: BTreeMap<usize, usize> = sidx.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        // cycles: kernel of d on the selected block (as column combinations)
        let mut eqs: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
        for &s in &sidx {
            for (t, m) in &src.d[s] {
                eqs.entry(*t).or_default().push((spos[&s], scalar(m)));
            }
        }
        let eqs: Vec<SVec> = eqs.into_values().map(SVec::from_pairs).collect();
        let cycles = linalg::nullspace(&eqs, sidx.len());
        let rows = self.rows();
        let image = |z: &SVec| -> SVec {
            let mut v = Vec::new();
            for (k, x) in &z.0 {
                if let Some(row) = rows.get(&sidx[*k]) {
                    for (t, m) in row {
                        v.push((*t, x * scalar(m)));
                    }
                }
            }
            SVec::from_pairs(v)
        };
        // boundaries in the target: images of d from everything
        let mut tb: Vec<SVec> = Vec::new();
        let img: Vec<SVec> = cycles.iter().map(image).collect();
        let tsupport: std::collections::BTreeSet<usize> = img.iter().flat_map(|v| v.0.iter().map(|(i, _)| *i)).collect();
        if tsupport.is_empty() {
            return 0;
        }
        let tgrades: std::collections::BTreeSet<Grading> = tsupport.iter().map(|&i| tgt.gens[i].grading).collect();
        for s in 0..tgt.len() {
            let row: Vec<(usize, Q)> = tgt.d[s]
                .iter()
                .filter(|(t, _)| tgrades.contains(&tgt.gens[**t].grading))
                .map(|(t, m)| (*t, scalar(m)))
                .collect();
            if !row.is_empty() {
                tb.push(SVec::from_pairs(row));
            }
        }
        let base = linalg::rank(tb.clone());
        tb.extend(img);
        linalg::rank(tb) - base
    }
}

#[cfg(test)]
mod tests;
