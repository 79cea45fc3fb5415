//! Dotted cobordisms between crossingless tangles in a disk.
//!
//! Hom(A, B) has a basis indexed by dot patterns on the circles of A ∪ B̄:
//! every circle bounds a disk carrying at most one dot. Neck cutting over ℚ
//! makes this basis complete, so a morphism is a map from dot masks to
//! coefficients. Composition and gluing build the glued surface
//! component by component and reduce each component with the local relations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use num_traits::{One, Zero};

use crate::rational::{q, Q};

pub type Pt = u32;
pub type ObjId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusSpec {
    /// A twice-dotted sheet equals `c` times the undotted sheet.
    pub c: Q,
}

impl FrobeniusSpec {
    pub fn khovanov() -> Self {
        FrobeniusSpec { c: Q::zero() }
    }

    pub fn lee() -> Self {
        FrobeniusSpec { c: Q::one() }
    }

    pub fn new(c: Q) -> Self {
        FrobeniusSpec { c }
    }

    /// Only c = 0 keeps the quantum grading.
    pub fn is_graded(&self) -> bool {
        self.c.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CobError {
    BoundaryMismatch,
    NoLoop(Pt),
    TooManyCircles(usize),
    BadCobordism(String),
}

impl fmt::Display for CobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CobError::BoundaryMismatch => write!(f, "objects have different boundary points"),
            CobError::NoLoop(l) => write!(f, "object has no closed loop labelled {l}"),
            CobError::TooManyCircles(n) => write!(f, "{n} circles exceed the 64-circle limit"),
            CobError::BadCobordism(m) => write!(f, "malformed cobordism: {m}"),
        }
    }
}

impl std::error::Error for CobError {}

/// A crossingless tangle: arcs between boundary points plus closed loops.
/// Loops carry a label (an edge id lying on them) so they can be tracked.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlatTangle {
    arcs: Vec<(Pt, Pt)>,
    loops: Vec<Pt>,
}

impl FlatTangle {
    pub fn new(arcs: impl IntoIterator<Item = (Pt, Pt)>, loops: impl IntoIterator<Item = Pt>) -> Self {
        let mut arcs: Vec<(Pt, Pt)> = arcs.into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
        arcs.sort();
        let mut loops: Vec<Pt> = loops.into_iter().collect();
        loops.sort();
        FlatTangle { arcs, loops }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn arcs(&self) -> &[(Pt, Pt)] {
        &self.arcs
    }

    pub fn loops(&self) -> &[Pt] {
        &self.loops
    }

    pub fn boundary(&self) -> Vec<Pt> {
        let mut v: Vec<Pt> = self.arcs.iter().flat_map(|&(a, b)| [a, b]).collect();
        v.sort();
        v
    }

    pub fn partner(&self, p: Pt) -> Option<Pt> {
        self.arcs.iter().find_map(|&(a, b)| {
            if a == p {
                Some(b)
            } else if b == p {
                Some(a)
            } else {
                None
            }
        })
    }

    fn partner_map(&self) -> HashMap<Pt, Pt> {
        self.arcs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect()
    }

    pub fn has_loops(&self) -> bool {
        !self.loops.is_empty()
    }

    pub fn without_loop(&self, l: Pt) -> Option<FlatTangle> {
        let i = self.loops.iter().position(|&x| x == l)?;
        let mut t = self.clone();
        t.loops.remove(i);
        Some(t)
    }

    /// Whether no two arcs interleave along a circle listing the boundary in
    /// increasing order (a planarity check for tangles drawn that way).
    pub fn is_noncrossing(&self) -> bool {
        self.arcs.iter().all(|&(a, b)| {
            self.arcs.iter().all(|&(c, d)| !((a < c && c < b && b < d) || (c < a && a < d && d < b)))
        })
    }

    /// Glues two tangles along their common boundary points. Loops that
    /// close up are labelled by their smallest glued point.
    pub fn glue(&self, other: &FlatTangle) -> FlatTangle {
        let (p1, p2) = (self.partner_map(), other.partner_map());
        let shared = |p: &Pt| p1.contains_key(p) && p2.contains_key(p);
        let mut free: Vec<Pt> = p1.keys().chain(p2.keys()).copied().filter(|p| !shared(p)).collect();
        free.sort();
        let mut seen = std::collections::HashSet::new();
        let mut arcs = Vec::new();
        for &p in &free {
            if seen.contains(&p) {
                continue;
            }
            let mut first = p1.contains_key(&p);
            let mut cur = p;
            seen.insert(p);
            loop {
                let q = if first { p1[&cur] } else { p2[&cur] };
                seen.insert(q);
                if shared(&q) {
                    cur = q;
                    first = !first;
                } else {
                    arcs.push((p, q));
                    break;
                }
            }
        }
        let mut sh: Vec<Pt> = p1.keys().copied().filter(|p| p2.contains_key(p)).collect();
        sh.sort();
        let mut loops: Vec<Pt> = self.loops.iter().chain(other.loops.iter()).copied().collect();
        for &s in &sh {
            if seen.contains(&s) {
                continue;
            }
            loops.push(s);
            let mut cur = s;
            let mut first = true;
            loop {
                seen.insert(cur);
                cur = if first { p1[&cur] } else { p2[&cur] };
                first = !first;
                if cur == s && first {
                    break;
                }
            }
        }
        FlatTangle::new(arcs, loops)
    }
}

/// Names a circle of A ∪ B̄: an arc circle by its smallest point, or a loop of
/// the source or target by its label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CircleKey {
    Arc(Pt),
    Src(Pt),
    Tgt(Pt),
}

#[derive(Debug)]
pub struct PairInfo {
    pub keys: Vec<CircleKey>,
    at: HashMap<Pt, usize>,
    index: HashMap<CircleKey, usize>,
}

impl PairInfo {
    fn new(a: &FlatTangle, b: &FlatTangle) -> Self {
        let (pa, pb) = (a.partner_map(), b.partner_map());
        let mut at = HashMap::new();
        let mut keys = Vec::new();
        for p in a.boundary() {
            if at.contains_key(&p) {
                continue;
            }
            let k = keys.len();
            keys.push(CircleKey::Arc(p));
            let mut cur = p;
            loop {
                at.insert(cur, k);
                let q = pa[&cur];
                at.insert(q, k);
                cur = pb[&q];
                if cur == p {
                    break;
                }
            }
        }
        keys.extend(a.loops.iter().map(|&l| CircleKey::Src(l)));
        keys.extend(b.loops.iter().map(|&l| CircleKey::Tgt(l)));
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        PairInfo { keys, at, index }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn circle_of_point(&self, p: Pt) -> usize {
        self.at[&p]
    }

    pub fn index_of(&self, k: CircleKey) -> Option<usize> {
        self.index.get(&k).copied()
    }
}

/// Linear combination of basis cobordisms, keyed by dot mask, sorted, no zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Mor(Vec<(u64, Q)>);

impl Mor {
    pub fn zero() -> Self {
        Mor(Vec::new())
    }

    pub fn single(mask: u64, x: Q) -> Self {
        Mor::from_terms(vec![(mask, x)])
    }

    pub fn from_terms(mut v: Vec<(u64, Q)>) -> Self {
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(u64, Q)> = Vec::with_capacity(v.len());
        for (m, x) in v {
            match out.last_mut() {
                Some((k, y)) if *k == m => *y += x,
                _ => out.push((m, x)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Mor(out)
    }

    fn from_map(m: HashMap<u64, Q>) -> Self {
        let mut v: Vec<(u64, Q)> = m.into_iter().filter(|t| !t.1.is_zero()).collect();
        v.sort_by_key(|t| t.0);
        Mor(v)
    }

    pub fn terms(&self) -> &[(u64, Q)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, mask: u64) -> Q {
        self.0.iter().find(|t| t.0 == mask).map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    /// self += a · other
    pub fn add_scaled(&mut self, a: &Q, other: &Mor) {
        if a.is_zero() || other.is_zero() {
            return;
        }
        let mut v = std::mem::take(&mut self.0);
        v.extend(other.0.iter().map(|(m, x)| (*m, a * x)));
        *self = Mor::from_terms(v);
    }

    pub fn scaled(&self, a: &Q) -> Mor {
        if a.is_zero() {
            return Mor::zero();
        }
        Mor(self.0.iter().map(|(m, x)| (*m, a * x)).collect())
    }

    /// Drops bit `i` from every mask, routing terms by its value.
    /// Returns (terms with bit clear, terms with bit set).
    pub fn split_bit(&self, i: usize) -> (Mor, Mor) {
        let low = (1u64 << i) - 1;
        let squeeze = |m: u64| (m & low) | ((m >> (i + 1)) << i);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (m, x) in &self.0 {
            if m >> i & 1 == 0 {
                a.push((squeeze(*m), x.clone()));
            } else {
                b.push((squeeze(*m), x.clone()));
            }
        }
        (Mor(a), Mor(b))
    }
}

/// A not necessarily reduced surface from A to B: components with genus and
/// dot count, each listing the circles of A ∪ B̄ on its boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cobordism {
    pub components: Vec<Component>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub circles: Vec<CircleKey>,
    pub genus: u32,
    pub dots: u32,
}

/// Surface pieces of a composite, before reduction: each piece collects input
/// circles from the two factors and owns some output circles.
#[derive(Debug)]
struct Plan {
    comps: Vec<PlanComp>,
}

#[derive(Debug)]
struct PlanComp {
    in1: u64,
    in2: u64,
    genus: u32,
    out: Vec<u8>,
}

struct Uf(Vec<usize>);

impl Uf {
    fn new(n: usize) -> Self {
        Uf((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let nx = self.0[y];
            self.0[y] = r;
            y = nx;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

/// Groups nodes `0..n1+n2` into surface pieces. `glued[r]` counts intervals
/// glued inside the piece (each lowers χ by one); `outs` maps output circles to nodes.
fn build_plan(n1: usize, n2: usize, uf: &mut Uf, glued: &HashMap<usize, usize>, outs: &[usize]) -> Plan {
    let mut comps: BTreeMap<usize, (u64, u64, i64, Vec<u8>)> = BTreeMap::new();
    for node in 0..n1 + n2 {
        let r = uf.find(node);
        let e = comps.entry(r).or_insert((0, 0, 0, vec![]));
        if node < n1 {
            e.0 |= 1 << node;
        } else {
            e.1 |= 1 << (node - n1);
        }
        e.2 += 1;
    }
    for (&node, &k) in glued {
        comps.get_mut(&uf.find(node)).unwrap().2 -= k as i64;
    }
    for (i, &node) in outs.iter().enumerate() {
        comps.get_mut(&uf.find(node)).unwrap().3.push(i as u8);
    }
    let comps = comps
        .into_values()
        .map(|(in1, in2, chi, out)| {
            let two_g = 2 - chi - out.len() as i64;
            assert!(two_g >= 0 && two_g % 2 == 0, "surface piece with χ={chi} and {} boundary circles", out.len());
            PlanComp { in1, in2, genus: (two_g / 2) as u32, out }
        })
        .collect();
    Plan { comps }
}

type LocalCombo = Rc<Vec<(u64, Q)>>;

/// The category context: interned objects and cached composition data.
pub struct Cob {
    spec: FrobeniusSpec,
    objs: Vec<FlatTangle>,
    index: HashMap<FlatTangle, ObjId>,
    pairs: HashMap<(ObjId, ObjId), Rc<PairInfo>>,
    compose_plans: HashMap<(ObjId, ObjId, ObjId), Rc<Plan>>,
    glue_plans: HashMap<(ObjId, ObjId, ObjId, ObjId), (ObjId, ObjId, Rc<Plan>)>,
    memo: HashMap<(u32, u32, u32), LocalCombo>,
}

/// Delooping isomorphism A ≅ A'{+1} ⊕ A'{−1} for one loop of A.
#[derive(Clone, Debug)]
pub struct Deloop {
    pub reduced: ObjId,
    /// A → A'{+1}: undotted cap.
    pub out_x: Mor,
    /// A → A'{−1}: dotted cap.
    pub out_1: Mor,
    /// A'{+1} → A: dotted cup.
    pub in_x: Mor,
    /// A'{−1} → A: undotted cup.
    pub in_1: Mor,
}

impl Cob {
    pub fn new(spec: FrobeniusSpec) -> Self {
        Cob {
            spec,
            objs: vec![],
            index: HashMap::new(),
            pairs: HashMap::new(),
            compose_plans: HashMap::new(),
            glue_plans: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    pub fn spec(&self) -> &FrobeniusSpec {
        &self.spec
    }

    pub fn intern(&mut self, t: &FlatTangle) -> ObjId {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let i = self.objs.len() as ObjId;
        self.objs.push(t.clone());
        self.index.insert(t.clone(), i);
        i
    }

    pub fn obj(&self, i: ObjId) -> &FlatTangle {
        &self.objs[i as usize]
    }

    pub fn pair(&mut self, a: ObjId, b: ObjId) -> Rc<PairInfo> {
        if let Some(p) = self.pairs.get(&(a, b)) {
            return p.clone();
        }
        let (ta, tb) = (self.obj(a), self.obj(b));
        assert_eq!(ta.boundary(), tb.boundary(), "pair of objects with different boundary");
        let p = Rc::new(PairInfo::new(ta, tb));
        assert!(p.len() <= 64, "{}", CobError::TooManyCircles(p.len()));
        self.pairs.insert((a, b), p.clone());
        p
    }

    pub fn same_boundary(&self, a: ObjId, b: ObjId) -> bool {
        self.obj(a).boundary() == self.obj(b).boundary()
    }

    /// q-degree of a basis cobordism: |∂|/2 − #circles + 2·#dots.
    pub fn degree(&mut self, a: ObjId, b: ObjId, mask: u64) -> i64 {
        let n = self.pair(a, b).len() as i64;
        let half_bd = self.obj(a).arcs.len() as i64;
        half_bd - n + 2 * mask.count_ones() as i64
    }

    /// The common degree of all terms, if homogeneous.
    pub fn homogeneous_degree(&mut self, a: ObjId, b: ObjId, f: &Mor) -> Option<i64> {
        let mut d = None;
        for (m, _) in f.terms() {
            let x = self.degree(a, b, *m);
            if d.is_some_and(|y| y != x) {
                return None;
            }
            d = Some(x);
        }
        d
    }

    /// Local relations applied to one connected piece of genus `g` with `d` dots
    /// and `b` boundary circles: the result is a combination of dot masks on the circles.
    pub fn reduce_local(&mut self, g: u32, d: u32, b: u32) -> LocalCombo {
        if let Some(r) = self.memo.get(&(g, d, b)) {
            return r.clone();
        }
        let r: Vec<(u64, Q)> = if d >= 2 {
            let c = self.spec.c.clone();
            if c.is_zero() {
                vec![]
            } else {
                self.reduce_local(g, d - 2, b).iter().map(|(m, x)| (*m, &c * x)).collect()
            }
        } else if g >= 1 {
            // a handle is multiplication by 2x
            self.reduce_local(g - 1, d + 1, b).iter().map(|(m, x)| (*m, q(2) * x)).collect()
        } else if b == 0 {
            if d == 1 {
                vec![(0, Q::one())]
            } else {
                vec![]
            }
        } else if b == 1 {
            vec![(d as u64, Q::one())]
        } else {
            // cut the neck next to circle 0
            let mut v: Vec<(u64, Q)> = self.reduce_local(0, d, b - 1).iter().map(|(m, x)| (1 | m << 1, x.clone())).collect();
            v.extend(self.reduce_local(0, d + 1, b - 1).iter().map(|(m, x)| (m << 1, x.clone())));
            Mor::from_terms(v).0
        };
        let r = Rc::new(r);
        self.memo.insert((g, d, b), r.clone());
        r
    }

    /// Value of a closed connected surface.
    pub fn eval_closed(&mut self, genus: u32, dots: u32) -> Q {
        self.reduce_local(genus, dots, 0).first().map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    fn apply_plan(&mut self, plan: &Plan, f: &Mor, g: &Mor) -> Mor {
        let mut acc: HashMap<u64, Q> = HashMap::new();
        let mut pieces: Vec<LocalCombo> = Vec::with_capacity(plan.comps.len());
        for (m1, c1) in f.terms() {
            for (m2, c2) in g.terms() {
                pieces.clear();
                let mut dead = false;
                for comp in &plan.comps {
                    let d = (m1 & comp.in1).count_ones() + (m2 & comp.in2).count_ones();
                    let r = self.reduce_local(comp.genus, d, comp.out.len() as u32);
                    if r.is_empty() {
                        dead = true;
                        break;
                    }
                    pieces.push(r);
                }
                if dead {
                    continue;
                }
                let mut partial: Vec<(u64, Q)> = vec![(0, c1 * c2)];
                for (comp, r) in plan.comps.iter().zip(&pieces) {
                    if r.len() == 1 {
                        let (lm, x) = &r[0];
                        let bits = spread(*lm, &comp.out);
                        for t in partial.iter_mut() {
                            t.0 |= bits;
                            if !x.is_one() {
                                t.1 *= x;
                            }
                        }
                    } else {
                        let mut next = Vec::with_capacity(partial.len() * r.len());
                        for (pm, px) in &partial {
                            for (lm, x) in r.iter() {
                                next.push((pm | spread(*lm, &comp.out), px * x));
                            }
                        }
                        partial = next;
                    }
                }
                for (m, x) in partial {
                    *acc.entry(m).or_insert_with(Q::zero) += x;
                }
            }
        }
        Mor::from_map(acc)
    }

    fn compose_plan(&mut self, a: ObjId, b: ObjId, c: ObjId) -> Rc<Plan> {
        if let Some(p) = self.compose_plans.get(&(a, b, c)) {
            return p.clone();
        }
        let (ab, bc, ac) = (self.pair(a, b), self.pair(b, c), self.pair(a, c));
        let (n1, n2) = (ab.len(), bc.len());
        let mut uf = Uf::new(n1 + n2);
        let mut glued = HashMap::new();
        let tb = self.obj(b).clone();
        for &(p, _) in &tb.arcs {
            let x = ab.circle_of_point(p);
            uf.union(x, n1 + bc.circle_of_point(p));
            *glued.entry(x).or_insert(0) += 1;
        }
        for &l in &tb.loops {
            uf.union(ab.index_of(CircleKey::Tgt(l)).unwrap(), n1 + bc.index_of(CircleKey::Src(l)).unwrap());
        }
        let outs: Vec<usize> = ac
            .keys
            .iter()
            .map(|k| match *k {
                CircleKey::Arc(p) => ab.circle_of_point(p),
                CircleKey::Src(l) => ab.index_of(CircleKey::Src(l)).unwrap(),
                CircleKey::Tgt(l) => n1 + bc.index_of(CircleKey::Tgt(l)).unwrap(),
            })
            .collect();
        let plan = Rc::new(build_plan(n1, n2, &mut uf, &glued, &outs));
        self.compose_plans.insert((a, b, c), plan.clone());
        plan
    }

    /// g ∘ f for f: A → B and g: B → C.
    pub fn compose(&mut self, a: ObjId, b: ObjId, c: ObjId, f: &Mor, g: &Mor) -> Mor {
        if f.is_zero() || g.is_zero() {
            return Mor::zero();
        }
        let plan = self.compose_plan(a, b, c);
        self.apply_plan(&plan, f, g)
    }

    pub fn try_compose(&mut self, a: ObjId, b: ObjId, c: ObjId, f: &Mor, g: &Mor) -> Result<Mor, CobError> {
        if !self.same_boundary(a, b) || !self.same_boundary(b, c) {
            return Err(CobError::BoundaryMismatch);
        }
        Ok(self.compose(a, b, c, f, g))
    }

    /// Side-by-side gluing of f1: A1 → B1 and f2: A2 → B2 along shared boundary points.
    /// Returns the glued source and target together with the glued morphism.
    pub fn glue(&mut self, a1: ObjId, b1: ObjId, a2: ObjId, b2: ObjId, f1: &Mor, f2: &Mor) -> (ObjId, ObjId, Mor) {
        let (a, b, plan) = self.glue_plan(a1, b1, a2, b2);
        let m = self.apply_plan(&plan, f1, f2);
        (a, b, m)
    }

    pub fn glue_objects(&mut self, a1: ObjId, a2: ObjId) -> ObjId {
        let t = self.obj(a1).glue(self.obj(a2));
        self.intern(&t)
    }

    fn glue_plan(&mut self, a1: ObjId, b1: ObjId, a2: ObjId, b2: ObjId) -> (ObjId, ObjId, Rc<Plan>) {
        if let Some((a, b, p)) = self.glue_plans.get(&(a1, b1, a2, b2)) {
            return (*a, *b, p.clone());
        }
        let a = self.glue_objects(a1, a2);
        let b = self.glue_objects(b1, b2);
        let (p1, p2, p) = (self.pair(a1, b1), self.pair(a2, b2), self.pair(a, b));
        let (n1, n2) = (p1.len(), p2.len());
        let bd1: std::collections::HashSet<Pt> = self.obj(a1).boundary().into_iter().collect();
        let bd2: std::collections::HashSet<Pt> = self.obj(a2).boundary().into_iter().collect();
        let mut uf = Uf::new(n1 + n2);
        let mut glued = HashMap::new();
        for &s in bd1.intersection(&bd2) {
            let x = p1.circle_of_point(s);
            uf.union(x, n1 + p2.circle_of_point(s));
            *glued.entry(x).or_insert(0) += 1;
        }
        let loop_node = |l: Pt, src: bool| -> usize {
            let key = |l| if src { CircleKey::Src(l) } else { CircleKey::Tgt(l) };
            if let Some(i) = p1.index_of(key(l)) {
                i
            } else if let Some(i) = p2.index_of(key(l)) {
                n1 + i
            } else {
                p1.circle_of_point(l)
            }
        };
        let outs: Vec<usize> = p
            .keys
            .iter()
            .map(|k| match *k {
                CircleKey::Arc(x) => {
                    if bd1.contains(&x) {
                        p1.circle_of_point(x)
                    } else {
                        n1 + p2.circle_of_point(x)
                    }
                }
                CircleKey::Src(l) => loop_node(l, true),
                CircleKey::Tgt(l) => loop_node(l, false),
            })
            .collect();
        let plan = Rc::new(build_plan(n1, n2, &mut uf, &glued, &outs));
        self.glue_plans.insert((a1, b1, a2, b2), (a, b, plan.clone()));
        (a, b, plan)
    }

    /// Reduces an arbitrary surface to the dot-mask basis.
    pub fn reduce_cobordism(&mut self, a: ObjId, b: ObjId, s: &Cobordism) -> Result<Mor, CobError> {
        let p = self.pair(a, b);
        let mut seen = vec![false; p.len()];
        let mut acc: Vec<(u64, Q)> = vec![(0, Q::one())];
        for comp in &s.components {
            let mut out = Vec::with_capacity(comp.circles.len());
            for k in &comp.circles {
                let i = p.index_of(*k).ok_or_else(|| CobError::BadCobordism(format!("{k:?} is not a circle of the pair")))?;
                if std::mem::replace(&mut seen[i], true) {
                    return Err(CobError::BadCobordism(format!("{k:?} bounds two components")));
                }
                out.push(i as u8);
            }
            let r = self.reduce_local(comp.genus, comp.dots, out.len() as u32);
            let mut next = Vec::new();
            for (pm, px) in &acc {
                for (lm, x) in r.iter() {
                    next.push((pm | spread(*lm, &out), px * x));
                }
            }
            acc = next;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(CobError::BadCobordism(format!("circle {:?} bounds nothing", p.keys[i])));
        }
        Ok(Mor::from_terms(acc))
    }

    /// The basis element of `mask` written as a surface (disks, dotted per mask).
    pub fn as_cobordism(&mut self, a: ObjId, b: ObjId, mask: u64) -> Cobordism {
        let p = self.pair(a, b);
        Cobordism {
            components: p
                .keys
                .iter()
                .enumerate()
                .map(|(i, k)| Component { circles: vec![*k], genus: 0, dots: (mask >> i & 1) as u32 })
                .collect(),
        }
    }

    /// reduce applied termwise to an already reduced combination.
    pub fn reduce(&mut self, a: ObjId, b: ObjId, f: &Mor) -> Mor {
        let mut out = Mor::zero();
        for (m, x) in f.terms() {
            let s = self.as_cobordism(a, b, *m);
            let r = self.reduce_cobordism(a, b, &s).expect("basis element is well formed");
            out.add_scaled(x, &r);
        }
        out
    }

    pub fn identity(&mut self, a: ObjId) -> Mor {
        let t = self.obj(a).clone();
        let mut comps: Vec<Component> =
            t.arcs.iter().map(|&(p, _)| Component { circles: vec![CircleKey::Arc(p)], genus: 0, dots: 0 }).collect();
        comps.extend(
            t.loops.iter().map(|&l| Component { circles: vec![CircleKey::Src(l), CircleKey::Tgt(l)], genus: 0, dots: 0 }),
        );
        self.reduce_cobordism(a, a, &Cobordism { components: comps }).unwrap()
    }

    /// Some(λ) when f = λ·id between equal loopless objects.
    pub fn iso_scalar(&self, a: ObjId, b: ObjId, f: &Mor) -> Option<Q> {
        if a != b || self.obj(a).has_loops() {
            return None;
        }
        match f.terms() {
            [(0, x)] => Some(x.clone()),
            _ => None,
        }
    }

    pub fn deloop(&mut self, a: ObjId, l: Pt) -> Result<Deloop, CobError> {
        let t = self.obj(a).clone();
        let red = t.without_loop(l).ok_or(CobError::NoLoop(l))?;
        let r = self.intern(&red);
        let body = |dots: u32, src: bool| {
            let mut comps: Vec<Component> =
                red.arcs.iter().map(|&(p, _)| Component { circles: vec![CircleKey::Arc(p)], genus: 0, dots: 0 }).collect();
            comps.extend(
                red.loops
                    .iter()
                    .map(|&k| Component { circles: vec![CircleKey::Src(k), CircleKey::Tgt(k)], genus: 0, dots: 0 }),
            );
            let key = if src { CircleKey::Src(l) } else { CircleKey::Tgt(l) };
            comps.push(Component { circles: vec![key], genus: 0, dots });
            Cobordism { components: comps }
        };
        Ok(Deloop {
            reduced: r,
            out_x: self.reduce_cobordism(a, r, &body(0, true))?,
            out_1: self.reduce_cobordism(a, r, &body(1, true))?,
            in_x: self.reduce_cobordism(r, a, &body(1, false))?,
            in_1: self.reduce_cobordism(r, a, &body(0, false))?,
        })
    }

    /// Composes `f: S → A` with the two caps of loop `l` of A, returning the
    /// components towards the x-copy and the 1-copy. A target disk with a dot
    /// feeds the x-copy.
    pub fn deloop_target(&mut self, s: ObjId, a: ObjId, l: Pt, f: &Mor) -> (Mor, Mor) {
        let i = self.pair(s, a).index_of(CircleKey::Tgt(l)).expect("target loop");
        let (plain, dotted) = f.split_bit(i);
        (dotted, plain)
    }

    /// Composes the two cups of loop `l` of A with `f: A → T`. An undotted
    /// source disk pairs with the dotted cup, so it comes from the x-copy.
    pub fn deloop_source(&mut self, a: ObjId, t: ObjId, l: Pt, f: &Mor) -> (Mor, Mor) {
        let i = self.pair(a, t).index_of(CircleKey::Src(l)).expect("source loop");
        let (plain, dotted) = f.split_bit(i);
        (plain, dotted)
    }
}

fn spread(local: u64, out: &[u8]) -> u64 {
    let mut m = 0;
    for (i, &o) in out.iter().enumerate() {
        if local >> i & 1 == 1 {
            m |= 1 << o;
        }
    }
    m
}

#[cfg(test)]
mod tests;
