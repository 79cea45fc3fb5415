//! Graded dimensions of the lasagna module of a 2-handlebody, as the
//! colimit of symmetrised belt-cabled homologies along dotted annuli.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde_json::json;

use crate::cobcat::FrobeniusSpec;
use crate::cobmaps::belts::{dcoev_map, dcoev_split, split_q2, sym_nonsplit, sym_split};
use crate::cobmaps::hom::rank_in;
use crate::cobmaps::{BeltStage, HMap, MoveError, Reduced};
use crate::complex::{new_context, CobRef, DimTable, Grading, Window};
use crate::diagram::LinkDiagram;
use crate::khovanov::{khr2_dims, KhError, DENSE_LIMIT};

/// Largest belt count handled with the tensor model unless `allow_large`.
pub const SPLIT_BELT_LIMIT: usize = 8;
/// Largest strands + belts around a region the link passes through.
pub const CABLE_LIMIT: usize = 6;

#[derive(Clone, Debug)]
pub struct HandlebodySpec {
    /// Boundary link; region j is where the j-th 2-handle is attached.
    pub link: LinkDiagram,
    /// Skein class α, one entry per region (missing entries are α_L).
    pub alpha: Vec<i64>,
    pub allow_large: bool,
}

impl HandlebodySpec {
    pub fn new(link: LinkDiagram, alpha: Vec<i64>) -> Self {
        HandlebodySpec { link, alpha, allow_large: false }
    }

    /// n = α − α_L per region.
    pub fn offsets(&self) -> Result<Vec<i64>, LasagnaError> {
        let cls = self.link.homology_class();
        if self.alpha.len() > cls.len() {
            return Err(LasagnaError::Input(format!("{} alpha entries for {} regions", self.alpha.len(), cls.len())));
        }
        Ok(cls.iter().enumerate().map(|(i, &(_, a))| self.alpha.get(i).map_or(0, |x| x - a)).collect())
    }
}

#[derive(Debug)]
pub enum LasagnaError {
    Input(String),
    Kh(KhError),
    Move(MoveError),
}

impl fmt::Display for LasagnaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LasagnaError::Input(s) => write!(f, "{s}"),
            LasagnaError::Kh(e) => write!(f, "{e}"),
            LasagnaError::Move(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LasagnaError {}

impl From<KhError> for LasagnaError {
    fn from(e: KhError) -> Self {
        LasagnaError::Kh(e)
    }
}

impl From<MoveError> for LasagnaError {
    fn from(e: MoveError) -> Self {
        LasagnaError::Move(e)
    }
}

/// One stage of the directed system: symmetrised homology and the rank of
/// the incoming transition, both on the window.
#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub r: usize,
    pub belts: usize,
    pub dims: DimTable,
    pub incoming: Option<DimTable>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LasagnaResult {
    pub dims: DimTable,
    pub window: Window,
    pub stabilized: bool,
    /// Gradings in the window where the last transition is not an isomorphism.
    pub unstable: Vec<Grading>,
    /// Per region with belts: the stages of that region's system.
    pub stages: Vec<(u32, Vec<StageReport>)>,
    pub offsets: Vec<i64>,
    pub zero: bool,
}

impl LasagnaResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "window": self.window.to_string(),
            "dims": self.dims.to_json_value(),
            "stabilized": self.stabilized,
            "unstable": self.unstable.iter().map(|g| json!([crate::rational::half(g.h2), crate::rational::half(g.q2)])).collect::<Vec<_>>(),
            "offsets": self.offsets,
            "zero": self.zero,
            "stages": self.stages.iter().map(|(j, st)| json!({
                "region": j,
                "stages": st.iter().map(|s| json!({
                    "r": s.r,
                    "belts": s.belts,
                    "dims": s.dims.to_json_value(),
                    "incoming_rank": s.incoming.as_ref().map(|t| t.to_json_value()),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// A finished directed system: V_r as a projector on stage homology, and the
/// transition matrices.
struct System {
    gradings: Vec<Vec<Grading>>,
    sym: Vec<HMap>,
    trans: Vec<HMap>,
    belts: Vec<usize>,
}

impl System {
    fn stage_dims(&self, r: usize, w: &Window) -> DimTable {
        graded_ranks(&self.sym[r], &self.gradings[r], w)
    }

    fn incoming(&self, r: usize, w: &Window) -> Option<DimTable> {
        (r > 0).then(|| graded_ranks(&self.trans[r - 1], &self.gradings[r - 1], w))
    }

    /// Colimit on `w` and the gradings where the last step is not an iso.
    fn colimit(&self, w: &Window) -> (DimTable, Vec<Grading>) {
        let last = self.sym.len() - 1;
        let top = self.stage_dims(last, w);
        let Some(inc) = self.incoming(last, w) else {
            let all = top.iter().map(|(g, _)| g).collect();
            return (top, all);
        };
        let prev = self.stage_dims(last - 1, w);
        let mut unstable = Vec::new();
        let mut keys: Vec<Grading> = top.iter().chain(prev.iter()).map(|(g, _)| g).collect();
        keys.sort();
        keys.dedup();
        for g in keys {
            if !(inc.get(g) == top.get(g) && inc.get(g) == prev.get(g)) {
                unstable.push(g);
            }
        }
        (inc, unstable)
    }

    fn reports(&self, w: &Window) -> Vec<StageReport> {
        (0..self.sym.len())
            .map(|r| StageReport { r, belts: self.belts[r], dims: self.stage_dims(r, w), incoming: self.incoming(r, w) })
            .collect()
    }
}

fn graded_ranks(m: &HMap, src: &[Grading], w: &Window) -> DimTable {
    let mut gs: Vec<Grading> = src.iter().copied().filter(|g| w.contains(*g)).collect();
    gs.sort();
    gs.dedup();
    let mut t = DimTable::new();
    for g in gs {
        let r = rank_in(m, src, g);
        if r > 0 {
            t.insert(g, r);
        }
    }
    t
}

fn orient(n: i64, r: usize) -> Vec<bool> {
    let (p, m) = (n.max(0) as usize + r, (-n).max(0) as usize + r);
    (0..p).map(|_| true).chain((0..m).map(|_| false)).collect()
}

fn guard(ok: bool, what: String, allow: bool) -> Result<(), LasagnaError> {
    if ok || allow {
        Ok(())
    } else {
        Err(LasagnaError::Input(format!("{what}; pass allow_large to run it anyway")))
    }
}

/// Belts around a region no strand crosses: V^{⊗k} with the tensor
/// permutation action.
fn split_system(n: i64, r_max: usize, allow: bool) -> Result<System, LasagnaError> {
    let mut s = System { gradings: vec![], sym: vec![], trans: vec![], belts: vec![] };
    for r in 0..=r_max {
        let k = n.unsigned_abs() as usize + 2 * r;
        guard(k <= SPLIT_BELT_LIMIT, format!("{k} split belts exceed the limit of {SPLIT_BELT_LIMIT}"), allow)?;
        let shift = -2 * k as i64;
        s.gradings.push((0..1usize << k).map(|b| Grading { h2: 0, q2: 2 * split_q2(k, b) + shift }).collect());
        s.sym.push(sym_split(k));
        s.belts.push(k);
        if r > 0 {
            let kp = k - 2;
            let d = dcoev_split(kp, n.max(0) as usize + r - 1);
            s.trans.push(s.sym[r].after(&d).after(&s.sym[r - 1]));
        }
    }
    Ok(s)
}

struct Stage {
    st: BeltStage,
    red: Reduced,
}

/// Belts around region `j`, which the link crosses.
fn nonsplit_system(cob: &CobRef, d: &LinkDiagram, j: u32, n: i64, r_max: usize, allow: bool) -> Result<System, LasagnaError> {
    let l = d.region(j).map_err(|e| LasagnaError::Input(e.to_string()))?.len();
    let mut s = System { gradings: vec![], sym: vec![], trans: vec![], belts: vec![] };
    let mut prev: Option<Stage> = None;
    for r in 0..=r_max {
        let o = orient(n, r);
        let k = o.len();
        guard(l + k <= CABLE_LIMIT, format!("{l} strands with {k} belts exceed the cable limit of {CABLE_LIMIT}"), allow)?;
        let st = BeltStage::new(d, j, &o)?;
        let nx = st.web.crossings().len();
        if nx > DENSE_LIMIT {
            return Err(LasagnaError::Input(format!("stage r = {r} has {nx} crossings, beyond the full-cube limit of {DENSE_LIMIT}")));
        }
        let red = Reduced::new(cob, &st.web)?;
        log::info!("stage r = {r}: {k} belts, {} generators", red.dim());
        let shift = -2 * k as i64;
        let gs: Vec<Grading> = red.gradings().iter().map(|g| g.shift(0, shift)).collect();
        let sym = if k >= 2 { sym_nonsplit(cob, d, j, &st, &red)? } else { HMap::identity(red.dim()) };
        if let Some(p) = &prev {
            let a = n.max(0) as usize + r - 1;
            let dc = dcoev_map(cob, &p.st, &p.red, a, &st, &red)?;
            let m = sym.after(&dc).after(&s.sym[r - 1]);
            check_homogeneous(&m, &s.gradings[r - 1], &gs)?;
            s.trans.push(m);
        }
        s.gradings.push(gs);
        s.sym.push(sym);
        s.belts.push(k);
        prev = Some(Stage { st, red });
    }
    Ok(s)
}

fn check_homogeneous(m: &HMap, src: &[Grading], tgt: &[Grading]) -> Result<(), LasagnaError> {
    for (t, row) in m.rows.iter().enumerate() {
        for (s, x) in row.iter().enumerate() {
            if !x.is_zero() && src[s] != tgt[t] {
                return Err(LasagnaError::Move(MoveError::Malformed(format!(
                    "transition maps grading {:?} to {:?}",
                    src[s], tgt[t]
                ))));
            }
        }
    }
    Ok(())
}

/// Colimit dimensions on `w` from stages r = 0..=r_max.
pub fn s02_dims(spec: &HandlebodySpec, w: &Window, r_max: usize) -> Result<LasagnaResult, LasagnaError> {
    if r_max < 1 {
        return Err(LasagnaError::Input("r_max must be at least 1".into()));
    }
    let d = &spec.link;
    let offsets = spec.offsets()?;
    let regions: Vec<(u32, usize)> = d.regions().iter().map(|r| (r.id, r.len())).collect();
    if regions.iter().any(|r| r.1 % 2 == 1) {
        return Ok(LasagnaResult {
            dims: DimTable::new(),
            window: w.clone(),
            stabilized: true,
            unstable: vec![],
            stages: vec![],
            offsets,
            zero: true,
        });
    }
    let crossed: Vec<usize> = (0..regions.len()).filter(|&i| regions[i].1 > 0).collect();
    if crossed.len() > 1 {
        return Err(LasagnaError::Input("at most one region may be crossed by the link".into()));
    }
    let cob = new_context(FrobeniusSpec::khovanov());
    // the crossed region carries the link; every other region contributes a tensor factor
    let mut systems: Vec<(u32, System)> = Vec::new();
    let base: Option<usize> = crossed.first().copied();
    if let Some(i) = base {
        systems.push((regions[i].0, nonsplit_system(&cob, d, regions[i].0, offsets[i], r_max, spec.allow_large)?));
    }
    for (i, r) in regions.iter().enumerate() {
        if Some(i) != base {
            systems.push((r.0, split_system(offsets[i], r_max, spec.allow_large)?));
        }
    }
    let link_dims = if base.is_some() {
        DimTable::unit()
    } else {
        khr2_dims(&d.forget_regions(), &Window::all())?
    };
    // each factor is needed on the window moved by the support of the others
    let mut factors: Vec<(DimTable, Vec<Grading>)> = Vec::new();
    let wide = widen(w, &link_dims, systems.len());
    for (_, s) in &systems {
        factors.push(s.colimit(&wide));
    }
    let mut dims = link_dims.clone();
    let mut bad: BTreeSet<Grading> = BTreeSet::new();
    let sum = |a: &BTreeSet<Grading>, b: &BTreeSet<Grading>| -> BTreeSet<Grading> {
        a.iter().flat_map(|x| b.iter().map(move |y| Grading { h2: x.h2 + y.h2, q2: x.q2 + y.q2 })).collect()
    };
    for (t, u) in &factors {
        // a product grading is unstable if some splitting of it meets an unstable factor grading
        let u: BTreeSet<Grading> = u.iter().copied().collect();
        let supp = |d: &DimTable| d.iter().map(|(g, _)| g).collect::<BTreeSet<_>>();
        let reach: BTreeSet<Grading> = supp(t).union(&u).copied().collect();
        let mut next = sum(&supp(&dims), &u);
        next.extend(sum(&bad, &reach));
        bad = next;
        dims = dims.tensor(t);
    }
    let unstable: Vec<Grading> = bad.into_iter().filter(|g| w.contains(*g)).collect();
    Ok(LasagnaResult {
        dims: dims.restrict(w),
        window: w.clone(),
        stabilized: unstable.is_empty(),
        unstable,
        stages: systems.iter().map(|(j, s)| (*j, s.reports(&wide))).collect(),
        offsets,
        zero: false,
    })
}

/// The window seen by one factor of a product with `others` other factors.
fn widen(w: &Window, link: &DimTable, others: usize) -> Window {
    if others <= 1 && link == &DimTable::unit() {
        return w.clone();
    }
    let lo = |x: Option<i64>, m: Option<i64>| x.zip(m).map(|(x, m)| x - m);
    let (hmax, qmax) = (link.max_h2(), link.iter().map(|(g, _)| g.q2).max());
    if others <= 1 {
        return Window {
            h_lo: lo(w.h_lo, hmax),
            h_hi: lo(w.h_hi, link.min_h2()),
            q_lo: lo(w.q_lo, qmax),
            q_hi: lo(w.q_hi, link.min_q2()),
        };
    }
    // several split factors: their supports are unbounded below in q
    Window { h_lo: None, h_hi: None, q_lo: None, q_hi: None }
}

/// A standard belt link: unknotted components, each crossing the single
/// region once, no crossings or framing.
fn check_belt_link(d: &LinkDiagram) -> Result<(u32, usize), LasagnaError> {
    let bad = |s: &str| Err(LasagnaError::Input(format!("not a standard belt link: {s}")));
    if !d.crossings().is_empty() || !d.framing_points().is_empty() {
        return bad("has crossings or framing points");
    }
    let [reg] = d.regions() else { return bad("needs exactly one region") };
    if reg.len() != d.component_count() {
        return bad("every component must cross the region once");
    }
    let mut comps: Vec<usize> = reg.strands.iter().map(|t| d.component_of(t.edge)).collect();
    comps.sort();
    comps.dedup();
    if comps.len() != reg.len() {
        return bad("a component crosses the region twice");
    }
    Ok((reg.id, reg.len()))
}

/// Certificate that the class 1 of a belt link survives to the colimit.
#[derive(Clone, Debug, PartialEq)]
pub struct CappingCertificate {
    pub grading: Grading,
    /// Norm-free witness: number of nonzero coordinates of the image at each stage.
    pub support: Vec<usize>,
    pub nonzero: bool,
}

pub fn belt_capping_class(link: &LinkDiagram, r_max: usize) -> Result<CappingCertificate, LasagnaError> {
    let (j, l) = check_belt_link(link)?;
    if l % 2 == 1 {
        return Err(LasagnaError::Input(format!("belt link with {l} strands has no 2-divisible class")));
    }
    let grading = Grading::hq(0, -(l as i64));
    let cob = new_context(FrobeniusSpec::khovanov());
    let sys = if l == 0 { split_system(0, r_max, false)? } else { nonsplit_system(&cob, link, j, 0, r_max, false)? };
    // 1 ⊗ … ⊗ 1 is the unique generator of stage 0 in the lowest grading
    let g0 = &sys.gradings[0];
    let at: Vec<usize> = (0..g0.len()).filter(|&i| g0[i] == grading).collect();
    let [one] = at[..] else {
        return Err(LasagnaError::Input(format!("stage 0 has {} generators at the unit grading", at.len())));
    };
    let mut v = vec![num_traits::zero(); g0.len()];
    v[one] = num_traits::one();
    v = sys.sym[0].apply(&v);
    let mut support = vec![v.iter().filter(|x: &&crate::rational::Q| !x.is_zero()).count()];
    for m in &sys.trans {
        v = m.apply(&v);
        support.push(v.iter().filter(|x| !x.is_zero()).count());
    }
    Ok(CappingCertificate { grading, nonzero: support.iter().all(|&s| s > 0), support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{empty_with_regions, region_unlink, unknot, Dir};

    fn fixture(alpha: i64) -> LasagnaResult {
        let spec = HandlebodySpec::new(empty_with_regions(1), vec![alpha]);
        s02_dims(&spec, &Window::hq((None, None), (Some(-6), Some(0))), 3).unwrap()
    }

    #[test]
    fn d2_times_s2_one_class_per_even_degree() {
        for alpha in [0, 1] {
            let r = fixture(alpha);
            assert!(r.stabilized, "{:?}", r.unstable);
            assert_eq!(r.dims, DimTable::from_hq(&[(0, 0, 1), (0, -2, 1), (0, -4, 1), (0, -6, 1)]));
        }
    }

    #[test]
    fn transitions_are_injective_and_grading_is_bookkept() {
        for alpha in [0i64, 1, -1, 2] {
            let r = fixture(alpha);
            let st = &r.stages[0].1;
            for s in st {
                // q ↦ q − |n| − 2r puts the top class of Sym^k(V) at q = 0
                assert_eq!(s.belts, alpha.unsigned_abs() as usize + 2 * s.r);
                assert_eq!(s.dims.iter().map(|(g, _)| g.q2).max(), Some(0));
                if let Some(inc) = &s.incoming {
                    let prev = &st[s.r - 1].dims;
                    assert_eq!(inc, prev, "r = {}", s.r);
                }
            }
            assert!(r.dims.iter().all(|(g, _)| g.h2 == 0));
        }
    }

    #[test]
    fn instability_is_flagged() {
        let spec = HandlebodySpec::new(empty_with_regions(1), vec![0]);
        let r = s02_dims(&spec, &Window::hq((None, None), (Some(-10), Some(0))), 2).unwrap();
        assert!(!r.stabilized);
        assert_eq!(r.unstable, vec![Grading::hq(0, -8), Grading::hq(0, -6)]);
    }

    #[test]
    fn odd_strands_give_zero() {
        let spec = HandlebodySpec::new(region_unlink(&[Dir::Up]), vec![]);
        let r = s02_dims(&spec, &Window::all(), 1).unwrap();
        assert!(r.zero && r.dims.is_empty());
    }

    #[test]
    fn split_link_factor() {
        // an unknot beside the handle: H(unknot) ⊗ (one class per even degree)
        let mut d = unknot();
        d = crate::diagram::LinkDiagram::new(
            d.edges().to_vec(),
            vec![],
            vec![],
            vec![crate::diagram::SurgeryRegion { id: 0, strands: vec![] }],
            Default::default(),
        )
        .unwrap();
        let spec = HandlebodySpec::new(d, vec![0]);
        let r = s02_dims(&spec, &Window::hq((None, None), (Some(-5), Some(1))), 3).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.dims, DimTable::from_hq(&[(0, 1, 1), (0, -1, 2), (0, -3, 2), (0, -5, 2)]));
    }

    #[test]
    fn capping_classes() {
        let c = belt_capping_class(&empty_with_regions(1), 2).unwrap();
        assert!(c.nonzero);
        assert_eq!(c.grading, Grading::hq(0, 0));
        assert!(belt_capping_class(&region_unlink(&[Dir::Up]), 1).is_err());
        assert!(belt_capping_class(&unknot(), 1).is_err());
    }
}

#[cfg(test)]
mod nonsplit {
    use super::*;
    use crate::diagram::{region_unlink, Dir};

    #[test]
    fn belt_link_unit_survives() {
        for dirs in [[Dir::Up, Dir::Up], [Dir::Up, Dir::Down]] {
            let c = belt_capping_class(&region_unlink(&dirs), 1).unwrap();
            assert_eq!(c.grading, Grading::hq(0, -2));
            assert!(c.nonzero);
        }
    }

    #[test]
    fn belt_link_stages() {
        let spec = HandlebodySpec::new(region_unlink(&[Dir::Up, Dir::Up]), vec![]);
        let r = s02_dims(&spec, &Window::hq((Some(-2), Some(2)), (Some(-6), Some(2))), 1).unwrap();
        // one stage cannot certify anything, but the bottom class is there
        assert!(!r.stabilized);
        assert_eq!(r.dims.get(Grading::hq(0, -2)), 1);
        assert!(r.dims.iter().all(|(g, _)| g.h2 == 0 && g.q2 >= -4));
    }
}
