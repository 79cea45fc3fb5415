//! Planar link diagrams with framing points and surgery-region markers.
//!
//! Crossings use PD order: four edges counterclockwise starting from the
//! incoming under-strand. The under-strand runs slot 0 → slot 2; the
//! over-strand runs 3 → 1 at a positive crossing and 1 → 3 at a negative one.

mod build;
mod file;
mod graph;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use build::*;
pub use graph::{Dangling, GeomCrossing, PortGraph, PortRef};

pub type EdgeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Up,
    Down,
}

impl Dir {
    pub fn sign(self) -> i64 {
        match self {
            Dir::Up => 1,
            Dir::Down => -1,
        }
    }

    pub fn flip(self) -> Dir {
        match self {
            Dir::Up => Dir::Down,
            Dir::Down => Dir::Up,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub e: [EdgeId; 4],
    pub sign: i8,
}

impl Crossing {
    /// Slots (in, out) of the over-strand.
    pub fn over_slots(&self) -> (usize, usize) {
        if self.sign > 0 {
            (3, 1)
        } else {
            (1, 3)
        }
    }

    pub fn is_incoming(&self, slot: usize) -> bool {
        slot == 0 || slot == self.over_slots().0
    }

    /// Slot where the strand entering at `slot` leaves.
    pub fn through(&self, slot: usize) -> usize {
        (slot + 2) % 4
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transit {
    pub edge: EdgeId,
    pub dir: Dir,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurgeryRegion {
    pub id: u32,
    pub strands: Vec<Transit>,
}

impl SurgeryRegion {
    pub fn len(&self) -> usize {
        self.strands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strands.is_empty()
    }

    pub fn signed_count(&self) -> i64 {
        self.strands.iter().map(|t| t.dir.sign()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagramError {
    Schema(String),
    Orientation(String),
    Dangling(String),
    UnknownRegion(u32),
    Invalid(String),
}

impl fmt::Display for DiagramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramError::Schema(m) => write!(f, "schema violation: {m}"),
            DiagramError::Orientation(m) => write!(f, "inconsistent orientation: {m}"),
            DiagramError::Dangling(m) => write!(f, "dangling edge: {m}"),
            DiagramError::UnknownRegion(j) => write!(f, "unknown region id {j}"),
            DiagramError::Invalid(m) => write!(f, "invalid diagram: {m}"),
        }
    }
}

impl std::error::Error for DiagramError {}

/// Where an edge meets a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlotRef {
    pub crossing: usize,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDiagram {
    edges: Vec<String>,
    crossings: Vec<Crossing>,
    framing: Vec<(EdgeId, i64)>,
    regions: Vec<SurgeryRegion>,
    // orientation of crossing-free loops: true = counterclockwise
    loop_ccw: BTreeMap<EdgeId, bool>,
    // derived
    tail: Vec<Option<SlotRef>>,
    head: Vec<Option<SlotRef>>,
    components: Vec<Vec<EdgeId>>,
    edge_comp: Vec<usize>,
}

impl LinkDiagram {
    pub fn new(
        edges: Vec<String>,
        crossings: Vec<Crossing>,
        framing: Vec<(EdgeId, i64)>,
        regions: Vec<SurgeryRegion>,
        loop_ccw: BTreeMap<EdgeId, bool>,
    ) -> Result<Self, DiagramError> {
        let mut d = LinkDiagram {
            edges,
            crossings,
            framing,
            regions,
            loop_ccw,
            tail: vec![],
            head: vec![],
            components: vec![],
            edge_comp: vec![],
        };
        d.derive()?;
        Ok(d)
    }

    pub fn empty() -> Self {
        Self::new(vec![], vec![], vec![], vec![], BTreeMap::new()).unwrap()
    }

    fn derive(&mut self) -> Result<(), DiagramError> {
        let n = self.edges.len();
        let mut seen = std::collections::HashSet::new();
        for name in &self.edges {
            if !seen.insert(name.as_str()) {
                return Err(DiagramError::Schema(format!("duplicate edge id {name:?}")));
            }
        }
        let mut tail: Vec<Option<SlotRef>> = vec![None; n];
        let mut head: Vec<Option<SlotRef>> = vec![None; n];
        let mut count = vec![0usize; n];
        for (ci, x) in self.crossings.iter().enumerate() {
            if x.sign != 1 && x.sign != -1 {
                return Err(DiagramError::Schema(format!("crossing {ci}: sign must be ±1")));
            }
            for (slot, &e) in x.e.iter().enumerate() {
                let e = e as usize;
                if e >= n {
                    return Err(DiagramError::Schema(format!("crossing {ci}: unknown edge index {e}")));
                }
                count[e] += 1;
                let r = Some(SlotRef { crossing: ci, slot });
                let name = &self.edges[e];
                if x.is_incoming(slot) {
                    if head[e].is_some() {
                        return Err(DiagramError::Orientation(format!(
                            "edge {name:?} enters crossings {} and {ci}",
                            head[e].unwrap().crossing
                        )));
                    }
                    head[e] = r;
                } else {
                    if tail[e].is_some() {
                        return Err(DiagramError::Orientation(format!(
                            "edge {name:?} leaves crossings {} and {ci}",
                            tail[e].unwrap().crossing
                        )));
                    }
                    tail[e] = r;
                }
            }
        }
        for e in 0..n {
            match count[e] {
                0 | 2 => {}
                1 => {
                    return Err(DiagramError::Dangling(format!(
                        "edge {:?} meets a crossing slot only once",
                        self.edges[e]
                    )))
                }
                k => {
                    return Err(DiagramError::Schema(format!(
                        "edge {:?} meets crossing slots {k} times",
                        self.edges[e]
                    )))
                }
            }
        }
        for &(e, _) in &self.framing {
            if e as usize >= n {
                return Err(DiagramError::Schema(format!("framing point on unknown edge index {e}")));
            }
        }
        let mut ids = std::collections::HashSet::new();
        for r in &self.regions {
            if !ids.insert(r.id) {
                return Err(DiagramError::Schema(format!("duplicate region id {}", r.id)));
            }
            for t in &r.strands {
                if t.edge as usize >= n {
                    return Err(DiagramError::Schema(format!("region {}: unknown edge index {}", r.id, t.edge)));
                }
            }
        }
        self.loop_ccw.retain(|&e, _| (e as usize) < n && count[e as usize] == 0);

        let mut edge_comp = vec![usize::MAX; n];
        let mut components = Vec::new();
        for start in 0..n {
            if edge_comp[start] != usize::MAX {
                continue;
            }
            let ci = components.len();
            let mut comp = vec![];
            let mut e = start;
            loop {
                edge_comp[e] = ci;
                comp.push(e as EdgeId);
                let Some(h) = head[e] else { break };
                let x = &self.crossings[h.crossing];
                e = x.e[x.through(h.slot)] as usize;
                if e == start {
                    break;
                }
                if edge_comp[e] != usize::MAX {
                    return Err(DiagramError::Orientation(format!(
                        "component through edge {:?} does not close up",
                        self.edges[start]
                    )));
                }
            }
            components.push(comp);
        }
        self.tail = tail;
        self.head = head;
        self.components = components;
        self.edge_comp = edge_comp;
        Ok(())
    }

    pub fn edges(&self) -> &[String] {
        &self.edges
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e as usize]
    }

    pub fn edge_index(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|x| x == name).map(|i| i as EdgeId)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn framing_points(&self) -> &[(EdgeId, i64)] {
        &self.framing
    }

    pub fn regions(&self) -> &[SurgeryRegion] {
        &self.regions
    }

    pub fn region(&self, id: u32) -> Result<&SurgeryRegion, DiagramError> {
        self.regions.iter().find(|r| r.id == id).ok_or(DiagramError::UnknownRegion(id))
    }

    pub fn has_regions(&self) -> bool {
        !self.regions.is_empty()
    }

    pub fn loop_ccw(&self, e: EdgeId) -> bool {
        self.loop_ccw.get(&e).copied().unwrap_or(true)
    }

    pub fn tail(&self, e: EdgeId) -> Option<SlotRef> {
        self.tail[e as usize]
    }

    pub fn head(&self, e: EdgeId) -> Option<SlotRef> {
        self.head[e as usize]
    }

    pub fn is_loop_edge(&self, e: EdgeId) -> bool {
        self.tail[e as usize].is_none()
    }

    pub fn components(&self) -> &[Vec<EdgeId>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component_of(&self, e: EdgeId) -> usize {
        self.edge_comp[e as usize]
    }

    pub fn n_plus(&self) -> usize {
        self.crossings.iter().filter(|x| x.sign > 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.crossings.iter().filter(|x| x.sign < 0).count()
    }

    pub fn framing_total(&self) -> i64 {
        self.framing.iter().map(|(_, w)| w).sum()
    }

    /// Sum of crossing signs plus framing weights.
    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|x| x.sign as i64).sum::<i64>() + self.framing_total()
    }

    pub fn strand_counts(&self) -> Vec<(u32, usize)> {
        self.regions.iter().map(|r| (r.id, r.len())).collect()
    }

    /// The algebraic class [L]: signed transit count per region.
    pub fn homology_class(&self) -> Vec<(u32, i64)> {
        self.regions.iter().map(|r| (r.id, r.signed_count())).collect()
    }

    /// Linking number of two components, from crossings between them.
    pub fn linking_number(&self, a: usize, b: usize) -> i64 {
        let mut s = 0;
        for x in &self.crossings {
            let ca = self.component_of(x.e[0]);
            let cb = self.component_of(x.e[x.over_slots().0]);
            if (ca == a && cb == b) || (ca == b && cb == a) {
                s += x.sign as i64;
            }
        }
        assert!(a == b || s % 2 == 0);
        s / 2
    }

    pub fn mirror(&self) -> LinkDiagram {
        let crossings = self
            .crossings
            .iter()
            .map(|x| {
                let [a, b, c, d] = x.e;
                if x.sign > 0 {
                    Crossing { e: [d, a, b, c], sign: -1 }
                } else {
                    Crossing { e: [b, c, d, a], sign: 1 }
                }
            })
            .collect();
        let framing = self.framing.iter().map(|&(e, w)| (e, -w)).collect();
        LinkDiagram::new(self.edges.clone(), crossings, framing, self.regions.clone(), self.loop_ccw.clone())
            .expect("mirror of a valid diagram is valid")
    }

    pub fn with_framing(&self, extra: &[(EdgeId, i64)]) -> LinkDiagram {
        let mut d = self.clone();
        d.framing.extend_from_slice(extra);
        d
    }

    /// The same diagram with every region marker dropped (strands pass straight through).
    pub fn forget_regions(&self) -> LinkDiagram {
        let mut d = self.clone();
        d.regions.clear();
        d
    }

    /// Replaces region `j` by `k` positive full twists of its strands.
    pub fn insert_full_twists(&self, j: u32, k: usize) -> Result<LinkDiagram, DiagramError> {
        let l = self.region(j)?.len();
        let word = full_twist_word(l, k);
        let mut g = PortGraph::from_diagram(self);
        g.replace_region_by_braid(j, &word, 0)?;
        g.rebuild()
    }

    /// Full twists plus a framing point of weight `k` on every transiting strand:
    /// the blackboard-framed full twist, writhe k(ℓ₊−ℓ₋)².
    pub fn insert_framed_twists(&self, j: u32, k: usize) -> Result<LinkDiagram, DiagramError> {
        let l = self.region(j)?.len();
        let word = full_twist_word(l, k);
        let mut g = PortGraph::from_diagram(self);
        g.replace_region_by_braid(j, &word, k as i64)?;
        g.rebuild()
    }

    /// Replaces region `j` by an arbitrary braid word (σ_i as `i`, σ_i⁻¹ as `-i`, 1-based).
    pub fn insert_braid(&self, j: u32, word: &[i32]) -> Result<LinkDiagram, DiagramError> {
        let mut g = PortGraph::from_diagram(self);
        g.replace_region_by_braid(j, word, 0)?;
        g.rebuild()
    }

    /// Appends `a` positively and `b` negatively oriented belts around region `j`,
    /// innermost first. The region marker stays.
    pub fn add_belts(&self, j: u32, a: usize, b: usize) -> Result<LinkDiagram, DiagramError> {
        self.region(j)?;
        if a + b == 0 {
            return Ok(self.clone());
        }
        let orient: Vec<bool> = (0..a).map(|_| true).chain((0..b).map(|_| false)).collect();
        self.add_belts_pattern(j, &orient)
    }

    /// Belts with an explicit orientation per belt (true = positive), innermost first.
    pub fn add_belts_pattern(&self, j: u32, orient: &[bool]) -> Result<LinkDiagram, DiagramError> {
        self.region(j)?;
        let mut g = PortGraph::from_diagram(self);
        g.add_belts(j, orient)?;
        g.rebuild()
    }

    pub fn to_json(&self) -> String {
        file::to_json(self)
    }
}

pub fn full_twist_word(l: usize, k: usize) -> Vec<i32> {
    let mut w = Vec::new();
    for _ in 0..k * l {
        for i in 1..l {
            w.push(i as i32);
        }
    }
    w
}

pub fn parse_diagram(text: &str) -> Result<LinkDiagram, DiagramError> {
    file::parse(text)
}
