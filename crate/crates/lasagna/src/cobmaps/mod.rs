//! Chain maps induced by movies of elementary moves on webs.
//!
//! A web is a closed planar diagram whose nodes are crossings and bivalent
//! marks (framing weights, tags, or just places to cut an edge). Every move
//! is a local edit; its chain map is the map of the local tangle cubes glued
//! with identity cobordisms on the rest of the cube.

pub mod belts;
pub mod hom;
pub mod iso;
pub mod local;
pub mod moves;
pub mod web;

#[cfg(test)]
mod tests;

use std::fmt;

use crate::cobcat::{CobError, Pt};
use crate::complex::{BigradedComplex, ChainMap, CobRef};

pub use hom::{HMap, Reduced};
pub use moves::{LocalKind, Prepared, Side};
pub use web::{BeltStage, Kind, Node, Web};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveError {
    Malformed(String),
    TooLarge(usize),
    NoEdge(Pt),
    NotIsotopic(usize, usize),
    Cob(String),
    AtStep(usize, Box<MoveError>),
}

impl fmt::Display for MoveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveError::Malformed(s) => write!(f, "malformed move: {s}"),
            MoveError::TooLarge(n) => write!(f, "web with {n} crossings is too large for a full cube"),
            MoveError::NoEdge(e) => write!(f, "no edge {e} in the web"),
            MoveError::NotIsotopic(a, b) => {
                write!(f, "local tangles are not isotopic (minimal complexes of size {a} and {b})")
            }
            MoveError::Cob(s) => write!(f, "{s}"),
            MoveError::AtStep(i, e) => write!(f, "step {i}: {e}"),
        }
    }
}

impl std::error::Error for MoveError {}

impl From<CobError> for MoveError {
    fn from(e: CobError) -> Self {
        MoveError::Cob(e.to_string())
    }
}

/// An elementary move with its location in the current web.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementaryMove {
    Birth { dotted: bool },
    Death { edge: Pt },
    Saddle { a: Pt, sa: Side, b: Pt, sb: Side },
    Dot { edge: Pt },
    R1 { edge: Pt, sign: i8 },
    R2 { a: Pt, sa: Side, b: Pt, sb: Side, a_over: bool },
    R2Inverse { nodes: [usize; 2] },
    R3 { nodes: [usize; 3] },
    Coev { dotted: bool },
}

impl ElementaryMove {
    pub fn prepare(&self, w: &Web) -> Result<Prepared, MoveError> {
        use ElementaryMove::*;
        match *self {
            Birth { dotted } => Ok(moves::birth(w, dotted)),
            Death { edge } => moves::death(w, edge),
            Saddle { a, sa, b, sb } => moves::saddle(w, a, sa, b, sb),
            Dot { edge } => moves::dot(w, edge),
            R1 { edge, sign } => moves::r1(w, edge, sign),
            R2 { a, sa, b, sb, a_over } => moves::r2(w, a, sa, b, sb, a_over),
            R2Inverse { nodes } => moves::r2_inverse(w, nodes[0], nodes[1]),
            R3 { nodes } => moves::r3(w, nodes),
            Coev { dotted } => Ok(moves::coev(w, dotted)),
        }
    }
}

/// The local map of a prepared move, between the local tangle cubes.
pub fn local_map(cob: &CobRef, p: &Prepared) -> Result<ChainMap, MoveError> {
    let src = p.edit.src_nodes(&p.web);
    let cs = local::tangle_cube(cob, &src, &p.edit.remove_loops);
    let ct = local::tangle_cube(cob, &p.edit.insert, &p.edit.insert_loops);
    match p.kind {
        LocalKind::Isotopy => local::isotopy_map(&cs, &ct),
        LocalKind::Morse { dots } => {
            if cs.len() != 1 || ct.len() != 1 {
                return Err(MoveError::Malformed("Morse moves act on crossingless tangles".into()));
            }
            let (so, to) = (cs.gen(0).obj, ct.gen(0).obj);
            let m = local::morse(cob, so, to, dots);
            let deg = cob.borrow_mut().homogeneous_degree(so, to, &m).unwrap_or(0);
            let (gs, gt) = (cs.gen(0).grading, ct.gen(0).grading);
            let mut f = ChainMap::new(crate::complex::Grading { h2: gt.h2 - gs.h2, q2: 2 * deg + gt.q2 - gs.q2 });
            f.add(0, 0, &m, &num_traits::One::one());
            Ok(f)
        }
    }
}

/// One applied move: the target web and the map of full cubes.
pub struct Step {
    pub web: Web,
    pub map: ChainMap,
}

/// Applies a move to a web; the returned map is C(w) → C(target).
pub fn induced_map(cob: &CobRef, w: &Web, mv: &ElementaryMove) -> Result<(Step, Prepared), MoveError> {
    let p = mv.prepare(w)?;
    let g = local_map(cob, &p)?;
    let (web, map) = local::globalize_map(cob, &p.web, &p.edit, &g)?;
    Ok((Step { web, map }, p))
}

/// Runs a movie and composes the chain maps of its steps.
pub fn movie_compose(cob: &CobRef, start: &Web, movie: &[ElementaryMove]) -> Result<(Web, ChainMap), MoveError> {
    let c0 = start.full_cube(cob)?;
    let mut total = ChainMap::identity(&c0);
    let mut cur: (Web, BigradedComplex) = (start.clone(), c0.clone());
    for (i, mv) in movie.iter().enumerate() {
        let at = |e| MoveError::AtStep(i, Box::new(e));
        let (step, _) = induced_map(cob, &cur.0, mv).map_err(at)?;
        let cn = step.web.full_cube(cob).map_err(at)?;
        total = total.then(&step.map, &c0, &cur.1, &cn);
        cur = (step.web, cn);
    }
    Ok((cur.0, total))
}
