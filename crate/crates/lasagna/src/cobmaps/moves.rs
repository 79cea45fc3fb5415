//! Elementary moves as local edits of a web.
//!
//! R2 works on a face given by sides: the move pushes edge `a` across edge
//! `b` through the face on side `sa` of `a` and side `sb` of `b`. In a frame
//! where `a`'s boundary dart (face on its left) runs east along y = 0 and
//! `b`'s runs west along y = 1, `a` bulges north across `b` at x = 0 then
//! back at x = 1.

use super::local::Edit;
use super::web::{xnode, Kind, Node, Web};
use super::MoveError;
use crate::cobcat::Pt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// How the local map of an edit is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalKind {
    /// Connected surface through all local circles with this many dots.
    Morse { dots: u32 },
    /// Homotopy equivalence between isotopic tangles.
    Isotopy,
}

/// An edit against a web that may first need marks inserted (which leaves
/// the cube untouched).
#[derive(Clone, Debug)]
pub struct Prepared {
    pub web: Web,
    pub edit: Edit,
    pub kind: LocalKind,
    /// Edges of interest created by the move (loop label, bulge ends, ...).
    pub new_edges: Vec<Pt>,
}

fn mark_edges(w: &Web, m: usize) -> (Pt, Pt) {
    match w.nodes[m].kind {
        Kind::Mark { e, .. } => (e[0], e[1]),
        _ => unreachable!("mark expected"),
    }
}

pub fn birth(w: &Web, dotted: bool) -> Prepared {
    let mut web = w.clone();
    let l = web.fresh();
    let edit = Edit { remove: vec![], remove_loops: vec![], insert: vec![], insert_loops: vec![l] };
    Prepared { web, edit, kind: LocalKind::Morse { dots: dotted as u32 }, new_edges: vec![l] }
}

pub fn death(w: &Web, l: Pt) -> Result<Prepared, MoveError> {
    if !w.loops.contains(&l) {
        return Err(MoveError::NoEdge(l));
    }
    let edit = Edit { remove: vec![], remove_loops: vec![l], insert: vec![], insert_loops: vec![] };
    Ok(Prepared { web: w.clone(), edit, kind: LocalKind::Morse { dots: 0 }, new_edges: vec![] })
}

/// Annulus from nothing to two split loops, optionally with a dot.
pub fn coev(w: &Web, dotted: bool) -> Prepared {
    let mut web = w.clone();
    let (a, b) = (web.fresh(), web.fresh());
    let edit = Edit { remove: vec![], remove_loops: vec![], insert: vec![], insert_loops: vec![a, b] };
    Prepared { web, edit, kind: LocalKind::Morse { dots: dotted as u32 }, new_edges: vec![a, b] }
}

pub fn dot(w: &Web, e: Pt) -> Result<Prepared, MoveError> {
    let mut web = w.clone();
    let (m, _) = web.split_edge(e)?;
    let node = web.nodes[m].clone();
    let edit = Edit { remove: vec![m], remove_loops: vec![], insert: vec![node], insert_loops: vec![] };
    Ok(Prepared { web, edit, kind: LocalKind::Morse { dots: 1 }, new_edges: vec![] })
}

/// Oriented saddle between two edges facing each other across a face.
pub fn saddle(w: &Web, a: Pt, sa: Side, b: Pt, sb: Side) -> Result<Prepared, MoveError> {
    if a == b || sa != sb {
        return Err(MoveError::Malformed("saddle needs two antiparallel edges on one face".into()));
    }
    let mut web = w.clone();
    let (ma, _) = web.split_edge(a)?;
    let (mb, _) = web.split_edge(b)?;
    let (ai, ao) = mark_edges(&web, ma);
    let (bi, bo) = mark_edges(&web, mb);
    let edit = Edit {
        remove: vec![ma, mb],
        remove_loops: vec![],
        insert: vec![Node::mark(ai, bo, 0), Node::mark(bi, ao, 0)],
        insert_loops: vec![],
    };
    Ok(Prepared { web, edit, kind: LocalKind::Morse { dots: 0 }, new_edges: vec![] })
}

/// A mark on `e` whose two edges differ, so the local tangle of an isotopy
/// never holds a whole circle. Closed circles have a 2-dim space of degree-0
/// endomorphisms, which would leave the local isomorphism undetermined.
fn arc_mark(web: &mut Web, e: Pt) -> Result<usize, MoveError> {
    let (m, _) = web.split_edge(e)?;
    let (i, o) = mark_edges(web, m);
    if i == o {
        return Ok(web.split_edge(e)?.0);
    }
    Ok(m)
}

/// Adds a kink of the given sign on `e`, with a compensating framing mark.
pub fn r1(w: &Web, e: Pt, sign: i8) -> Result<Prepared, MoveError> {
    let mut web = w.clone();
    let m = arc_mark(&mut web, e)?;
    let (i, o) = mark_edges(&web, m);
    let (k, f) = (web.fresh(), web.fresh());
    let x = if sign > 0 { Node::x([i, f, k, k], 1) } else { Node::x([i, k, k, f], -1) };
    let edit =
        Edit { remove: vec![m], remove_loops: vec![], insert: vec![x, Node::mark(f, o, -(sign as i64))], insert_loops: vec![] };
    Ok(Prepared { web, edit, kind: LocalKind::Isotopy, new_edges: vec![k] })
}

/// Pushes `a` across `b`; `new_edges` = [bulge of a, bulge of b].
pub fn r2(w: &Web, a: Pt, sa: Side, b: Pt, sb: Side, a_over: bool) -> Result<Prepared, MoveError> {
    if a == b {
        return Err(MoveError::Malformed("R2 needs two edges".into()));
    }
    let mut web = w.clone();
    let ma = arc_mark(&mut web, a)?;
    let mb = arc_mark(&mut web, b)?;
    let (ai, ao) = mark_edges(&web, ma);
    let (bi, bo) = mark_edges(&web, mb);
    let (am, bm) = (web.fresh(), web.fresh());
    let a_east = sa == Side::Left;
    let b_west = sb == Side::Left;
    // at P1 (x = 0) and P2 (x = 1): a's direction and (in, out) edges
    let (a1, a2) = if a_east {
        (((0, 1), ai, am), ((0, -1), am, ao))
    } else {
        (((0, -1), am, ao), ((0, 1), ai, am))
    };
    let db = if b_west { (-1, 0) } else { (1, 0) };
    // b going west meets P2 first
    let (b1, b2) = if b_west { ((bm, bo), (bi, bm)) } else { ((bi, bm), (bm, bo)) };
    let cross = |(da, ain, aout): ((i32, i32), Pt, Pt), (bin, bout): (Pt, Pt)| {
        if a_over {
            xnode(db, da, bin, bout, ain, aout)
        } else {
            xnode(da, db, ain, aout, bin, bout)
        }
    };
    let edit = Edit {
        remove: vec![ma, mb],
        remove_loops: vec![],
        insert: vec![cross(a1, b1), cross(a2, b2)],
        insert_loops: vec![],
    };
    Ok(Prepared { web, edit, kind: LocalKind::Isotopy, new_edges: vec![am, bm] })
}

/// One strand passing a crossing.
#[derive(Clone, Copy, Debug)]
struct Pass {
    node: usize,
    input: Pt,
    output: Pt,
    over: bool,
}

fn passes(w: &Web, n: usize) -> Result<[Pass; 2], MoveError> {
    let node = w.nodes.get(n).ok_or_else(|| MoveError::Malformed(format!("no node {n}")))?;
    let (sign, e) = match node.kind {
        Kind::X { e, sign } => (sign, e),
        _ => return Err(MoveError::Malformed(format!("node {n} is not a crossing"))),
    };
    let (oi, oo) = if sign > 0 { (e[3], e[1]) } else { (e[1], e[3]) };
    Ok([Pass { node: n, input: e[0], output: e[2], over: false }, Pass { node: n, input: oi, output: oo, over: true }])
}

fn rebuild(sign: i8, under: (Pt, Pt), over: (Pt, Pt)) -> [Pt; 4] {
    let ((ui, uo), (oi, oo)) = (under, over);
    if sign > 0 {
        [ui, oo, uo, oi]
    } else {
        [ui, oi, uo, oo]
    }
}

/// Removes a bigon between two crossings of opposite sign.
pub fn r2_inverse(w: &Web, x1: usize, x2: usize) -> Result<Prepared, MoveError> {
    let bad = || MoveError::Malformed(format!("nodes {x1} and {x2} do not bound a bigon"));
    if x1 == x2 || x1.max(x2) >= w.nodes.len() || w.nodes[x1].sign() * w.nodes[x2].sign() >= 0 {
        return Err(bad());
    }
    let (p, r) = (passes(w, x1)?, passes(w, x2)?);
    let mut marks = Vec::new();
    let mut used = [false; 2];
    for s in &p {
        let hit = (0..2).find(|&k| !used[k] && r[k].over == s.over && (s.output == r[k].input || r[k].output == s.input));
        let k = hit.ok_or_else(bad)?;
        used[k] = true;
        let t = &r[k];
        let m = if s.output == t.input { Node::mark(s.input, t.output, 0) } else { Node::mark(t.input, s.output, 0) };
        marks.push(m);
    }
    let edit = Edit { remove: vec![x1, x2], remove_loops: vec![], insert: marks, insert_loops: vec![] };
    Ok(Prepared { web: w.clone(), edit, kind: LocalKind::Isotopy, new_edges: vec![] })
}

/// Slides a strand across the crossing of the other two in a triangle.
pub fn r3(w: &Web, xs: [usize; 3]) -> Result<Prepared, MoveError> {
    let bad = |why: &str| MoveError::Malformed(format!("nodes {xs:?} are not an R3 triangle: {why}"));
    if xs[0] == xs[1] || xs[1] == xs[2] || xs[0] == xs[2] {
        return Err(bad("repeated node"));
    }
    let all: Vec<Pass> = xs.iter().map(|&n| passes(w, n)).collect::<Result<Vec<_>, _>>()?.concat();
    // chain passes into strands: first -> second through an interior edge
    let mut strands: Vec<(Pass, Pass)> = Vec::new();
    let mut seen = [false; 6];
    for i in 0..6 {
        for j in 0..6 {
            if all[i].node != all[j].node && all[i].output == all[j].input && !seen[i] && !seen[j] {
                seen[i] = true;
                seen[j] = true;
                strands.push((all[i], all[j]));
            }
        }
    }
    if strands.len() != 3 {
        return Err(bad("three strands must each pass two of the crossings"));
    }
    let tops = strands.iter().filter(|(a, b)| a.over && b.over).count();
    let bottoms = strands.iter().filter(|(a, b)| !a.over && !b.over).count();
    if tops != 1 || bottoms != 1 {
        return Err(bad("needs a top, a middle and a bottom strand"));
    }
    let mut web = w.clone();
    let mids: Vec<Pt> = strands.iter().map(|_| web.fresh()).collect();
    let mut insert = Vec::new();
    for &n in &xs {
        let mut under = None;
        let mut over = None;
        for (k, (a, b)) in strands.iter().enumerate() {
            // the order along each strand is reversed
            let (pass, edges) = if a.node == n {
                (a, (mids[k], b.output))
            } else if b.node == n {
                (b, (a.input, mids[k]))
            } else {
                continue;
            };
            if pass.over {
                over = Some(edges);
            } else {
                under = Some(edges);
            }
        }
        let sign = w.nodes[n].sign();
        let mut node = Node::x(rebuild(sign, under.unwrap(), over.unwrap()), sign);
        node.tag = w.nodes[n].tag.clone();
        insert.push(node);
    }
    let edit = Edit { remove: xs.to_vec(), remove_loops: vec![], insert, insert_loops: vec![] };
    Ok(Prepared { web, edit, kind: LocalKind::Isotopy, new_edges: mids })
}
