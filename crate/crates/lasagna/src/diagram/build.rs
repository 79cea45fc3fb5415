//! Standard diagrams.

use std::collections::{BTreeMap, HashMap};

use super::*;

pub fn unknot() -> LinkDiagram {
    unlink(1)
}

pub fn unlink(n: usize) -> LinkDiagram {
    let edges = (0..n).map(|i| format!("u{i}")).collect();
    LinkDiagram::new(edges, vec![], vec![], vec![], BTreeMap::new()).unwrap()
}

/// Region `0` crossed by parallel unknotted strands with the given directions,
/// e.g. `[Up, Up]` is the two-strand input whose twisted versions are T(2,2k).
pub fn region_unlink(dirs: &[Dir]) -> LinkDiagram {
    let edges: Vec<String> = (0..dirs.len()).map(|i| format!("s{i}")).collect();
    let strands = dirs.iter().enumerate().map(|(i, &dir)| Transit { edge: i as EdgeId, dir }).collect();
    let region = SurgeryRegion { id: 0, strands };
    LinkDiagram::new(edges, vec![], vec![], vec![region], BTreeMap::new()).unwrap()
}

/// The empty link with regions `0..m`, none of them crossed.
pub fn empty_with_regions(m: u32) -> LinkDiagram {
    let regions = (0..m).map(|id| SurgeryRegion { id, strands: vec![] }).collect();
    LinkDiagram::new(vec![], vec![], vec![], regions, BTreeMap::new()).unwrap()
}

/// Closure of a braid word on `n` upward strands (σ_i = `i`, σ_i⁻¹ = `-i`).
pub fn braid_closure(n: usize, word: &[i32]) -> Result<LinkDiagram, DiagramError> {
    region_unlink(&vec![Dir::Up; n]).insert_braid(0, word)
}

/// T(2,n) as the closure of σ₁ⁿ (mirror image for negative n).
pub fn torus_2(n: i32) -> LinkDiagram {
    let g = if n >= 0 { 1 } else { -1 };
    braid_closure(2, &vec![g; n.unsigned_abs() as usize]).unwrap()
}

/// T(n,n) as the closure of one full twist on n strands.
pub fn torus_nn(n: usize) -> LinkDiagram {
    braid_closure(n, &full_twist_word(n, 1)).unwrap()
}

pub fn hopf() -> LinkDiagram {
    torus_2(2)
}

pub fn right_trefoil() -> LinkDiagram {
    torus_2(3)
}

pub fn left_trefoil() -> LinkDiagram {
    from_pd(&[[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]]).unwrap()
}

pub fn figure_eight() -> LinkDiagram {
    from_pd(&[[4, 2, 5, 1], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]]).unwrap()
}

/// Integer PD code as used in knot tables: labels increase along the
/// orientation and X[i,j,k,l] starts at the incoming under-strand i.
pub fn from_pd(pd: &[[i64; 4]]) -> Result<LinkDiagram, DiagramError> {
    let mut labels: Vec<i64> = pd.iter().flatten().copied().collect();
    labels.sort();
    labels.dedup();
    let index: HashMap<i64, EdgeId> = labels.iter().enumerate().map(|(i, &l)| (l, i as EdgeId)).collect();
    let succ: HashMap<i64, i64> = pd.iter().map(|x| (x[0], x[2])).collect();
    let crossings = pd
        .iter()
        .map(|x| {
            let (j, l) = (x[1], x[3]);
            // a kink repeats an edge; its direction fixes the over-strand
            let positive = if j == x[0] || l == x[2] {
                true
            } else if l == x[0] || j == x[2] {
                false
            } else {
                match (succ.get(&l), succ.get(&j)) {
                    (Some(&s), _) if s == j => true,
                    (_, Some(&s)) if s == l => false,
                    _ => j - l == 1 || l - j > 1,
                }
            };
            Crossing { e: x.map(|v| index[&v]), sign: if positive { 1 } else { -1 } }
        })
        .collect();
    LinkDiagram::new(labels.iter().map(|l| l.to_string()).collect(), crossings, vec![], vec![], BTreeMap::new())
}
