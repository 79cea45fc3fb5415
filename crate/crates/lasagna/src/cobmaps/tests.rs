use super::*;
use crate::cobcat::FrobeniusSpec;
use crate::complex::{new_context, DimTable, Grading, Window};
use crate::diagram::{braid_closure, region_unlink, right_trefoil, Dir};
use crate::khovanov::khr2_dims;

fn ctx() -> CobRef {
    new_context(FrobeniusSpec::khovanov())
}

/// Applies a move, checks the chain map, and returns the homology matrix.
fn step(cob: &CobRef, w: &Web, mv: &ElementaryMove) -> (Web, HMap, Grading) {
    let (st, _) = induced_map(cob, w, mv).unwrap();
    let (cs, ct) = (w.full_cube(cob).unwrap(), st.web.full_cube(cob).unwrap());
    assert!(ct.verify_d_squared());
    assert!(ct.check_gradings());
    assert!(st.map.is_chain_map(&cs, &ct), "{mv:?} is not a chain map");
    assert!(st.map.is_homogeneous(&cs, &ct), "{mv:?} is not homogeneous");
    let (ra, rb) = (Reduced::new(cob, w).unwrap(), Reduced::new(cob, &st.web).unwrap());
    let h = ra.push(&st.map, &rb);
    (st.web, h, st.map.shift)
}

fn all() -> Window {
    Window::all()
}

#[test]
fn r2_on_two_loops_is_a_homology_iso() {
    let cob = ctx();
    let w = Web::new(vec![], [0, 1]).unwrap();
    for (sa, sb, over) in [(Side::Left, Side::Left, true), (Side::Right, Side::Left, false), (Side::Right, Side::Right, true)] {
        let (w2, h, shift) = step(&cob, &w, &ElementaryMove::R2 { a: 0, sa, b: 1, sb, a_over: over });
        assert_eq!(w2.crossings().len(), 2);
        assert_eq!(shift, Grading::default());
        assert_eq!((h.nrows(), h.rank()), (4, 4));
        // and back
        let xs = w2.crossings();
        let (w3, h2, _) = step(&cob, &w2, &ElementaryMove::R2Inverse { nodes: [xs[0], xs[1]] });
        assert_eq!(w3.crossings().len(), 0);
        assert_eq!(h2.after(&h).rank(), 4);
    }
}

#[test]
fn r3_on_a_braid_triangle() {
    let cob = ctx();
    let w = Web::from_diagram(&braid_closure(3, &[1, 2, 1]).unwrap());
    let xs = w.crossings();
    let (w2, h, _) = step(&cob, &w, &ElementaryMove::R3 { nodes: [xs[0], xs[1], xs[2]] });
    assert_eq!(h.rank(), h.nrows());
    assert_eq!(h.nrows(), Reduced::new(&cob, &w).unwrap().dim());
    let _ = w2;
}

#[test]
fn r1_kinks_are_homology_isos() {
    let cob = ctx();
    let w = Web::new(vec![], [0]).unwrap();
    for sign in [1, -1] {
        let (w2, h, shift) = step(&cob, &w, &ElementaryMove::R1 { edge: 0, sign });
        // framed writhe is preserved by the compensating mark
        assert_eq!(w2.writhe(), 0);
        assert_eq!(w2.framing_total(), -(sign as i64));
        assert_eq!(shift, Grading::default());
        assert_eq!((h.nrows(), h.rank()), (2, 2));
    }
}

#[test]
fn morse_bidegrees() {
    let cob = ctx();
    let w = Web::new(vec![], [0]).unwrap();
    let (_, _, s) = step(&cob, &w, &ElementaryMove::Birth { dotted: false });
    assert_eq!(s, Grading::hq(0, -1));
    let (_, _, s) = step(&cob, &w, &ElementaryMove::Death { edge: 0 });
    assert_eq!(s, Grading::hq(0, -1));
    let (_, _, s) = step(&cob, &w, &ElementaryMove::Dot { edge: 0 });
    assert_eq!(s, Grading::hq(0, 2));
    let (_, _, s) = step(&cob, &Web::empty(), &ElementaryMove::Coev { dotted: false });
    assert_eq!(s, Grading::hq(0, 0));
    let (_, _, s) = step(&cob, &Web::empty(), &ElementaryMove::Coev { dotted: true });
    assert_eq!(s, Grading::hq(0, 2));
}

#[test]
fn stage_webs_match_cabled_diagrams() {
    let cob = ctx();
    for (dirs, orient) in [
        (vec![Dir::Up, Dir::Down], vec![true, false]),
        (vec![Dir::Up, Dir::Up], vec![true]),
        (vec![Dir::Up, Dir::Down], vec![false, false]),
    ] {
        let d = region_unlink(&dirs);
        let st = BeltStage::new(&d, 0, &orient).unwrap();
        let red = Reduced::new(&cob, &st.web).unwrap();
        let cabled = d.add_belts_pattern(0, &orient).unwrap().forget_regions();
        assert_eq!(red.dims(), khr2_dims(&cabled, &all()).unwrap(), "{dirs:?} {orient:?}");
    }
}

#[test]
fn trefoil_web_dims() {
    let cob = ctx();
    let d = right_trefoil();
    let red = Reduced::new(&cob, &Web::from_diagram(&d)).unwrap();
    assert_eq!(red.dims(), khr2_dims(&d, &all()).unwrap());
    let _ = DimTable::new();
}

use std::collections::BTreeMap;

use crate::rational::{q, Q};

/// Basis vectors of a crossingless web's homology as bitstrings over its
/// circles (in the given order): bit 1 = x, bit 0 = 1.
fn decode(red: &Reduced, w: &Web, order: &[Pt]) -> Vec<u64> {
    let circ = w.circles(0);
    let which = |label: i32| -> usize {
        let c = circ.iter().find(|c| c[0] as i32 == label).expect("loop label");
        order.iter().position(|e| c.contains(e)).expect("circle in order")
    };
    red.min
        .complex
        .gens()
        .iter()
        .map(|g| {
            let mut b = 0u64;
            for pair in g.tag.chunks(2) {
                b |= (pair[1] as u64) << which(pair[0]);
            }
            b
        })
        .collect()
}

/// Column `col` of `m` as a map bitstring -> coefficient.
fn column(m: &HMap, basis: &[u64], col: usize) -> BTreeMap<u64, Q> {
    (0..m.nrows()).filter(|&r| m.rows[r][col] != q(0)).map(|r| (basis[r], m.rows[r][col].clone())).collect()
}

/// Frobenius algebra ℚ[x]/(x² − c) on bitstrings: comultiplication of a
/// single factor into two.
fn dense_comult(bit: u64, c: &Q) -> BTreeMap<u64, Q> {
    // positions: input factor -> outputs (0, 1)
    if bit == 0 {
        BTreeMap::from([(0b10, q(1)), (0b01, q(1))])
    } else {
        let mut m = BTreeMap::from([(0b11, q(1))]);
        if *c != q(0) {
            m.insert(0b00, c.clone());
        }
        m
    }
}

#[test]
fn coev_expands_like_the_comultiplication() {
    let cob = ctx();
    let e = Web::empty();
    let re = Reduced::new(&cob, &e).unwrap();
    for dotted in [false, true] {
        let (st, p) = induced_map(&cob, &e, &ElementaryMove::Coev { dotted }).unwrap();
        let rt = Reduced::new(&cob, &st.web).unwrap();
        let h = re.push(&st.map, &rt);
        let basis = decode(&rt, &st.web, &p.new_edges);
        let want = dense_comult(dotted as u64, &q(0));
        assert_eq!(column(&h, &basis, 0), want, "dotted = {dotted}");
    }
    // dotted birth then death is the dotted sphere
    let (b, _) = induced_map(&cob, &e, &ElementaryMove::Birth { dotted: true }).unwrap();
    let l = *b.web.loops.iter().next().unwrap();
    let (dd, _) = induced_map(&cob, &b.web, &ElementaryMove::Death { edge: l }).unwrap();
    let rb = Reduced::new(&cob, &b.web).unwrap();
    let h = rb.push(&dd.map, &re).after(&re.push(&b.map, &rb));
    assert_eq!(h, HMap::identity(1));
}

#[test]
fn unit_is_the_low_generator() {
    let cob = ctx();
    let e = Web::empty();
    let (st, _) = induced_map(&cob, &e, &ElementaryMove::Birth { dotted: false }).unwrap();
    let (re, rt) = (Reduced::new(&cob, &e).unwrap(), Reduced::new(&cob, &st.web).unwrap());
    let h = re.push(&st.map, &rt);
    let hit: Vec<Grading> = (0..h.nrows()).filter(|&r| h.rows[r][0] != q(0)).map(|r| rt.gradings()[r]).collect();
    assert_eq!(hit, vec![Grading::hq(0, -1)]);
}

/// Pinching a small circle off an edge of `w`: the saddle equals
/// (birth ⊗ dot) + (dotted birth ⊗ 1) on homology.
fn handleslide_case(w: &Web, e: Pt) -> (HMap, HMap, Reduced, Web) {
    let cob = ctx();
    let mut w1 = w.clone();
    if w1.loops.contains(&e) {
        w1.split_edge(e).unwrap();
    }
    let (_, f) = w1.split_edge(e).unwrap();
    let r0 = Reduced::new(&cob, &w1).unwrap();
    let (sad, _) = induced_map(&cob, &w1, &ElementaryMove::Saddle { a: e, sa: Side::Left, b: f, sb: Side::Left }).unwrap();
    let rs = Reduced::new(&cob, &sad.web).unwrap();
    let s = r0.push(&sad.map, &rs);
    // the other side: birth after a dot, plus a dotted birth
    let (dot, _) = induced_map(&cob, &w1, &ElementaryMove::Dot { edge: e }).unwrap();
    let rd = Reduced::new(&cob, &dot.web).unwrap();
    let dh = r0.push(&dot.map, &rd);
    let (b0, _) = induced_map(&cob, &dot.web, &ElementaryMove::Birth { dotted: false }).unwrap();
    let (b1, _) = induced_map(&cob, &w1, &ElementaryMove::Birth { dotted: true }).unwrap();
    let rb = Reduced::new(&cob, &b1.web).unwrap();
    let rb0 = Reduced::new(&cob, &b0.web).unwrap();
    // b0.web and b1.web differ only by the dot mark; compare through an iso
    let (iso, _) = iso::web_iso(&cob, &b0.web, &b1.web, &[]).unwrap();
    let lhs_b = rb0.push(&iso, &rb).after(&rd.push(&b0.map, &rb0)).after(&dh);
    let sum = lhs_b.plus(&r0.push(&b1.map, &rb));
    // saddle target vs birth target
    let (iso2, _) = iso::web_iso(&cob, &sad.web, &b1.web, &[]).unwrap();
    let s_in_b = rs.push(&iso2, &rb).after(&s);
    (s_in_b, sum, rb, b1.web)
}

#[test]
fn handleslide_saddle_splits_on_the_unknot() {
    let w = Web::new(vec![], [0]).unwrap();
    let (s, sum, rb, wb) = handleslide_case(&w, 0);
    assert_eq!(s, sum);
    // and both match the dense comultiplication
    let l = wb.loops.iter().copied().find(|&x| x != 0).unwrap_or_else(|| *wb.loops.iter().next().unwrap());
    let order = [wb.circles(0).iter().find(|c| !c.contains(&l)).unwrap()[0], l];
    let basis = decode(&rb, &wb, &order);
    let r0 = Reduced::new(&ctx(), &w).unwrap();
    for col in 0..2 {
        let bit = decode(&r0, &w, &[0])[col];
        let want: BTreeMap<u64, Q> = dense_comult(bit, &q(0));
        assert_eq!(column(&s, &basis, col), want);
    }
}

#[test]
fn handleslide_saddle_splits_on_the_trefoil() {
    let w = Web::from_diagram(&right_trefoil());
    let e = w.nodes[w.crossings()[0]].edges()[0];
    let (s, sum, _, _) = handleslide_case(&w, e);
    assert_eq!(s, sum);
    assert!(!s.is_zero());
}

#[test]
fn movies_compose() {
    let cob = ctx();
    let w = Web::new(vec![], [0, 1]).unwrap();
    let (w0, id) = movie_compose(&cob, &w, &[]).unwrap();
    assert_eq!(w0, w);
    let c = w.full_cube(&cob).unwrap();
    assert_eq!(id.entries, ChainMap::identity(&c).entries);
    let r2 = ElementaryMove::R2 { a: 0, sa: Side::Left, b: 1, sb: Side::Left, a_over: true };
    let (w1, _) = movie_compose(&cob, &w, &[r2.clone()]).unwrap();
    let xs = w1.crossings();
    let (w2, f) = movie_compose(&cob, &w, &[r2, ElementaryMove::R2Inverse { nodes: [xs[0], xs[1]] }]).unwrap();
    let (ra, rb) = (Reduced::new(&cob, &w).unwrap(), Reduced::new(&cob, &w2).unwrap());
    assert_eq!(ra.push(&f, &rb).rank(), 4);
    let bad = ElementaryMove::R2Inverse { nodes: [0, 1] };
    assert!(matches!(movie_compose(&cob, &w, &[bad]), Err(MoveError::AtStep(0, _))));
}

mod belt_maps {
    use super::*;
    use crate::cobmaps::belts::*;

    #[test]
    fn split_sym_square_is_the_symmetric_square() {
        let p = sym_split(2);
        assert!(is_idempotent(&p));
        let grades: Vec<Grading> = (0..4).map(|b| Grading::hq(0, split_q2(2, b))).collect();
        let dims = hom::image_dims(&p, &grades);
        assert_eq!(dims, DimTable::from_hq(&[(0, -2, 1), (0, 0, 1), (0, 2, 1)]));
        assert_eq!(sym_split(1), HMap::identity(2));
        let p3 = sym_split(3);
        assert!(is_idempotent(&p3));
        assert_eq!(p3.rank(), 4);
        for k in 0..6 {
            assert_eq!(sym_split(k), sym_split_by_permutations(k), "k = {k}");
        }
    }

    #[test]
    fn dotted_annulus_hits_x_x_on_split_belts() {
        let m = dcoev_split(1, 0);
        // 1 ↦ x x 1 and x ↦ x x x
        assert_eq!(m.rows[0b011][0], q(1));
        assert_eq!(m.rows[0b111][1], q(1));
        assert_eq!(m.rank(), 2);
    }

    fn stage(cob: &CobRef, dirs: &[Dir], orient: &[bool]) -> (crate::diagram::LinkDiagram, BeltStage, Reduced) {
        let d = region_unlink(dirs);
        let st = BeltStage::new(&d, 0, orient).unwrap();
        let red = Reduced::new(cob, &st.web).unwrap();
        (d, st, red)
    }

    #[test]
    fn swap_of_opposite_belts_around_one_strand() {
        let cob = ctx();
        let (d, st, red) = stage(&cob, &[Dir::Up], &[true, false]);
        let t = swap_map(&cob, &st, &red, 0).unwrap();
        assert_eq!(t.rank(), red.dim());
        let t2 = t.after(&t);
        assert!(t2.ratio(&HMap::identity(red.dim())).is_some(), "T² is not scalar");
        let n = normalised_swap(&cob, &d, 0, &st, &red, 0).unwrap();
        assert_eq!(n.after(&n), HMap::identity(red.dim()));
        let p = sym_nonsplit(&cob, &d, 0, &st, &red).unwrap();
        assert!(is_idempotent(&p));
        assert_eq!((p.rank(), red.dim()), (6, 8));
    }

    #[test]
    fn nonsplit_sym_on_a_two_strand_belt_link() {
        let cob = ctx();
        let (d, st, red) = stage(&cob, &[Dir::Up, Dir::Down], &[true, false]);
        let n = normalised_swap(&cob, &d, 0, &st, &red, 0).unwrap();
        assert_eq!(n.after(&n), HMap::identity(red.dim()));
        let p = sym_nonsplit(&cob, &d, 0, &st, &red).unwrap();
        assert!(is_idempotent(&p));
        assert_eq!((p.rank(), red.dim()), (16, 20));
    }

    #[test]
    fn dotted_annulus_around_strands() {
        let cob = ctx();
        for dirs in [vec![Dir::Up], vec![Dir::Up, Dir::Down]] {
            let d = region_unlink(&dirs);
            let s0 = BeltStage::new(&d, 0, &[]).unwrap();
            let r0 = Reduced::new(&cob, &s0.web).unwrap();
            for inner in [true, false] {
                let s1 = BeltStage::new(&d, 0, &[inner, !inner]).unwrap();
                let r1 = Reduced::new(&cob, &s1.web).unwrap();
                let m = dcoev_map(&cob, &s0, &r0, 0, &s1, &r1).unwrap();
                assert_eq!(m.cols, r0.dim());
                // injective off the kernel of x ⊗ x on the belt pair
                assert_eq!(m.rank(), r0.dim() - 1);
            }
        }
    }
}

#[test]
fn genus_defect_detects_virtual_crossings() {
    let trefoil = Web::from_diagram(&braid_closure(2, &[1, 1, 1]).unwrap());
    assert_eq!(trefoil.genus_defect().unwrap(), 0);
    let kink = Web::new(vec![Node::x([0, 0, 1, 1], 1)], []).unwrap();
    assert_eq!(kink.genus_defect().unwrap(), 0);
    let virt = Web::new(vec![Node::x([0, 1, 0, 1], 1)], []).unwrap();
    assert_eq!(virt.genus_defect().unwrap(), 2);
}
