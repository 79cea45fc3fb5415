use proptest::prelude::*;

use super::*;
use crate::cobcat::FlatTangle;
use crate::rational::q;

fn closed(spec: FrobeniusSpec) -> (CobRef, ObjId) {
    let cob = new_context(spec);
    let e = cob.borrow_mut().intern(&FlatTangle::empty());
    (cob, e)
}

fn unknot(cob: &CobRef) -> BigradedComplex {
    let o = cob.borrow_mut().intern(&FlatTangle::new([], [0]));
    BigradedComplex::single(cob, o, Grading::default())
}

#[test]
fn acyclic_pair_vanishes() {
    let (cob, e) = closed(FrobeniusSpec::khovanov());
    let mut c = BigradedComplex::new(&cob, vec![]);
    let a = c.add_gen(Grading::hq(0, 0), e, vec![]);
    let b = c.add_gen(Grading::hq(1, 0), e, vec![]);
    c.add_d(a, b, &Mor::single(0, q(3)));
    assert!(c.verify_d_squared());
    assert!(c.gaussian_eliminate(a, b).unwrap().is_empty());
    assert_eq!(c.gaussian_eliminate(b, a).unwrap_err(), ComplexError::NotInvertible(b, a));
}

#[test]
fn d_squared_negative_control() {
    let (cob, e) = closed(FrobeniusSpec::khovanov());
    let mut c = BigradedComplex::new(&cob, vec![]);
    let g: Vec<usize> = (0..3).map(|h| c.add_gen(Grading::hq(h, 0), e, vec![])).collect();
    assert!(c.verify_d_squared());
    c.add_d(g[0], g[1], &Mor::single(0, q(1)));
    c.add_d(g[1], g[2], &Mor::single(0, q(1)));
    assert!(!c.verify_d_squared());
}

#[test]
fn unknot_and_split_union() {
    let cob = new_context(FrobeniusSpec::khovanov());
    assert!(BigradedComplex::new(&cob, vec![]).homology_dims(&Window::all()).unwrap().is_empty());
    let u = unknot(&cob);
    assert_eq!(u.homology_dims(&Window::all()), Err(ComplexError::NotClosed));
    let s = u.simplify();
    assert_eq!(s.homology_dims(&Window::all()).unwrap(), DimTable::from_hq(&[(0, -1, 1), (0, 1, 1)]));
    let o2 = cob.borrow_mut().intern(&FlatTangle::new([], [1]));
    let u2 = BigradedComplex::single(&cob, o2, Grading::default());
    let two = u.planar_tensor(&u2).unwrap().simplify();
    assert_eq!(two.homology_dims(&Window::all()).unwrap(), DimTable::from_hq(&[(0, -2, 1), (0, 0, 2), (0, 2, 1)]));
    let e = cob.borrow_mut().intern(&FlatTangle::empty());
    let unit = BigradedComplex::single(&cob, e, Grading::default());
    let same = u.planar_tensor(&unit).unwrap().simplify();
    assert_eq!(same.homology_dims(&Window::all()).unwrap(), s.homology_dims(&Window::all()).unwrap());
}

#[test]
fn lee_is_ungraded() {
    let cob = new_context(FrobeniusSpec::lee());
    let s = unknot(&cob).simplify();
    assert_eq!(s.homology_dims(&Window::all()), Err(ComplexError::Ungraded));
    assert_eq!(s.dims_by_h().unwrap(), BTreeMap::from([(0, 2)]));
}

#[test]
fn slack_is_enforced() {
    let (cob, e) = closed(FrobeniusSpec::khovanov());
    let mut c = BigradedComplex::new(&cob, vec![]);
    for h in 0..4 {
        c.add_gen(Grading::hq(h, 0), e, vec![]);
    }
    let t = c.truncated(Some(0), Some(6));
    assert!(matches!(t.homology_dims(&Window::hq((Some(0), Some(2)), (None, None))), Err(ComplexError::InsufficientSlack { .. })));
    assert!(matches!(t.homology_dims(&Window::all()), Err(ComplexError::InsufficientSlack { .. })));
    let mid = Window::hq((Some(1), Some(2)), (None, None));
    assert_eq!(t.homology_dims(&mid).unwrap(), DimTable::from_hq(&[(1, 0, 1), (2, 0, 1)]));
}

#[test]
fn window_parsing() {
    let w = Window::parse("-1:0,-4:0").unwrap();
    assert_eq!(w, Window { h_lo: Some(-2), h_hi: Some(0), q_lo: Some(-8), q_hi: Some(0) });
    assert_eq!(Window::parse(":,1/2:").unwrap(), Window { q_lo: Some(1), ..Window::all() });
    assert!(Window::parse("1:0,0:0").is_err());
    assert!(Window::parse("0:1").is_err());
    assert_eq!(w.to_string(), "-1:0,-4:0");
}

#[test]
fn dimtable_printing() {
    let t = DimTable::from_hq(&[(0, -1, 1), (0, 1, 1)]);
    assert_eq!(t.to_tsv(), "0\t-1\t1\n0\t1\t1\n");
    let mut h = DimTable::new();
    h.insert(Grading::new(1, -1), 1);
    assert_eq!(h.to_tsv(), "1/2\t-1/2\t1\n");
    assert_eq!(DimTable::from_json_value(&h.to_json_value()), Some(h));
}

/// A closed scalar complex: normal form (pairs + survivors) followed by basis changes.
#[derive(Clone, Debug)]
struct Spec {
    pairs: Vec<(i64, i64)>,
    singles: Vec<(i64, i64)>,
    ops: Vec<(usize, usize, i64)>,
}

fn arb_spec() -> impl Strategy<Value = Spec> {
    (
        prop::collection::vec((0i64..3, 0i64..2), 0..5),
        prop::collection::vec((0i64..4, 0i64..2), 0..4),
        prop::collection::vec((0usize..16, 0usize..16, -2i64..3), 0..12),
    )
        .prop_map(|(pairs, singles, ops)| Spec { pairs, singles, ops })
}

fn build(spec: &Spec, cob: &CobRef, e: ObjId) -> (BigradedComplex, DimTable) {
    let mut gens: Vec<Grading> = vec![];
    let mut dense: BTreeMap<(usize, usize), Q> = BTreeMap::new();
    let mut expect = DimTable::new();
    for &(h, qq) in &spec.pairs {
        let a = gens.len();
        gens.push(Grading::hq(h, qq));
        gens.push(Grading::hq(h + 1, qq));
        dense.insert((a, a + 1), q(1));
    }
    for &(h, qq) in &spec.singles {
        gens.push(Grading::hq(h, qq));
        expect.add(Grading::hq(h, qq), 1);
    }
    let n = gens.len();
    // basis change e_i ↦ e_i + λ e_j within one bigrading: D ↦ P⁻¹ D P
    for &(i, j, l) in &spec.ops {
        if n == 0 {
            break;
        }
        let (i, j) = (i % n, j % n);
        if i == j || gens[i] != gens[j] || l == 0 {
            continue;
        }
        let lam = q(l);
        // new source column i = col i + λ col j
        let col_j: Vec<(usize, Q)> = dense.iter().filter(|((s, _), _)| *s == j).map(|((_, t), x)| (*t, x.clone())).collect();
        for (t, x) in col_j {
            *dense.entry((i, t)).or_insert_with(Q::zero) += &lam * x;
        }
        // new target row j = row j − λ row i
        let row_i: Vec<(usize, Q)> = dense.iter().filter(|((_, t), _)| *t == i).map(|((s, _), x)| (*s, x.clone())).collect();
        for (s, x) in row_i {
            *dense.entry((s, j)).or_insert_with(Q::zero) -= &lam * x;
        }
        dense.retain(|_, x| !x.is_zero());
    }
    let mut c = BigradedComplex::new(cob, vec![]);
    for g in &gens {
        c.add_gen(*g, e, vec![]);
    }
    for ((s, t), x) in dense {
        c.add_d(s, t, &Mor::single(0, x));
    }
    (c, expect)
}

proptest! {
    #[test]
    fn elimination_preserves_homology(spec in arb_spec()) {
        let (cob, e) = closed(FrobeniusSpec::khovanov());
        let (c, expect) = build(&spec, &cob, e);
        prop_assert!(c.verify_d_squared());
        prop_assert!(c.check_gradings());
        prop_assert_eq!(c.homology_dims(&Window::all()).unwrap(), expect.clone());
        for policy in [PivotPolicy::Greedy, PivotPolicy::Lexicographic] {
            let s = c.simplify_with(policy);
            prop_assert_eq!(s.entry_count(), 0);
            prop_assert_eq!(s.homology_dims(&Window::all()).unwrap(), expect.clone());
            prop_assert_eq!(s.euler(), c.euler());
        }
        // any single elimination keeps the answer
        let first = c.entries().next().map(|(s, t, _)| (s, t));
        if let Some((s, t)) = first {
            let r = c.gaussian_eliminate(s, t).unwrap();
            prop_assert!(r.verify_d_squared());
            prop_assert_eq!(r.homology_dims(&Window::all()).unwrap(), expect);
        }
    }

    #[test]
    fn tracked_maps_are_chain_maps(spec in arb_spec()) {
        let (cob, e) = closed(FrobeniusSpec::khovanov());
        let (c, _) = build(&spec, &cob, e);
        let s = c.simplify_tracked();
        prop_assert!(s.pi.is_chain_map(&c, &s.complex));
        prop_assert!(s.iota.is_chain_map(&s.complex, &c));
        let round = s.iota.then(&s.pi, &s.complex, &c, &s.complex);
        let id = ChainMap::identity(&s.complex);
        prop_assert_eq!(round.entries, id.entries);
    }
}

#[test]
fn disjoint_pivots_commute() {
    let (cob, e) = closed(FrobeniusSpec::khovanov());
    let spec = Spec { pairs: vec![(0, 0), (0, 0), (1, 1)], singles: vec![(0, 0), (2, 1)], ops: vec![(0, 2, 1), (1, 3, -2), (4, 0, 1)] };
    let (c, expect) = build(&spec, &cob, e);
    let ents: Vec<(usize, usize)> = c.entries().map(|(s, t, _)| (s, t)).collect();
    for &(s1, t1) in &ents {
        for &(s2, t2) in &ents {
            if [s1, t1].iter().any(|x| [s2, t2].contains(x)) {
                continue;
            }
            let Ok(a) = c.gaussian_eliminate(s1, t1) else { continue };
            // indices shift after removal of s1, t1
            let fix = |x: usize| x - [s1, t1].iter().filter(|&&y| y < x).count();
            if let Ok(b) = a.gaussian_eliminate(fix(s2), fix(t2)) {
                assert_eq!(b.homology_dims(&Window::all()).unwrap(), expect);
            }
        }
    }
}

#[test]
fn tracked_deloop_maps() {
    let cob = new_context(FrobeniusSpec::khovanov());
    let u = unknot(&cob);
    let s = u.simplify_tracked();
    assert_eq!(s.complex.len(), 2);
    assert!(s.pi.is_chain_map(&u, &s.complex));
    assert!(s.iota.is_chain_map(&s.complex, &u));
    let back = s.pi.then(&s.iota, &u, &s.complex, &u);
    assert_eq!(back.entries, ChainMap::identity(&u).entries);
}
