use proptest::prelude::*;

use super::*;

fn cup_cap(cob: &mut Cob) -> (ObjId, ObjId) {
    (cob.intern(&FlatTangle::empty()), cob.intern(&FlatTangle::new([], [7])))
}

#[test]
fn identity_is_neutral() {
    let mut cob = Cob::new(FrobeniusSpec::khovanov());
    let a = cob.intern(&FlatTangle::new([(0, 1), (2, 3)], []));
    let b = cob.intern(&FlatTangle::new([(0, 3), (1, 2)], []));
    let saddle = Mor::single(0, q(1));
    assert_eq!(cob.degree(a, b, 0), 1);
    let ia = cob.identity(a);
    let ib = cob.identity(b);
    assert_eq!(cob.compose(a, a, b, &ia, &saddle), saddle);
    assert_eq!(cob.compose(a, b, b, &saddle, &ib), saddle);
}

#[test]
fn sphere_relations() {
    let mut cob = Cob::new(FrobeniusSpec::khovanov());
    let (e, o) = cup_cap(&mut cob);
    let cup = Mor::single(0, q(1));
    let cap = Mor::single(0, q(1));
    let dotted_cap = Mor::single(1, q(1));
    assert!(cob.compose(e, o, e, &cup, &cap).is_zero());
    assert_eq!(cob.compose(e, o, e, &cup, &dotted_cap), Mor::single(0, q(1)));
    assert!(cob.compose(e, o, e, &Mor::single(1, q(1)), &dotted_cap).is_zero());
}

#[test]
fn closed_values() {
    for c in [0, 1, 3] {
        let mut cob = Cob::new(FrobeniusSpec::new(q(c)));
        assert_eq!(cob.eval_closed(0, 0), q(0));
        assert_eq!(cob.eval_closed(0, 1), q(1));
        assert_eq!(cob.eval_closed(0, 2), q(0));
        assert_eq!(cob.eval_closed(0, 3), q(c));
        assert_eq!(cob.eval_closed(1, 0), q(2));
        assert_eq!(cob.eval_closed(2, 0), q(0));
        assert_eq!(cob.eval_closed(2, 1), q(4 * c));
    }
}

#[test]
fn twice_dotted_sheet() {
    let arc = FlatTangle::new([(0, 1)], []);
    let two_dots = Cobordism { components: vec![Component { circles: vec![CircleKey::Arc(0)], genus: 0, dots: 2 }] };
    let mut k = Cob::new(FrobeniusSpec::khovanov());
    let a = k.intern(&arc);
    assert!(k.reduce_cobordism(a, a, &two_dots).unwrap().is_zero());
    let mut l = Cob::new(FrobeniusSpec::lee());
    let a = l.intern(&arc);
    assert_eq!(l.reduce_cobordism(a, a, &two_dots).unwrap(), Mor::single(0, q(1)));
}

#[test]
fn cylinder_is_neck_cut() {
    let mut cob = Cob::new(FrobeniusSpec::khovanov());
    let (_, o) = cup_cap(&mut cob);
    // circles of O ∪ Ō: Src(7) = bit 0, Tgt(7) = bit 1
    assert_eq!(cob.identity(o), Mor::from_terms(vec![(1, q(1)), (2, q(1))]));
}

fn check_deloop(cob: &mut Cob, t: FlatTangle, l: Pt) {
    let a = cob.intern(&t);
    let dl = cob.deloop(a, l).unwrap();
    let r = dl.reduced;
    let id_r = cob.identity(r);
    let id_a = cob.identity(a);
    assert_eq!(cob.compose(r, a, r, &dl.in_x, &dl.out_x), id_r);
    assert_eq!(cob.compose(r, a, r, &dl.in_1, &dl.out_1), id_r);
    assert!(cob.compose(r, a, r, &dl.in_x, &dl.out_1).is_zero());
    assert!(cob.compose(r, a, r, &dl.in_1, &dl.out_x).is_zero());
    let mut sum = cob.compose(a, r, a, &dl.out_x, &dl.in_x);
    sum.add_scaled(&q(1), &cob.compose(a, r, a, &dl.out_1, &dl.in_1));
    assert_eq!(sum, id_a);
    assert_eq!(cob.homogeneous_degree(a, r, &dl.out_x), Some(-1));
    assert_eq!(cob.homogeneous_degree(a, r, &dl.out_1), Some(1));
}

#[test]
fn deloop_identities() {
    for spec in [FrobeniusSpec::khovanov(), FrobeniusSpec::lee()] {
        let mut cob = Cob::new(spec);
        check_deloop(&mut cob, FlatTangle::new([], [5]), 5);
        check_deloop(&mut cob, FlatTangle::new([(0, 1), (2, 3)], [9, 4]), 9);
        assert_eq!(cob.deloop(0, 99).unwrap_err(), CobError::NoLoop(99));
    }
}

#[test]
fn deloop_relabelling_matches_composition() {
    let mut cob = Cob::new(FrobeniusSpec::khovanov());
    let s = cob.intern(&FlatTangle::new([(0, 1), (2, 3)], []));
    let a = cob.intern(&FlatTangle::new([(0, 3), (1, 2)], [8]));
    let f = Mor::from_terms(vec![(0b00, q(2)), (0b10, q(-3)), (0b11, q(5))]);
    let dl = cob.deloop(a, 8).unwrap();
    let (to_x, to_1) = cob.deloop_target(s, a, 8, &f);
    assert_eq!(to_x, cob.compose(s, a, dl.reduced, &f, &dl.out_x));
    assert_eq!(to_1, cob.compose(s, a, dl.reduced, &f, &dl.out_1));
    let (from_x, from_1) = cob.deloop_source(a, s, 8, &f);
    let g = f.clone();
    assert_eq!(from_x, cob.compose(dl.reduced, a, s, &dl.in_x, &g));
    assert_eq!(from_1, cob.compose(dl.reduced, a, s, &dl.in_1, &g));
}

#[test]
fn gluing_closes_loops() {
    let mut cob = Cob::new(FrobeniusSpec::khovanov());
    let x = FlatTangle::new([(0, 1)], []);
    assert_eq!(x.glue(&x), FlatTangle::new([], [0]));
    let y = FlatTangle::new([(1, 2)], []);
    assert_eq!(x.glue(&y), FlatTangle::new([(0, 2)], []));
    let (a, b) = (cob.intern(&x), cob.intern(&y));
    let (ia, ib) = (cob.identity(a), cob.identity(b));
    let (g, g2, m) = cob.glue(a, a, b, b, &ia, &ib);
    assert_eq!(g, g2);
    assert_eq!(m, cob.identity(g));
    let (l, _, m) = cob.glue(a, a, a, a, &ia, &ia);
    assert_eq!(m, cob.identity(l));
}

#[test]
fn gluing_saddles() {
    // two caps glued into a sphere minus disks: saddle ⊔ cup
    let mut cob = Cob::new(FrobeniusSpec::khovanov());
    let a = cob.intern(&FlatTangle::new([(0, 1), (2, 3)], []));
    let b = cob.intern(&FlatTangle::new([(0, 3), (1, 2)], []));
    let saddle = Mor::single(0, q(1));
    // close off with arcs (1,2) and (3,0)... as a second tangle on the same points
    let c1 = cob.intern(&FlatTangle::new([(0, 1), (2, 3)], []));
    let id = cob.identity(c1);
    let (ga, gb, m) = cob.glue(a, b, c1, c1, &saddle, &id);
    assert_eq!(cob.obj(ga), &FlatTangle::new([], [0, 2]));
    assert_eq!(cob.obj(gb), &FlatTangle::new([], [0]));
    // merge of two circles: surface with 3 boundary circles, neck-cut into disks
    assert_eq!(m.terms().len(), 3);
    assert_eq!(cob.homogeneous_degree(ga, gb, &m), Some(1));
}

fn matching(points: &[Pt], choice: &[usize]) -> Vec<(Pt, Pt)> {
    if points.is_empty() {
        return vec![];
    }
    let k = choice.first().copied().unwrap_or(0) % (points.len() / 2);
    let j = 2 * k + 1;
    let rest = if choice.is_empty() { &[][..] } else { &choice[1..] };
    let mut v = vec![(points[0], points[j])];
    v.extend(matching(&points[1..j], rest));
    v.extend(matching(&points[j + 1..], &rest[rest.len().min(1)..]));
    v
}

fn arb_tangle(n: usize) -> impl Strategy<Value = FlatTangle> {
    (prop::collection::vec(0usize..6, 4), prop::collection::vec(100u32..104, 0..2)).prop_map(move |(ch, loops)| {
        let pts: Vec<Pt> = (0..2 * n as Pt).collect();
        let mut l = loops;
        l.dedup();
        FlatTangle::new(matching(&pts, &ch), l)
    })
}

fn arb_mor(max_bits: u32) -> impl Strategy<Value = Vec<(u64, i64)>> {
    prop::collection::vec((0u64..(1 << max_bits), -3i64..4), 0..4)
}

fn to_mor(cob: &mut Cob, a: ObjId, b: ObjId, v: &[(u64, i64)]) -> Mor {
    let n = cob.pair(a, b).len();
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    Mor::from_terms(v.iter().map(|&(m, x)| (m & mask, q(x))).collect())
}

proptest! {
    #[test]
    fn compose_is_associative(
        v in (0usize..4).prop_flat_map(|m| prop::collection::vec(arb_tangle(m), 4)),
        f in arb_mor(6), g in arb_mor(6), h in arb_mor(6), c in 0i64..2,
    ) {
        let mut cob = Cob::new(FrobeniusSpec::new(q(c)));
        let ids: Vec<ObjId> = v.iter().map(|t| cob.intern(t)).collect();
        let (a, b, cc, d) = (ids[0], ids[1], ids[2], ids[3]);
        let f = to_mor(&mut cob, a, b, &f);
        let g = to_mor(&mut cob, b, cc, &g);
        let h = to_mor(&mut cob, cc, d, &h);
        let gf = cob.compose(a, b, cc, &f, &g);
        let hg = cob.compose(b, cc, d, &g, &h);
        let left = cob.compose(a, cc, d, &gf, &h);
        let right = cob.compose(a, b, d, &f, &hg);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn reduce_is_idempotent(
        v in (0usize..4).prop_flat_map(|m| prop::collection::vec(arb_tangle(m), 2)),
        cuts in prop::collection::vec((0u32..3, 0u32..4), 1..6), c in 0i64..2,
    ) {
        let mut cob = Cob::new(FrobeniusSpec::new(q(c)));
        let a = cob.intern(&v[0]);
        let b = cob.intern(&v[1]);
        let keys = cob.pair(a, b).keys.clone();
        // distribute the circles round-robin over the generated pieces
        let mut comps: Vec<Component> = cuts.iter().map(|&(g, d)| Component { circles: vec![], genus: g, dots: d }).collect();
        let k = comps.len();
        for (i, key) in keys.iter().enumerate() {
            comps[i % k].circles.push(*key);
        }
        let once = cob.reduce_cobordism(a, b, &Cobordism { components: comps }).unwrap();
        let twice = cob.reduce(a, b, &once);
        prop_assert_eq!(once, twice);
    }
}
