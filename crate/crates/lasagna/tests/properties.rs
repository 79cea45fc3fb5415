use proptest::prelude::*;

use lasagna::cobmaps::belts::{is_idempotent, sym_split};
use lasagna::complex::{DimTable, Window};
use lasagna::diagram::*;
use lasagna::khovanov::{kh_dims, kh_to_khr2, khr2_dims, khr2_to_kh, lee_dims_by_h};
use lasagna::rw::rw_plus;

fn arb_word() -> impl Strategy<Value = (usize, Vec<i32>)> {
    (2usize..5).prop_flat_map(|n| {
        let gen = (1..n as i32, any::<bool>()).prop_map(|(i, p)| if p { i } else { -i });
        (Just(n), prop::collection::vec(gen, 0..7))
    })
}

fn arb_closure() -> impl Strategy<Value = LinkDiagram> {
    arb_word().prop_map(|(n, w)| braid_closure(n, &w).unwrap())
}

fn arb_window() -> impl Strategy<Value = Window> {
    let end = prop::option::of(-8i64..8);
    (end.clone(), end.clone(), end.clone(), end).prop_map(|(a, b, c, d)| Window::hq((a, b), (c, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn mirror_reflects_gradings(d in arb_closure()) {
        let all = Window::all();
        prop_assert_eq!(khr2_dims(&d.mirror(), &all).unwrap(), khr2_dims(&d, &all).unwrap().reflect());
    }

    #[test]
    fn windows_only_restrict(d in arb_closure(), w in arb_window()) {
        let full = khr2_dims(&d, &Window::all()).unwrap();
        prop_assert_eq!(khr2_dims(&d, &w).unwrap(), full.restrict(&w));
    }

    #[test]
    fn khr2_and_kh_are_regradings(d in arb_closure()) {
        let kh = kh_dims(&d).unwrap();
        let khr = khr2_dims(&d, &Window::all()).unwrap();
        prop_assert_eq!(&kh_to_khr2(&kh, d.writhe()), &khr);
        prop_assert_eq!(khr2_to_kh(&khr, d.writhe()), kh);
    }

    #[test]
    fn lee_rank_counts_components(d in arb_closure()) {
        let total: usize = lee_dims_by_h(&d).unwrap().values().sum();
        prop_assert_eq!(total, 1usize << d.component_count());
    }

    #[test]
    fn quantum_parity_matches_components(d in arb_closure()) {
        // q ≡ #components mod 2
        let t = kh_dims(&d).unwrap();
        let c = d.component_count() as i64;
        for (g, _) in t.iter() {
            prop_assert_eq!((g.q2 / 2 - c).rem_euclid(2), 0);
        }
    }

    #[test]
    fn split_unknot_tensors((n, word) in arb_word()) {
        // one more strand that no generator touches is a split unknot
        let u = khr2_dims(&unknot(), &Window::all()).unwrap();
        let base = khr2_dims(&braid_closure(n, &word).unwrap(), &Window::all()).unwrap();
        let wider = khr2_dims(&braid_closure(n + 1, &word).unwrap(), &Window::all()).unwrap();
        prop_assert_eq!(wider, base.tensor(&u));
        prop_assert_eq!(base.tensor(&DimTable::unit()), base);
    }

    #[test]
    fn split_sym_is_idempotent(k in 0usize..7) {
        let p = sym_split(k);
        prop_assert!(is_idempotent(&p));
        prop_assert_eq!(p.rank(), k + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn rw_without_regions_is_renormalised_khr2(d in arb_closure()) {
        let r = rw_plus(&d, &Window::all(), 3).unwrap();
        let want = khr2_dims(&d, &Window::all()).unwrap().shift(d.writhe(), -d.writhe());
        prop_assert_eq!(r.dims, want);
    }
}
