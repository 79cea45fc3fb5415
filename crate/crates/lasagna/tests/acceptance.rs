//! One line per acceptance criterion. Every numeric check is exact; the
//! only tolerances are the wall-clock budgets below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lasagna::cobcat::FrobeniusSpec;
use lasagna::cobmaps::belts::{is_idempotent, split_q2, sym_split};
use lasagna::cobmaps::hom::image_dims;
use lasagna::cobmaps::{induced_map, iso, ElementaryMove, Reduced, Side, Web};
use lasagna::complex::{new_context, DimTable, Grading, Window};
use lasagna::diagram::*;
use lasagna::khovanov::{bracket_euler, dense_dims, full_cube, kh_dims, khr2_dims};
use lasagna::lasagna::{s02_dims, HandlebodySpec};
use lasagna::lee::lee_total_dim;
use lasagna::rw::rw_plus;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn at(t: &DimTable, h: i64, q: i64) -> usize {
    t.get(Grading::hq(h, q))
}

fn all() -> Window {
    Window::all()
}

/// Kh^{h,q}(T(ℓ,ℓ)) = ℚ at h = ℓ²/2, q = 3ℓ²/2 − ℓ, nothing below in q
/// there, nothing above in h.
fn torus_corner(l: usize) -> Check {
    let (h0, q0) = ((l * l / 2) as i64, (3 * l * l / 2 - l) as i64);
    let t = kh_dims(&torus_nn(l)).map_err(|e| e.to_string())?;
    ensure(at(&t, h0, q0) == 1, format!("Kh^{{{h0},{q0}}} = {}", at(&t, h0, q0)))?;
    for (g, n) in t.iter() {
        ensure(!(g.h2 == 2 * h0 && g.q2 < 2 * q0) || n == 0, format!("Kh at {g:?} is {n}"))?;
        ensure(g.h2 <= 2 * h0 || n == 0, format!("Kh at {g:?} is {n}"))?;
    }
    let dense = dense_dims(&torus_nn(l)).map_err(|e| e.to_string())?;
    ensure(dense == t, "scanner and dense cube disagree")?;
    Ok(format!("Kh^{{{h0},{q0}}}(T({l},{l})) = Q, total rank {}, dense cube agrees", t.total()))
}

fn c1() -> Check {
    let t = khr2_dims(&unknot(), &all()).map_err(|e| e.to_string())?;
    ensure(t == DimTable::from_hq(&[(0, -1, 1), (0, 1, 1)]), format!("KhR2(unknot) = {t:?}"))?;
    let lee = lee_total_dim(&unknot()).map_err(|e| e.to_string())?;
    ensure(lee == 2, format!("Lee(unknot) = {lee}"))?;
    Ok("KhR2 = q^-1 + q, Lee rank 2".into())
}

fn c4() -> Check {
    let d = region_unlink(&[Dir::Up, Dir::Up]);
    let w = Window::hq((Some(-1), Some(0)), (Some(-4), Some(0)));
    let r = rw_plus(&d, &w, 3).map_err(|e| e.to_string())?;
    ensure(r.is_stabilized() && r.twists == vec![(0, 2)], format!("twists {:?}", r.twists))?;
    ensure(at(&r.dims, 0, -2) == 1, "no class at (0,-2)")?;
    for (g, n) in r.dims.iter() {
        ensure(n == 0 || (g.h2 >= 0 && g.q2 >= -4), format!("unexpected class at {g:?}"))?;
    }
    // the two models compared are the closures T(2,4) and T(2,6)
    for (k, n) in [(2usize, 4i32), (3, 6)] {
        let t = d.insert_framed_twists(0, k).map_err(|e| e.to_string())?;
        ensure(t.crossings().len() == n as usize, "twist count")?;
        let a = kh_dims(&t.forget_regions()).map_err(|e| e.to_string())?;
        let b = kh_dims(&torus_2(n)).map_err(|e| e.to_string())?;
        ensure(a == b, format!("{k} twists is not T(2,{n})"))?;
    }
    Ok(format!("1 at (0,-2), nothing below; stable at k=2 vs 3; window {}", r.window))
}

fn c5() -> Check {
    for d in [empty_with_regions(0), empty_with_regions(1)] {
        let r = rw_plus(&d, &all(), 3).map_err(|e| e.to_string())?;
        ensure(r.dims == DimTable::from_hq(&[(0, 0, 1)]), format!("empty gives {:?}", r.dims))?;
    }
    let r = rw_plus(&region_unlink(&[Dir::Up]), &all(), 3).map_err(|e| e.to_string())?;
    ensure(r.dims.is_empty() && !r.divisible, "1_1 is not zero")?;
    Ok("empty = Q at (0,0); 1_1 = 0".into())
}

fn c6() -> Check {
    let want = DimTable::from_hq(&[(0, 0, 1), (0, -2, 1), (0, -4, 1), (0, -6, 1)]);
    for alpha in [0, 1] {
        let spec = HandlebodySpec::new(empty_with_regions(1), vec![alpha]);
        let r = s02_dims(&spec, &Window::hq((None, None), (Some(-6), Some(0))), 3).map_err(|e| e.to_string())?;
        ensure(r.stabilized, format!("alpha {alpha}: unstable at {:?}", r.unstable))?;
        ensure(r.dims == want, format!("alpha {alpha}: {:?}", r.dims))?;
    }
    Ok("1 at q = 0,-2,-4,-6 for alpha = 0 and 1".into())
}

fn random_diagram(rng: &mut ChaCha8Rng) -> LinkDiagram {
    let n = rng.gen_range(2..=4usize);
    let len = rng.gen_range(0..=8usize);
    let word: Vec<i32> = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..n as i32);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    braid_closure(n, &word).unwrap()
}

fn c7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..25 {
        let d = random_diagram(&mut rng);
        let a = kh_dims(&d).map_err(|e| e.to_string())?;
        let b = dense_dims(&d).map_err(|e| e.to_string())?;
        ensure(a == b, format!("diagram {i}: scanner and cube differ\n{}", d.to_json()))?;
        let e = bracket_euler(&d).map_err(|e| e.to_string())?;
        ensure(a.euler() == e, format!("diagram {i}: Euler characteristic differs from the bracket"))?;
    }
    Ok("25 random closures, seed 0x5eed".into())
}

fn fixtures() -> Vec<(String, LinkDiagram)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "json") {
            let d = parse_diagram(&std::fs::read_to_string(&p).unwrap()).unwrap();
            out.push((p.file_stem().unwrap().to_string_lossy().into_owned(), d));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn c8() -> Check {
    let mut n = 0;
    for (name, d) in fixtures() {
        // regions carry no closed-diagram homology; their closed shadows do
        let d = d.forget_regions();
        let a = khr2_dims(&d.mirror(), &all()).map_err(|e| format!("{name}: {e}"))?;
        let b = khr2_dims(&d, &all()).map_err(|e| format!("{name}: {e}"))?;
        ensure(a == b.reflect(), format!("{name}: mirror is not the reflection"))?;
        n += 1;
    }
    Ok(format!("{n} fixtures"))
}

fn c9() -> Check {
    let mut report = Vec::new();
    // d² = 0 and reduction is idempotent
    let cob = new_context(FrobeniusSpec::khovanov());
    let lee = new_context(FrobeniusSpec::lee());
    for d in [right_trefoil(), figure_eight(), hopf(), torus_2(4), braid_closure(3, &[1, -2, 1, -2]).unwrap()] {
        for ctx in [&cob, &lee] {
            let c = full_cube(ctx, &d).map_err(|e| e.to_string())?;
            ensure(c.verify_d_squared(), "d^2 != 0 on a cube")?;
            let s = c.simplify();
            ensure(s.verify_d_squared(), "d^2 != 0 after reduction")?;
            let s2 = s.simplify();
            ensure(s2.len() == s.len(), "reduction is not idempotent")?;
            ensure(s2.homology_dims(&all()) == s.homology_dims(&all()), "reduction changed homology")?;
        }
    }
    report.push("d^2=0, reduce idempotent");
    // the symmetriser on two split belts
    let p = sym_split(2);
    ensure(is_idempotent(&p), "Sym is not idempotent")?;
    let grades: Vec<Grading> = (0..4).map(|b| Grading::hq(0, split_q2(2, b))).collect();
    ensure(image_dims(&p, &grades) == DimTable::from_hq(&[(0, -2, 1), (0, 0, 1), (0, 2, 1)]), "Sym image is not {1,1,1}")?;
    report.push("Sym image {1,1,1}");
    // Reidemeister pairs, by dimension and through the induced maps
    let pairs = [
        (braid_closure(2, &[1, -1]).unwrap(), unlink(2)),
        (braid_closure(3, &[1, 2, 1]).unwrap(), braid_closure(3, &[2, 1, 2]).unwrap()),
        (braid_closure(3, &[1, 2, -2, 1]).unwrap(), braid_closure(3, &[1, 1]).unwrap()),
        (braid_closure(3, &[-1, -2, -1, 2]).unwrap(), braid_closure(3, &[-2, -1, -2, 2]).unwrap()),
    ];
    for (i, (a, b)) in pairs.iter().enumerate() {
        let (x, y) = (khr2_dims(a, &all()).map_err(|e| e.to_string())?, khr2_dims(b, &all()).map_err(|e| e.to_string())?);
        ensure(x == y, format!("Reidemeister pair {i} differs"))?;
    }
    let ctx = new_context(FrobeniusSpec::khovanov());
    let two = Web::new(vec![], [0, 1]).map_err(|e| e.to_string())?;
    let (st, _) = induced_map(&ctx, &two, &ElementaryMove::R2 { a: 0, sa: Side::Left, b: 1, sb: Side::Left, a_over: true })
        .map_err(|e| e.to_string())?;
    let h = Reduced::new(&ctx, &two).map_err(|e| e.to_string())?.push(&st.map, &Reduced::new(&ctx, &st.web).map_err(|e| e.to_string())?);
    ensure(h.rank() == 4 && h.nrows() == 4, "R2 map is not an isomorphism")?;
    let tri = Web::from_diagram(&braid_closure(3, &[1, 2, 1]).unwrap());
    let xs = tri.crossings();
    let (st, _) = induced_map(&ctx, &tri, &ElementaryMove::R3 { nodes: [xs[0], xs[1], xs[2]] }).map_err(|e| e.to_string())?;
    let ra = Reduced::new(&ctx, &tri).map_err(|e| e.to_string())?;
    let h = ra.push(&st.map, &Reduced::new(&ctx, &st.web).map_err(|e| e.to_string())?);
    ensure(h.rank() == ra.dim() && h.nrows() == ra.dim(), "R3 map is not an isomorphism")?;
    report.push("R2/R3 invariance");
    for w in [Web::new(vec![], [0]).map_err(|e| e.to_string())?, Web::from_diagram(&right_trefoil())] {
        let e = if w.crossings().is_empty() { 0 } else { w.nodes[w.crossings()[0]].edges()[0] };
        handleslide(&w, e)?;
    }
    report.push("saddle = birth.dot + dotted birth");
    Ok(report.join(", "))
}

/// Pinching a small circle off an edge: the saddle agrees on homology with
/// (birth ⊗ dot) + (dotted birth ⊗ 1).
fn handleslide(w: &Web, e: u32) -> Result<(), String> {
    let s = |x: lasagna::cobmaps::MoveError| x.to_string();
    let cob = new_context(FrobeniusSpec::khovanov());
    let mut w1 = w.clone();
    if w1.loops.contains(&e) {
        w1.split_edge(e).map_err(s)?;
    }
    let (_, f) = w1.split_edge(e).map_err(s)?;
    let r0 = Reduced::new(&cob, &w1).map_err(s)?;
    let (sad, _) = induced_map(&cob, &w1, &ElementaryMove::Saddle { a: e, sa: Side::Left, b: f, sb: Side::Left }).map_err(s)?;
    let rs = Reduced::new(&cob, &sad.web).map_err(s)?;
    let saddle = r0.push(&sad.map, &rs);
    let (dot, _) = induced_map(&cob, &w1, &ElementaryMove::Dot { edge: e }).map_err(s)?;
    let rd = Reduced::new(&cob, &dot.web).map_err(s)?;
    let (b0, _) = induced_map(&cob, &dot.web, &ElementaryMove::Birth { dotted: false }).map_err(s)?;
    let (b1, _) = induced_map(&cob, &w1, &ElementaryMove::Birth { dotted: true }).map_err(s)?;
    let (rb, rb0) = (Reduced::new(&cob, &b1.web).map_err(s)?, Reduced::new(&cob, &b0.web).map_err(s)?);
    let (i0, _) = iso::web_iso(&cob, &b0.web, &b1.web, &[]).map_err(s)?;
    let first = rb0.push(&i0, &rb).after(&rd.push(&b0.map, &rb0)).after(&r0.push(&dot.map, &rd));
    let sum = first.plus(&r0.push(&b1.map, &rb));
    let (i1, _) = iso::web_iso(&cob, &sad.web, &b1.web, &[]).map_err(s)?;
    let lhs = rs.push(&i1, &rb).after(&saddle);
    ensure(!lhs.is_zero(), "saddle is zero on homology")?;
    // the saddle splits a circle, so it is injective on homology
    ensure(lhs.rank() == r0.dim(), "saddle is not injective")?;
    ensure(lhs == sum, "saddle differs from the decomposition")
}

fn main() {
    let criteria: Vec<(u32, &str, Duration, Box<dyn Fn() -> Check>)> = vec![
        (1, "convention anchor", Duration::from_secs(1), Box::new(c1)),
        (2, "torus corner l=2", Duration::from_secs(1), Box::new(|| torus_corner(2))),
        (3, "torus corner l=4", Duration::from_secs(300), Box::new(|| torus_corner(4))),
        (4, "RW belt", Duration::from_secs(120), Box::new(c4)),
        (5, "RW empty and odd", Duration::from_secs(60), Box::new(c5)),
        (6, "lasagna D2xS2", Duration::from_secs(600), Box::new(c6)),
        (7, "oracle equivalence", Duration::from_secs(300), Box::new(c7)),
        (8, "mirror duality", Duration::from_secs(300), Box::new(c8)),
        (9, "property suites", Duration::from_secs(300), Box::new(c9)),
    ];
    let mut failed = 0;
    for (n, name, budget, f) in criteria {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(|| f())).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let r = match r {
            Ok(_) if dt > budget => Err(format!("took {:.2}s, budget {}s", dt.as_secs_f64(), budget.as_secs())),
            r => r,
        };
        match r {
            Ok(detail) => println!("criterion {n} ({name}): PASS [{:.2}s] {detail}", dt.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL [{:.2}s] {why}", dt.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
