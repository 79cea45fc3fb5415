//! Classical cube over A = ℚ[x]/(x² − c) with explicit basis vectors: the
//! reference the cobordism pipeline is tested against. Differential 0 → 1,
//! h = |s| − n₋, q = #1 − #x + |s| + n₊ − 2n₋.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{state_circles, KhError};
use crate::cobcat::{FrobeniusSpec, Pt};
use crate::complex::{DimTable, Grading};
use crate::diagram::LinkDiagram;
use crate::linalg::{rank, SVec};
use crate::rational::{q, Q};

pub const DENSE_LIMIT: usize = 14;

struct Dense {
    /// per generator: (block key, doubled h, doubled q)
    keys: Vec<(i64, i64)>,
    /// images of each generator
    rows: Vec<SVec>,
}

fn build(d: &LinkDiagram, c: &Q) -> Result<Dense, KhError> {
    super::check_closed(d)?;
    let n = d.crossings().len();
    if n > DENSE_LIMIT {
        return Err(KhError::TooLarge(n));
    }
    let (np, nm) = (d.n_plus() as i64, d.n_minus() as i64);
    let states: Vec<Vec<Vec<Pt>>> = (0..1u64 << n).map(|s| state_circles(d, s)).collect();
    let mut offset = Vec::with_capacity(states.len() + 1);
    let mut total = 0usize;
    for st in &states {
        offset.push(total);
        total += 1 << st.len();
    }
    let mut keys = Vec::with_capacity(total);
    for (s, st) in states.iter().enumerate() {
        let ones = (s as u64).count_ones() as i64;
        for lab in 0..1u64 << st.len() {
            let xs = lab.count_ones() as i64;
            let qd = (st.len() as i64 - xs) - xs + ones + np - 2 * nm;
            keys.push((ones - nm, qd));
        }
    }
    let mut rows = vec![SVec::new(); total];
    for s in 0..states.len() {
        let src = &states[s];
        for i in 0..n {
            if s >> i & 1 == 1 {
                continue;
            }
            let t = s | 1 << i;
            let tgt = &states[t];
            let sign = if (s & ((1 << i) - 1)).count_ones() % 2 == 0 { q(1) } else { q(-1) };
            let e = d.crossings()[i].e;
            let hits = |c: &Vec<Pt>| c.iter().any(|x| e.contains(x));
            let a: Vec<usize> = (0..src.len()).filter(|&k| hits(&src[k])).collect();
            let b: Vec<usize> = (0..tgt.len()).filter(|&k| hits(&tgt[k])).collect();
            // untouched circles keep their edge sets
            let pos_t: HashMap<Pt, usize> = tgt.iter().enumerate().map(|(k, c)| (c[0], k)).collect();
            let carry: Vec<(usize, usize)> =
                (0..src.len()).filter(|k| !a.contains(k)).map(|k| (k, pos_t[&src[k][0]])).collect();
            for lab in 0..1u64 << src.len() {
                let mut base = 0u64;
                for &(k, j) in &carry {
                    base |= (lab >> k & 1) << j;
                }
                let bit = |k: usize| lab >> k & 1;
                let mut out: Vec<(u64, Q)> = Vec::new();
                match (a.len(), b.len()) {
                    (2, 1) => match bit(a[0]) + bit(a[1]) {
                        0 => out.push((0, q(1))),
                        1 => out.push((1 << b[0], q(1))),
                        _ => out.push((0, c.clone())),
                    },
                    (1, 2) => {
                        let (u, v) = (1u64 << b[0], 1u64 << b[1]);
                        if bit(a[0]) == 0 {
                            out.push((u, q(1)));
                            out.push((v, q(1)));
                        } else {
                            out.push((u | v, q(1)));
                            out.push((0, c.clone()));
                        }
                    }
                    shape => unreachable!("a planar saddle changes the circle count by one, got {shape:?}"),
                }
                let row = &mut rows[offset[s] + lab as usize];
                for (m, x) in out {
                    if x.is_zero() {
                        continue;
                    }
                    let col = offset[t] + (base | m) as usize;
                    row.axpy(&(&sign * x), &SVec(vec![(col, q(1))]));
                }
            }
        }
    }
    Ok(Dense { keys, rows })
}

/// Ranks grouped by block; `key` maps (h, q) to the block.
fn homology(dn: &Dense, key: impl Fn(i64, i64) -> (i64, i64)) -> BTreeMap<(i64, i64), usize> {
    let mut blocks: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (g, &(h, qd)) in dn.keys.iter().enumerate() {
        blocks.entry(key(h, qd)).or_default().push(g);
    }
    let mut rk: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for (k, gens) in &blocks {
        rk.insert(*k, rank(gens.iter().map(|&g| dn.rows[g].clone())));
    }
    let mut out = BTreeMap::new();
    for (k, gens) in &blocks {
        let incoming = rk.get(&(k.0 - 1, k.1)).copied().unwrap_or(0);
        let dim = gens.len() - rk[k] - incoming;
        if dim > 0 {
            out.insert(*k, dim);
        }
    }
    out
}

/// Classical Kh^{h,q} over ℚ (c = 0), doubled keys.
pub fn dense_dims(d: &LinkDiagram) -> Result<DimTable, KhError> {
    let dn = build(d, &FrobeniusSpec::khovanov().c)?;
    let mut t = DimTable::new();
    for ((h, qd), n) in homology(&dn, |h, qd| (h, qd)) {
        t.insert(Grading::hq(h, qd), n);
    }
    Ok(t)
}

/// Classical homology per h (undoubled) for any c.
pub fn dense_dims_by_h(d: &LinkDiagram, spec: &FrobeniusSpec) -> Result<BTreeMap<i64, usize>, KhError> {
    let dn = build(d, &spec.c)?;
    Ok(homology(&dn, |h, _| (h, 0)).into_iter().map(|((h, _), n)| (h, n)).collect())
}
