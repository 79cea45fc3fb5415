//! Sparse exact linear algebra over ℚ.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::Q;

/// Sparse vector: strictly increasing indices, no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SVec(pub Vec<(usize, Q)>);

impl SVec {
    pub fn new() -> Self {
        SVec(Vec::new())
    }

    pub fn from_map(m: BTreeMap<usize, Q>) -> Self {
        SVec(m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }

    pub fn from_pairs(mut v: Vec<(usize, Q)>) -> Self {
        v.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Q)> = Vec::with_capacity(v.len());
        for (i, x) in v {
            match out.last_mut() {
                Some((j, y)) if *j == i => *y += x,
                _ => out.push((i, x)),
            }
        }
        out.retain(|(_, x)| !x.is_zero());
        SVec(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lead(&self) -> Option<&(usize, Q)> {
        self.0.first()
    }

    pub fn get(&self, i: usize) -> Option<&Q> {
        self.0.binary_search_by_key(&i, |(j, _)| *j).ok().map(|k| &self.0[k].1)
    }

    /// self += a * other
    pub fn axpy(&mut self, a: &Q, other: &SVec) {
        if a.is_zero() || other.0.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        let (x, y) = (&self.0, &other.0);
        while i < x.len() || j < y.len() {
            if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
                out.push(x[i].clone());
                i += 1;
            } else if i == x.len() || y[j].0 < x[i].0 {
                out.push((y[j].0, a * &y[j].1));
                j += 1;
            } else {
                let v = &x[i].1 + a * &y[j].1;
                if !v.is_zero() {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.0 = out;
    }

    pub fn scale(&mut self, a: &Q) {
        if a.is_zero() {
            self.0.clear();
        } else {
            for (_, x) in self.0.iter_mut() {
                *x *= a;
            }
        }
    }
}

/// Incrementally built row-echelon basis; pivots keyed by leading column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &usize> {
        self.rows.keys()
    }

    /// Reduces `v` until its leading column carries no pivot.
    pub fn reduce_lead(&self, mut v: SVec) -> SVec {
        while let Some((c, x)) = v.lead().cloned() {
            match self.rows.get(&c) {
                Some(r) => {
                    let a = -(x / &r.0[0].1);
                    v.axpy(&a, r);
                }
                None => break,
            }
        }
        v
    }

    /// Reduces every pivot column of `v` to zero; canonical representative mod the span.
    pub fn reduce_full(&self, mut v: SVec) -> SVec {
        let mut k = 0;
        while k < v.0.len() {
            let (c, x) = v.0[k].clone();
            match self.rows.get(&c) {
                Some(r) => {
                    let a = -(x / &r.0[0].1);
                    v.axpy(&a, r);
                    // entries before k are untouched because r leads at c
                }
                None => k += 1,
            }
        }
        v
    }

    /// Inserts `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SVec) -> bool {
        let v = self.reduce_lead(v);
        match v.lead() {
            Some((c, _)) => {
                let c = *c;
                self.rows.insert(c, v);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce_lead(v.clone()).is_zero()
    }
}

pub fn rank(rows: impl IntoIterator<Item = SVec>) -> usize {
    let mut rows: Vec<SVec> = rows.into_iter().filter(|r| !r.is_zero()).collect();
    // short rows first keeps fill-in down
    rows.sort_by_key(|r| r.0.len());
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Basis of {x : A x = 0} where `eqs` are the rows of A over `nvars` unknowns.
pub fn nullspace(eqs: &[SVec], nvars: usize) -> Vec<SVec> {
    let rref = rref(eqs);
    let pivot_cols: BTreeMap<usize, &SVec> = rref.iter().map(|r| (r.0[0].0, r)).collect();
    let mut basis = Vec::new();
    for free in 0..nvars {
        if pivot_cols.contains_key(&free) {
            continue;
        }
        let mut v: Vec<(usize, Q)> = vec![(free, Q::from_integer(1.into()))];
        for (&pc, row) in &pivot_cols {
            if let Some(x) = row.get(free) {
                v.push((pc, -x.clone()));
            }
        }
        basis.push(SVec::from_pairs(v));
    }
    basis
}

/// Reduced row echelon form with unit pivots.
pub fn rref(eqs: &[SVec]) -> Vec<SVec> {
    let mut e = Echelon::new();
    for r in eqs {
        e.insert(r.clone());
    }
    let mut rows: Vec<SVec> = e.rows.into_values().collect();
    // back substitution, last pivot first
    for i in (0..rows.len()).rev() {
        let inv = num_traits::Inv::inv(rows[i].0[0].1.clone());
        rows[i].scale(&inv);
        let (pc, piv) = (rows[i].0[0].0, rows[i].clone());
        for (j, row) in rows.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            if let Some(x) = row.get(pc).cloned() {
                row.axpy(&-x, &piv);
            }
        }
    }
    rows
}

/// One solution of A x = b (b given per row), or None when inconsistent.
pub fn solve(eqs: &[SVec], rhs: &[Q], nvars: usize) -> Option<SVec> {
    // augment with an extra column nvars
    let aug: Vec<SVec> = eqs
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.0.clone();
            if !b.is_zero() {
                v.push((nvars, b.clone()));
            }
            SVec(v)
        })
        .collect();
    let rows = rref(&aug);
    let mut x = Vec::new();
    for r in rows {
        let pc = r.0[0].0;
        if pc == nvars {
            return None;
        }
        if let Some(b) = r.get(nvars) {
            x.push((pc, b.clone()));
        }
    }
    Some(SVec::from_pairs(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn sv(v: &[(usize, i64)]) -> SVec {
        SVec::from_pairs(v.iter().map(|(i, x)| (*i, q(*x))).collect())
    }

    #[test]
    fn rank_small() {
        let rows = vec![sv(&[(0, 1), (1, 2)]), sv(&[(0, 2), (1, 4)]), sv(&[(2, 1)])];
        assert_eq!(rank(rows), 2);
        assert_eq!(rank(Vec::<SVec>::new()), 0);
    }

    #[test]
    fn nullspace_and_solve() {
        // x0 + x1 = 0, x2 = 0 over 3 unknowns
        let eqs = vec![sv(&[(0, 1), (1, 1)]), sv(&[(2, 1)])];
        let ns = nullspace(&eqs, 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], sv(&[(0, -1), (1, 1)]));
        let x = solve(&eqs, &[q(3), q(5)], 3).unwrap();
        assert_eq!(x, sv(&[(0, 3), (2, 5)]));
        assert!(solve(&[sv(&[(0, 1)]), sv(&[(0, 1)])], &[q(1), q(2)], 1).is_none());
    }

    #[test]
    fn reduce_full_is_canonical() {
        let mut e = Echelon::new();
        e.insert(sv(&[(0, 1), (2, 1)]));
        e.insert(sv(&[(1, 1), (2, 1)]));
        let a = e.reduce_full(sv(&[(0, 1), (1, 1)]));
        let b = e.reduce_full(sv(&[(2, -2)]));
        assert_eq!(a, b);
    }
}
