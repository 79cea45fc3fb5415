//! Maps on homology as explicit matrices over ℚ.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::web::Web;
use super::MoveError;
use crate::complex::{scalar, BigradedComplex, ChainMap, CobRef, DimTable, Grading, Simplified};
use crate::linalg::{rank, SVec};
use crate::rational::Q;

/// The cube of a closed web together with its minimal model.
pub struct Reduced {
    pub cube: BigradedComplex,
    pub min: Simplified,
}

impl Reduced {
    pub fn new(cob: &CobRef, w: &Web) -> Result<Reduced, MoveError> {
        let cube = w.full_cube(cob)?;
        let min = cube.simplify_tracked();
        if min.complex.entries().next().is_some() {
            return Err(MoveError::Malformed("minimal complex kept a differential".into()));
        }
        Ok(Reduced { cube, min })
    }

    pub fn dim(&self) -> usize {
        self.min.complex.len()
    }

    pub fn gradings(&self) -> Vec<Grading> {
        self.min.complex.gens().iter().map(|g| g.grading).collect()
    }

    pub fn dims(&self) -> DimTable {
        let mut t = DimTable::new();
        for g in self.gradings() {
            t.add(g, 1);
        }
        t
    }

    /// Matrix of f: C(self) → C(other) on homology.
    pub fn push(&self, f: &ChainMap, other: &Reduced) -> HMap {
        let g = self.min.iota.then(f, &self.min.complex, &self.cube, &other.cube);
        let g = g.then(&other.min.pi, &self.min.complex, &other.cube, &other.min.complex);
        let mut m = HMap::zero(other.dim(), self.dim());
        for ((s, t), x) in &g.entries {
            m.rows[*t][*s] = scalar(x);
        }
        m
    }
}

/// Dense matrix, rows indexed by target basis, columns by source basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HMap {
    pub rows: Vec<Vec<Q>>,
    pub cols: usize,
}

impl HMap {
    pub fn zero(r: usize, c: usize) -> HMap {
        HMap { rows: vec![vec![Q::zero(); c]; r], cols: c }
    }

    pub fn identity(n: usize) -> HMap {
        let mut m = HMap::zero(n, n);
        for i in 0..n {
            m.rows[i][i] = Q::from_integer(1.into());
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// self ∘ other
    pub fn after(&self, other: &HMap) -> HMap {
        assert_eq!(self.cols, other.nrows(), "dimension mismatch");
        let mut m = HMap::zero(self.nrows(), other.cols);
        for i in 0..self.nrows() {
            for (k, a) in self.rows[i].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.rows[k][j];
                    if !b.is_zero() {
                        m.rows[i][j] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn plus(&self, other: &HMap) -> HMap {
        let mut m = self.clone();
        for (r, o) in m.rows.iter_mut().zip(&other.rows) {
            for (x, y) in r.iter_mut().zip(o) {
                *x += y;
            }
        }
        m
    }

    pub fn scaled(&self, a: &Q) -> HMap {
        HMap { rows: self.rows.iter().map(|r| r.iter().map(|x| x * a).collect()).collect(), cols: self.cols }
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn columns(&self) -> Vec<SVec> {
        (0..self.cols)
            .map(|j| SVec::from_pairs((0..self.nrows()).map(|i| (i, self.rows[i][j].clone())).collect()))
            .collect()
    }

    pub fn rank(&self) -> usize {
        rank(self.columns())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    /// λ with self = λ·other, if any.
    pub fn ratio(&self, other: &HMap) -> Option<Q> {
        let mut lam: Option<Q> = None;
        for (r, o) in self.rows.iter().zip(&other.rows) {
            for (x, y) in r.iter().zip(o) {
                match (x.is_zero(), y.is_zero()) {
                    (true, true) => {}
                    (false, false) => {
                        let l = x / y;
                        if lam.as_ref().is_some_and(|m| *m != l) {
                            return None;
                        }
                        lam = Some(l);
                    }
                    _ => return None,
                }
            }
        }
        lam
    }
}

/// Rank of a map restricted to columns in one grading.
pub fn rank_in(m: &HMap, src: &[Grading], g: Grading) -> usize {
    let cols: Vec<SVec> = m.columns().into_iter().zip(src).filter(|(_, s)| **s == g).map(|(c, _)| c).collect();
    rank(cols)
}

/// Dimension per grading of the image of `m` (columns graded by `src`).
pub fn image_dims(m: &HMap, src: &[Grading]) -> DimTable {
    let mut by: BTreeMap<Grading, ()> = BTreeMap::new();
    for g in src {
        by.insert(*g, ());
    }
    let mut t = DimTable::new();
    for g in by.keys() {
        let r = rank_in(m, src, *g);
        if r > 0 {
            t.add(*g, r);
        }
    }
    t
}
