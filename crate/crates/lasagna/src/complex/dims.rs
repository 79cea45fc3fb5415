use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Grading;
use crate::rational::{half, parse_half};

/// Bounds are doubled degrees; None is unbounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub h_lo: Option<i64>,
    pub h_hi: Option<i64>,
    pub q_lo: Option<i64>,
    pub q_hi: Option<i64>,
}

impl Window {
    pub fn all() -> Self {
        Self::default()
    }

    /// From undoubled integer bounds.
    pub fn hq(h: (Option<i64>, Option<i64>), q: (Option<i64>, Option<i64>)) -> Self {
        let d = |x: Option<i64>| x.map(|v| 2 * v);
        Window { h_lo: d(h.0), h_hi: d(h.1), q_lo: d(q.0), q_hi: d(q.1) }
    }

    pub fn contains(&self, g: Grading) -> bool {
        self.h_lo.is_none_or(|l| g.h2 >= l)
            && self.h_hi.is_none_or(|u| g.h2 <= u)
            && self.q_lo.is_none_or(|l| g.q2 >= l)
            && self.q_hi.is_none_or(|u| g.q2 <= u)
    }

    pub fn shift(&self, dh2: i64, dq2: i64) -> Self {
        let s = |x: Option<i64>, d| x.map(|v| v + d);
        Window { h_lo: s(self.h_lo, dh2), h_hi: s(self.h_hi, dh2), q_lo: s(self.q_lo, dq2), q_hi: s(self.q_hi, dq2) }
    }

    /// Image under (h, q) ↦ (−h, −q).
    pub fn reflect(&self) -> Self {
        let n = |x: Option<i64>| x.map(|v| -v);
        Window { h_lo: n(self.h_hi), h_hi: n(self.h_lo), q_lo: n(self.q_hi), q_hi: n(self.q_lo) }
    }

    pub fn intersect(&self, o: &Window) -> Self {
        let mx = |a: Option<i64>, b: Option<i64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) | (None, x) => x,
        };
        let mn = |a: Option<i64>, b: Option<i64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        };
        Window { h_lo: mx(self.h_lo, o.h_lo), h_hi: mn(self.h_hi, o.h_hi), q_lo: mx(self.q_lo, o.q_lo), q_hi: mn(self.q_hi, o.q_hi) }
    }

    /// The lower-left quadrant {h ≤ h_hi, q ≤ q_hi}.
    pub fn quadrant(&self) -> Self {
        Window { h_lo: None, h_hi: self.h_hi, q_lo: None, q_hi: self.q_hi }
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.h_lo, self.h_hi), (Some(a), Some(b)) if a > b) || matches!((self.q_lo, self.q_hi), (Some(a), Some(b)) if a > b)
    }

    /// `hLo:hHi,qLo:qHi`; any bound may be left blank; degrees may be `p/2`.
    pub fn parse(s: &str) -> Result<Window, String> {
        let (hs, qs) = s.split_once(',').ok_or_else(|| format!("window {s:?}: expected hLo:hHi,qLo:qHi"))?;
        let range = |r: &str| -> Result<(Option<i64>, Option<i64>), String> {
            let (a, b) = r.split_once(':').ok_or_else(|| format!("window range {r:?}: expected lo:hi"))?;
            let bound = |x: &str| -> Result<Option<i64>, String> {
                if x.trim().is_empty() {
                    Ok(None)
                } else {
                    parse_half(x).map(Some).ok_or_else(|| format!("window bound {x:?} is not a number"))
                }
            };
            Ok((bound(a)?, bound(b)?))
        };
        let (h_lo, h_hi) = range(hs)?;
        let (q_lo, q_hi) = range(qs)?;
        let w = Window { h_lo, h_hi, q_lo, q_hi };
        if w.is_empty() {
            return Err(format!("window {s:?} is empty"));
        }
        Ok(w)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = |x: Option<i64>| x.map(half).unwrap_or_default();
        write!(f, "{}:{},{}:{}", b(self.h_lo), b(self.h_hi), b(self.q_lo), b(self.q_hi))
    }
}

/// Dimensions per bigrading; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DimTable(BTreeMap<Grading, usize>);

impl DimTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// From undoubled integer entries (h, q, dim).
    pub fn from_hq(v: &[(i64, i64, usize)]) -> Self {
        let mut t = DimTable::new();
        for &(h, q, d) in v {
            t.add(Grading::hq(h, q), d);
        }
        t
    }

    pub fn insert(&mut self, g: Grading, d: usize) {
        if d == 0 {
            self.0.remove(&g);
        } else {
            self.0.insert(g, d);
        }
    }

    pub fn add(&mut self, g: Grading, d: usize) {
        let x = self.get(g) + d;
        self.insert(g, x);
    }

    pub fn get(&self, g: Grading) -> usize {
        self.0.get(&g).copied().unwrap_or(0)
    }

    /// Lookup by undoubled integer degrees.
    pub fn at(&self, h: i64, q: i64) -> usize {
        self.get(Grading::hq(h, q))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Grading, usize)> + '_ {
        self.0.iter().map(|(g, d)| (*g, *d))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn restrict(&self, w: &Window) -> DimTable {
        DimTable(self.0.iter().filter(|(g, _)| w.contains(**g)).map(|(g, d)| (*g, *d)).collect())
    }

    pub fn shift(&self, dh2: i64, dq2: i64) -> DimTable {
        DimTable(self.0.iter().map(|(g, d)| (g.shift(dh2, dq2), *d)).collect())
    }

    /// (h, q) ↦ (−h, −q).
    pub fn reflect(&self) -> DimTable {
        DimTable(self.0.iter().map(|(g, d)| (Grading::new(-g.h2, -g.q2), *d)).collect())
    }

    /// Graded tensor product (convolution).
    pub fn tensor(&self, o: &DimTable) -> DimTable {
        let mut t = DimTable::new();
        for (a, x) in self.iter() {
            for (b, y) in o.iter() {
                t.add(a + b, x * y);
            }
        }
        t
    }

    pub fn unit() -> DimTable {
        let mut t = DimTable::new();
        t.insert(Grading::default(), 1);
        t
    }

    /// Σ (−1)^h dim · q^q keyed by q2; requires integral h.
    pub fn euler(&self) -> BTreeMap<i64, i64> {
        let mut e = BTreeMap::new();
        for (g, d) in self.iter() {
            assert!(g.h2 % 2 == 0, "Euler characteristic needs integral homological degrees");
            let s = if (g.h2 / 2) % 2 == 0 { 1 } else { -1 };
            *e.entry(g.q2).or_insert(0) += s * d as i64;
        }
        e.retain(|_, v| *v != 0);
        e
    }

    pub fn min_h2(&self) -> Option<i64> {
        self.0.keys().map(|g| g.h2).min()
    }

    pub fn max_h2(&self) -> Option<i64> {
        self.0.keys().map(|g| g.h2).max()
    }

    pub fn min_q2(&self) -> Option<i64> {
        self.0.keys().map(|g| g.q2).min()
    }

    /// `h<TAB>q<TAB>dim` per line, sorted by (h, q).
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for (g, d) in self.iter() {
            s.push_str(&format!("{}\t{}\t{}\n", half(g.h2), half(g.q2), d));
        }
        s
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.iter()
                .map(|(g, d)| serde_json::json!({"h": half(g.h2), "q": half(g.q2), "dim": d.to_string()}))
                .collect(),
        )
    }

    pub fn from_json_value(v: &serde_json::Value) -> Option<DimTable> {
        let mut t = DimTable::new();
        for e in v.as_array()? {
            let h = parse_half(e.get("h")?.as_str()?)?;
            let q = parse_half(e.get("q")?.as_str()?)?;
            let d: usize = e.get("dim")?.as_str()?.parse().ok()?;
            t.insert(Grading::new(h, q), d);
        }
        Some(t)
    }
}

impl fmt::Display for DimTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(g, d)| format!("({},{}):{}", half(g.h2), half(g.q2), d)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
