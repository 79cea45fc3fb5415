//! Kauffman bracket state sum, a second check on the graded Euler characteristic.

use std::collections::BTreeMap;

use super::{state_circles, KhError, DENSE_LIMIT};
use crate::diagram::LinkDiagram;

/// Integer Laurent polynomial: exponent ↦ coefficient, zeros dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent(pub BTreeMap<i64, i64>);

impl Laurent {
    pub fn mono(e: i64, c: i64) -> Self {
        let mut l = Laurent::default();
        l.add(e, c);
        l
    }

    fn add(&mut self, e: i64, c: i64) {
        let v = self.0.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(&e);
        }
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        let mut r = Laurent::default();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                r.add(a + b, x * y);
            }
        }
        r
    }

    pub fn pow(&self, n: usize) -> Laurent {
        (0..n).fold(Laurent::mono(0, 1), |acc, _| acc.mul(self))
    }
}

/// ⟨D⟩ in A with ⟨O⟩ = −A² − A⁻²; the A-smoothing is the 0-smoothing.
pub fn kauffman_bracket(d: &LinkDiagram) -> Result<Laurent, KhError> {
    let n = d.crossings().len();
    if n > DENSE_LIMIT {
        return Err(KhError::TooLarge(n));
    }
    let delta = Laurent(BTreeMap::from([(2, -1), (-2, -1)]));
    let mut sum = Laurent::default();
    for s in 0..1u64 << n {
        let ones = s.count_ones() as i64;
        let term = Laurent::mono(n as i64 - 2 * ones, 1).mul(&delta.pow(state_circles(d, s).len()));
        for (e, c) in term.0 {
            sum.add(e, c);
        }
    }
    Ok(sum)
}

/// Σ (−1)^h q^j dim Kh^{h,j} predicted by the bracket, keyed by doubled j.
/// f = (−A³)^{−w}⟨D⟩ then A^{−2} = −q.
pub fn bracket_euler(d: &LinkDiagram) -> Result<BTreeMap<i64, i64>, KhError> {
    let w: i64 = d.crossings().iter().map(|x| x.sign as i64).sum();
    let norm = Laurent::mono(-3 * w, if w % 2 == 0 { 1 } else { -1 });
    let f = norm.mul(&kauffman_bracket(d)?);
    let mut out = BTreeMap::new();
    for (e, c) in f.0 {
        assert!(e % 2 == 0, "link brackets only have even powers of A");
        // A^e = (A^{-2})^{-e/2} = (−q)^{−e/2}
        let m = -e / 2;
        let c = if m % 2 == 0 { c } else { -c };
        *out.entry(2 * m).or_insert(0) += c;
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}
