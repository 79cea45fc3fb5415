//! Truncated Rozansky–Willis homology through twist insertion.

use std::fmt;

use serde_json::json;

use crate::complex::{DimTable, Grading, Window};
use crate::diagram::{DiagramError, LinkDiagram};
use crate::projector::{self, stable_window_with, ProjectorError, DEFAULT_SLOPE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RWResult {
    pub variant: Variant,
    /// Complete on `window`; for the plus variant also on the quadrant below it.
    pub dims: DimTable,
    pub window: Window,
    /// (region, twists used)
    pub twists: Vec<(u32, usize)>,
    pub stabilized: Vec<(u32, bool)>,
    /// Every region is crossed by an even number of strands.
    pub divisible: bool,
    /// Writhe of the twisted diagram mod 2.
    pub koszul_parity: i64,
}

impl RWResult {
    pub fn is_stabilized(&self) -> bool {
        self.stabilized.iter().all(|s| s.1)
    }

    fn unit() -> RWResult {
        RWResult {
            variant: Variant::Plus,
            dims: DimTable::unit(),
            window: Window::all(),
            twists: vec![],
            stabilized: vec![],
            divisible: true,
            koszul_parity: 0,
        }
    }

    fn reflected(&self) -> RWResult {
        let variant = match self.variant {
            Variant::Plus => Variant::Minus,
            Variant::Minus => Variant::Plus,
        };
        RWResult { variant, dims: self.dims.reflect(), window: self.window.reflect(), ..self.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "variant": match self.variant { Variant::Plus => "plus", Variant::Minus => "minus" },
            "window": self.window.to_string(),
            "dims": self.dims.to_json_value(),
            "twists": self.twists.iter().map(|(j, k)| json!({"region": j, "k": k})).collect::<Vec<_>>(),
            "stabilized": self.stabilized.iter().map(|(j, s)| json!({"region": j, "stabilized": s})).collect::<Vec<_>>(),
            "divisible": self.divisible,
            "koszul_parity": self.koszul_parity,
        })
    }
}

#[derive(Debug)]
pub enum RwError {
    Input(String),
    Projector(ProjectorError),
    NotStabilized { region: u32, k_max: usize },
    IncompatibleWindows,
}

impl fmt::Display for RwError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RwError::Input(s) => write!(f, "{s}"),
            RwError::Projector(e) => write!(f, "{e}"),
            RwError::NotStabilized { region, k_max } => {
                write!(f, "region {region} did not stabilise within {k_max} twists")
            }
            RwError::IncompatibleWindows => write!(f, "results have incompatible windows"),
        }
    }
}

impl std::error::Error for RwError {}

impl From<ProjectorError> for RwError {
    fn from(e: ProjectorError) -> Self {
        RwError::Projector(e)
    }
}

impl From<DiagramError> for RwError {
    fn from(e: DiagramError) -> Self {
        RwError::Projector(ProjectorError::Diagram(e))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RwOptions {
    pub k_max: usize,
    /// First twist count tried at every region.
    pub min_twists: usize,
    pub slope: i64,
}

impl RwOptions {
    pub fn new(k_max: usize) -> Self {
        RwOptions { k_max, min_twists: 2, slope: DEFAULT_SLOPE }
    }
}

pub fn rw_plus(d: &LinkDiagram, w: &Window, k_max: usize) -> Result<RWResult, RwError> {
    rw_plus_with(d, w, &RwOptions::new(k_max))
}

fn twisted(d: &LinkDiagram, ks: &[(u32, usize)]) -> Result<LinkDiagram, RwError> {
    let mut t = d.clone();
    for &(j, k) in ks {
        t = t.insert_framed_twists(j, k)?;
    }
    Ok(t)
}

pub fn rw_plus_with(d: &LinkDiagram, w: &Window, opt: &RwOptions) -> Result<RWResult, RwError> {
    if w.is_empty() {
        return Err(RwError::Input("empty window".into()));
    }
    let regions: Vec<(u32, usize)> = d.regions().iter().map(|r| (r.id, r.len())).collect();
    if regions.iter().any(|r| r.1 % 2 == 1) {
        return Ok(RWResult {
            variant: Variant::Plus,
            dims: DimTable::new(),
            window: w.clone(),
            twists: vec![],
            stabilized: regions.iter().map(|r| (r.0, true)).collect(),
            divisible: false,
            koszul_parity: 0,
        });
    }
    let k0 = opt.min_twists.max(1);
    if !regions.is_empty() && k0 + 1 > opt.k_max {
        return Err(RwError::Input(format!("--max-twists must be at least {}", k0 + 1)));
    }
    let mut ks: Vec<(u32, usize)> = regions.iter().map(|r| (r.0, if r.1 == 0 { 1 } else { k0 })).collect();
    let certified = |ks: &[(u32, usize)]| {
        regions.iter().zip(ks).fold(w.clone(), |acc, (r, k)| acc.intersect(&stable_window_with(r.1, k.1, opt.slope)))
    };
    let mut stable = vec![false; regions.len()];
    // escalate each region until k and k + 1 agree with the others held fixed
    loop {
        let Some(i) = stable.iter().position(|s| !s) else { break };
        let cw = certified(&ks).quadrant();
        let mut next = ks.clone();
        next[i].1 += 1;
        let (a, b) = (twisted(d, &ks)?, twisted(d, &next)?);
        let agree = regions[i].1 == 0 || projector::tilde_dims(&a, &cw)? == projector::tilde_dims(&b, &cw)?;
        if agree {
            stable[i] = true;
        } else if next[i].1 + 1 > opt.k_max {
            return Err(RwError::NotStabilized { region: regions[i].0, k_max: opt.k_max });
        } else {
            log::info!("region {} not stable at k = {}", regions[i].0, ks[i].1);
            ks = next;
            // earlier regions were checked against different twist counts
            stable.iter_mut().for_each(|s| *s = false);
        }
    }
    let t = twisted(d, &ks)?;
    let window = certified(&ks);
    let dims = projector::tilde_dims(&t, &window.quadrant())?;
    Ok(RWResult {
        variant: Variant::Plus,
        dims,
        window,
        twists: ks,
        stabilized: regions.iter().map(|r| (r.0, true)).collect(),
        divisible: true,
        koszul_parity: t.writhe().rem_euclid(2),
    })
}

/// Dual of the plus variant of the mirror.
pub fn rw_minus(d: &LinkDiagram, w: &Window, k_max: usize) -> Result<RWResult, RwError> {
    Ok(rw_plus(&d.mirror(), &w.reflect(), k_max)?.reflected())
}

/// Tensor product over the components of a disjoint union. The certified
/// quadrant of A ⊗ B is bounded by H_A + m_B and H_B + m_A, where m is the
/// least degree in the support (or just past H when the support is empty).
pub fn rw_tensor(results: &[RWResult]) -> Result<RWResult, RwError> {
    let Some(first) = results.first() else { return Ok(RWResult::unit()) };
    if results.iter().any(|r| r.variant != first.variant) {
        return Err(RwError::IncompatibleWindows);
    }
    let flip = first.variant == Variant::Minus;
    let mut acc = RWResult::unit();
    for r in results {
        let r = if flip { r.reflected() } else { r.clone() };
        acc = tensor2(&acc, &r)?;
    }
    Ok(if flip { acc.reflected() } else { acc })
}

fn tensor2(a: &RWResult, b: &RWResult) -> Result<RWResult, RwError> {
    let bound = |ha: Option<i64>, mb: Option<i64>, hb: Option<i64>, ma: Option<i64>| -> Option<i64> {
        let one = |h: Option<i64>, m: Option<i64>, hm: Option<i64>| match (h, m.or(hm.map(|x| x + 1))) {
            (None, _) => None,
            (Some(h), Some(m)) => Some(h + m),
            (Some(_), None) => None,
        };
        match (one(ha, mb, hb), one(hb, ma, ha)) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        }
    };
    let (sa, sb) = (&a.dims, &b.dims);
    let h_hi = bound(a.window.h_hi, sb.min_h2(), b.window.h_hi, sa.min_h2());
    let q_hi = bound(a.window.q_hi, sb.min_q2(), b.window.q_hi, sa.min_q2());
    let lo = |x: Option<i64>, y: Option<i64>| match (x, y) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    let window = Window { h_lo: lo(a.window.h_lo, b.window.h_lo), h_hi, q_lo: lo(a.window.q_lo, b.window.q_lo), q_hi };
    if window.is_empty() {
        return Err(RwError::IncompatibleWindows);
    }
    let dims = sa.tensor(sb).restrict(&window.quadrant());
    let mut twists = a.twists.clone();
    twists.extend(&b.twists);
    let mut stabilized = a.stabilized.clone();
    stabilized.extend(&b.stabilized);
    Ok(RWResult {
        variant: Variant::Plus,
        dims,
        window,
        twists,
        stabilized,
        divisible: a.divisible && b.divisible,
        koszul_parity: (a.koszul_parity + b.koszul_parity) % 2,
    })
}

/// Whether the table is nonzero at (h, q) in undoubled units.
pub fn has(t: &DimTable, h: i64, q: i64) -> bool {
    t.get(Grading::hq(h, q)) > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{empty_with_regions, region_unlink, right_trefoil, Dir};
    use crate::khovanov::{khr2_dims, tilde_renormalize};

    fn belt2() -> LinkDiagram {
        region_unlink(&[Dir::Up, Dir::Up])
    }

    fn win(h: (i64, i64), q: (i64, i64)) -> Window {
        Window::hq((Some(h.0), Some(h.1)), (Some(q.0), Some(q.1)))
    }

    #[test]
    fn empty_and_odd() {
        let r = rw_plus(&empty_with_regions(1), &Window::all(), 3).unwrap();
        assert_eq!(r.dims, DimTable::from_hq(&[(0, 0, 1)]));
        let r = rw_plus(&region_unlink(&[Dir::Up]), &Window::all(), 3).unwrap();
        assert!(r.dims.is_empty() && !r.divisible);
    }

    #[test]
    fn belt_two_has_a_bottom_class() {
        let r = rw_plus(&belt2(), &win((-1, 0), (-4, 0)), 3).unwrap();
        assert!(r.is_stabilized());
        assert_eq!(r.twists, vec![(0, 2)]);
        assert_eq!(r.dims.at(0, -2), 1);
        assert_eq!(r.dims.at(0, -4), 0);
        assert!(r.dims.iter().all(|(g, _)| g.h2 >= 0));
    }

    #[test]
    fn minus_reflects() {
        let w = win((-1, 0), (-4, 0));
        let p = rw_plus(&belt2(), &w, 3).unwrap();
        let m = rw_minus(&belt2(), &w.reflect(), 3).unwrap();
        assert_eq!(m.dims, p.dims.reflect());
        assert_eq!(m.dims.at(0, 2), 1);
    }

    #[test]
    fn no_regions_is_renormalised_khr2() {
        let d = right_trefoil();
        let r = rw_plus(&d, &Window::all(), 3).unwrap();
        let t = tilde_renormalize(&khr2_dims(&d, &Window::all()).unwrap(), d.writhe());
        assert_eq!(r.dims, t);
    }

    #[test]
    fn tensor_rules() {
        let w = win((-1, 0), (-6, 0));
        let b = rw_plus(&belt2(), &w, 3).unwrap();
        assert_eq!(rw_tensor(&[]).unwrap().dims, DimTable::unit());
        let e = rw_plus(&empty_with_regions(1), &Window::all(), 3).unwrap();
        let be = rw_tensor(&[b.clone(), e]).unwrap();
        assert_eq!(be.dims, b.dims.restrict(&be.window.quadrant()));
        let bb = rw_tensor(&[b.clone(), b]).unwrap();
        assert_eq!(bb.dims.at(0, -4), 1);
        assert_eq!(bb.dims.at(0, -6), 0);
    }

    #[test]
    fn stabilisation_failure_is_reported() {
        let e = rw_plus(&belt2(), &Window::hq((Some(0), Some(3)), (None, None)), 3);
        // the declared window at k = 2 stops at h = 1, so this still certifies
        assert!(e.is_ok());
        let opt = RwOptions { k_max: 3, min_twists: 2, slope: 4 };
        let e = rw_plus_with(&belt2(), &Window::hq((Some(0), Some(3)), (None, None)), &opt);
        assert!(matches!(e, Err(RwError::NotStabilized { .. })));
    }
}
