//! Full-twist approximation of the through-degree-zero projector.

use std::fmt;

use crate::complex::{DimTable, Window};
use crate::diagram::{Dir, DiagramError, LinkDiagram};
use crate::khovanov::{khr2_dims, tilde_renormalize, KhError};

/// Homological slope of the declared stable window: h ≤ slope·(k − 1).
pub const DEFAULT_SLOPE: i64 = 1;

#[derive(Debug)]
pub enum ProjectorError {
    Diagram(DiagramError),
    Kh(KhError),
}

impl fmt::Display for ProjectorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectorError::Diagram(e) => write!(f, "{e}"),
            ProjectorError::Kh(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ProjectorError {}

impl From<DiagramError> for ProjectorError {
    fn from(e: DiagramError) -> Self {
        ProjectorError::Diagram(e)
    }
}

impl From<KhError> for ProjectorError {
    fn from(e: KhError) -> Self {
        ProjectorError::Kh(e)
    }
}

#[derive(Clone, Debug)]
pub struct TwistApproximation {
    pub l: usize,
    pub dirs: Vec<Dir>,
    pub k: usize,
    pub diagram: LinkDiagram,
    pub window: Window,
    /// Odd strand count: the projector vanishes.
    pub zero: bool,
}

/// Region `j` of `d` replaced by `k` framed full twists.
pub fn approximate(d: &LinkDiagram, j: u32, k: usize, slope: i64) -> Result<TwistApproximation, ProjectorError> {
    let dirs: Vec<Dir> = d.region(j)?.strands.iter().map(|t| t.dir).collect();
    let l = dirs.len();
    Ok(TwistApproximation {
        l,
        dirs,
        k,
        diagram: d.insert_framed_twists(j, k)?,
        window: stable_window_with(l, k, slope),
        zero: l % 2 == 1,
    })
}

pub fn stable_window(l: usize, k: usize) -> Window {
    stable_window_with(l, k, DEFAULT_SLOPE)
}

/// Declared window of the k-twist model (doubled gradings). Empty for odd ℓ,
/// everything for ℓ = 0.
pub fn stable_window_with(l: usize, k: usize, slope: i64) -> Window {
    if l % 2 == 1 {
        return Window { h_lo: Some(0), h_hi: Some(-2), q_lo: None, q_hi: None };
    }
    if l == 0 {
        return Window::all();
    }
    Window { h_hi: Some(2 * slope * (k.max(1) as i64 - 1)), ..Window::all() }
}

/// Renormalised KhR₂ of a closed diagram inside `w`.
pub fn tilde_dims(d: &LinkDiagram, w: &Window) -> Result<DimTable, ProjectorError> {
    let wr = d.writhe();
    let raw = khr2_dims(d, &w.shift(-wr, wr))?;
    Ok(tilde_renormalize(&raw, wr).restrict(w))
}

/// Whether k and k + 1 framed twists at region `j` agree on `w`. Other
/// regions must already be resolved.
pub fn stabilization_check(d: &LinkDiagram, j: u32, k: usize, w: &Window) -> Result<bool, ProjectorError> {
    let (a, b) = (d.insert_framed_twists(j, k)?, d.insert_framed_twists(j, k + 1)?);
    let (ta, tb) = std::thread::scope(|s| {
        let ha = s.spawn(|| tilde_dims(&a, w));
        let tb = tilde_dims(&b, w);
        (ha.join().expect("twist worker panicked"), tb)
    });
    Ok(ta? == tb?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{empty_with_regions, region_unlink};

    #[test]
    fn windows() {
        let w = stable_window(2, 1);
        assert!(w.contains(crate::complex::Grading::hq(0, -2)));
        assert!(!w.contains(crate::complex::Grading::hq(1, -2)));
        for k in 1..5 {
            assert!(stable_window(2, k + 1).h_hi > stable_window(2, k).h_hi);
        }
        assert!(stable_window(3, 4).is_empty());
        assert!(approximate(&region_unlink(&[Dir::Up]), 0, 2, 1).unwrap().zero);
    }

    #[test]
    fn belt_two_stabilises_at_two_twists() {
        let d = region_unlink(&[Dir::Up, Dir::Up]);
        let w = Window::hq((Some(-1), Some(0)), (None, None));
        assert!(stabilization_check(&d, 0, 2, &w).unwrap());
        // far outside the declared window the models still differ
        let far = Window::hq((Some(0), Some(6)), (None, None));
        assert!(!stabilization_check(&d, 0, 1, &far).unwrap());
    }

    #[test]
    fn empty_region_is_always_stable() {
        let d = empty_with_regions(1);
        for k in 1..4 {
            assert!(stabilization_check(&d, 0, k, &Window::all()).unwrap());
        }
    }
}
