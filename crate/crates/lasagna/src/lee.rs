//! Lee deformation: closed surface evaluation and total rank.

use num_traits::{One, Zero};

use crate::diagram::LinkDiagram;
use crate::khovanov::{self, KhError};
use crate::rational::Q;

/// A closed surface without seams: components as (genus, dots).
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedSurface {
    pub components: Vec<(u32, u32)>,
    pub c: Q,
}

/// a + b·x in ℚ[x]/(x² − c)
#[derive(Clone, Debug)]
struct Elt(Q, Q);

impl Elt {
    fn times_x(&self, c: &Q) -> Elt {
        Elt(&self.1 * c, self.0.clone())
    }
}

/// Value of one connected component: ε(x^dots · handle^genus(1)), where the
/// handle operator m∘Δ is multiplication by 2x and ε picks the x coefficient.
pub fn eval_component(genus: u32, dots: u32, c: &Q) -> Q {
    let mut v = Elt(Q::one(), Q::zero());
    let two = Q::from_integer(2.into());
    for _ in 0..genus {
        v = v.times_x(c);
        v = Elt(&v.0 * &two, &v.1 * &two);
    }
    for _ in 0..dots {
        v = v.times_x(c);
    }
    v.1
}

pub fn eval_closed_surface(s: &ClosedSurface) -> Q {
    s.components.iter().map(|&(g, d)| eval_component(g, d, &s.c)).product()
}

/// Total Lee homology dimension (c = 1); 2^{#components} for any link.
pub fn lee_total_dim(d: &LinkDiagram) -> Result<usize, KhError> {
    Ok(khovanov::lee_dims_by_h(d)?.values().sum())
}
