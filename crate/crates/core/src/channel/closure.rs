//! Convex and row-convex closures of a channel family.
//!
//! The convex closure mixes whole channels with one state law `p(s)`. The
//! row-convex closure lets every input row pick its own law `θ(s|x)`, which is
//! what a jammer that sees the channel input can realize. Its extreme points
//! are the deterministic selections `g: X → S`.

use super::ChannelFamily;
use crate::error::{check_dim, Error, Result};
use crate::prob::{Distribution, StochasticMatrix};
use crate::simplex::{for_each_tuple, pow_f64};

/// Default cap on `|S|^|X|` for vertex enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosureKind {
    Convex,
    RowConvex,
}

/// Mixing weights of a closure element.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosureWeights {
    /// One state law shared by all inputs.
    Convex(Distribution),
    /// A state law per input row, `θ(s|x)`.
    RowConvex(StochasticMatrix),
}

/// A point of a closure together with the channel it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureElement {
    pub weights: ClosureWeights,
    pub effective: StochasticMatrix,
}

impl ClosureElement {
    pub fn kind(&self) -> ClosureKind {
        match self.weights {
            ClosureWeights::Convex(_) => ClosureKind::Convex,
            ClosureWeights::RowConvex(_) => ClosureKind::RowConvex,
        }
    }

    /// Weights flattened row-major (`|S|` or `|X|·|S|` entries).
    pub fn weight_vector(&self) -> Vec<f64> {
        match &self.weights {
            ClosureWeights::Convex(p) => p.probs().to_vec(),
            ClosureWeights::RowConvex(t) => t.as_slice().to_vec(),
        }
    }

    /// Row-convex view of the weights (a convex law repeated per row).
    pub fn as_row_weights(&self, n_in: usize) -> StochasticMatrix {
        match &self.weights {
            ClosureWeights::Convex(p) => StochasticMatrix::constant(n_in, p),
            ClosureWeights::RowConvex(t) => t.clone(),
        }
    }
}

/// `Σ_s p(s) W(·|·,s)`.
pub fn mix_convex(family: &ChannelFamily, p: &Distribution) -> Result<ClosureElement> {
    check_dim(family.n_states(), p.len(), "state law vs family size")?;
    let effective = convex_effective(family, p.probs());
    Ok(ClosureElement {
        weights: ClosureWeights::Convex(p.clone()),
        effective,
    })
}

/// Row `x` of the result is `Σ_s θ(s|x) W(·|x,s)`.
pub fn mix_row_convex(family: &ChannelFamily, theta: &StochasticMatrix) -> Result<ClosureElement> {
    check_dim(family.n_in(), theta.n_in(), "theta rows vs input alphabet")?;
    check_dim(
        family.n_states(),
        theta.n_out(),
        "theta columns vs state count",
    )?;
    let effective = row_convex_effective(family, theta.as_slice());
    Ok(ClosureElement {
        weights: ClosureWeights::RowConvex(theta.clone()),
        effective,
    })
}

pub(crate) fn convex_effective(family: &ChannelFamily, p: &[f64]) -> StochasticMatrix {
    let (nx, ny) = (family.n_in(), family.n_out());
    let mut data = vec![0.0; nx * ny];
    for (s, &ps) in p.iter().enumerate() {
        if ps == 0.0 {
            continue;
        }
        for (d, &w) in data.iter_mut().zip(family.state(s).as_slice()) {
            *d += ps * w;
        }
    }
    StochasticMatrix::from_flat_unchecked(nx, ny, data)
}

pub(crate) fn row_convex_effective(family: &ChannelFamily, theta: &[f64]) -> StochasticMatrix {
    let mut data = vec![0.0; family.n_in() * family.n_out()];
    row_convex_into(family, theta, &mut data);
    StochasticMatrix::from_flat_unchecked(family.n_in(), family.n_out(), data)
}

pub(crate) fn row_convex_into(family: &ChannelFamily, theta: &[f64], out: &mut [f64]) {
    let (nx, ny, ns) = (family.n_in(), family.n_out(), family.n_states());
    out.iter_mut().for_each(|v| *v = 0.0);
    for x in 0..nx {
        let o = &mut out[x * ny..(x + 1) * ny];
        for s in 0..ns {
            let t = theta[x * ns + s];
            if t == 0.0 {
                continue;
            }
            for (d, &w) in o.iter_mut().zip(family.state(s).row(x)) {
                *d += t * w;
            }
        }
    }
}

/// The deterministic selection `g`: row `x` of `W(·|·, g(x))`.
pub fn selection_element(family: &ChannelFamily, g: &[usize]) -> ClosureElement {
    let (nx, ny, ns) = (family.n_in(), family.n_out(), family.n_states());
    let mut theta = vec![0.0; nx * ns];
    let mut data = Vec::with_capacity(nx * ny);
    for (x, &s) in g.iter().enumerate() {
        theta[x * ns + s] = 1.0;
        data.extend_from_slice(family.state(s).row(x));
    }
    ClosureElement {
        weights: ClosureWeights::RowConvex(StochasticMatrix::from_flat_unchecked(nx, ns, theta)),
        effective: StochasticMatrix::from_flat_unchecked(nx, ny, data),
    }
}

/// The pure states, i.e. the vertices of the convex closure.
pub fn convex_vertices(family: &ChannelFamily) -> Vec<ClosureElement> {
    (0..family.n_states())
        .map(|s| ClosureElement {
            weights: ClosureWeights::Convex(Distribution::point(family.n_states(), s)),
            effective: family.state(s).clone(),
        })
        .collect()
}

pub(crate) fn check_vertex_cap(family: &ChannelFamily, cap: usize) -> Result<usize> {
    let count = pow_f64(family.n_states(), family.n_in());
    if count > cap as f64 {
        return Err(Error::CapExceeded {
            what: "row-convex vertex enumeration (|S|^|X|)",
            needed: count,
            cap: cap as f64,
            hint: "use the iterative optimizer instead of enumeration",
        });
    }
    Ok(count as usize)
}

/// All `|S|^|X|` deterministic row selections, in lexicographic order of
/// `(g(0), .., g(|X|-1))`.
///
/// ```
/// use avwc_core::channel::{row_convex_vertices, ChannelFamily, DEFAULT_VERTEX_CAP};
/// use avwc_core::StochasticMatrix;
///
/// let id = StochasticMatrix::identity(2);
/// let flip = StochasticMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
/// let family = ChannelFamily::new(vec![id, flip]).unwrap();
/// assert_eq!(row_convex_vertices(&family, DEFAULT_VERTEX_CAP).unwrap().len(), 4);
/// ```
pub fn row_convex_vertices(family: &ChannelFamily, cap: usize) -> Result<Vec<ClosureElement>> {
    let count = check_vertex_cap(family, cap)?;
    let mut out = Vec::with_capacity(count);
    for_each_tuple(family.n_states(), family.n_in(), |g| {
        out.push(selection_element(family, g))
    });
    Ok(out)
}

/// Vertices of the closure of the given kind.
pub fn closure_vertices(
    family: &ChannelFamily,
    kind: ClosureKind,
    cap: usize,
) -> Result<Vec<ClosureElement>> {
    match kind {
        ClosureKind::Convex => Ok(convex_vertices(family)),
        ClosureKind::RowConvex => row_convex_vertices(family, cap),
    }
}
