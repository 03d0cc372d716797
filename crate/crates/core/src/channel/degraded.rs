//! Degradedness as stochastic post-processing, decided by linear feasibility.

use rayon::prelude::*;

use super::closure::{row_convex_effective, row_convex_vertices, ClosureElement, ClosureWeights};
use super::{AvwcPair, ChannelFamily};
use crate::error::{check_dim, Result};
use crate::lp::phase1;
use crate::prob::StochasticMatrix;
use crate::simplex::{for_each_tuple, pow_f64, simplex_grid};

pub const DEFAULT_DEGRADED_TOL: f64 = 1e-9;
pub const DEFAULT_GRID_RESOLUTION: usize = 8;
/// Cap on the number of `(θ, θ′)` pairs the grid stage may test.
pub const DEFAULT_PAIR_CAP: f64 = 4.0e6;

#[derive(Debug, Clone, PartialEq)]
pub struct DegradednessCertificate {
    pub feasible: bool,
    /// `D` with `V = W·D` when feasible.
    pub degrading_map: Option<StochasticMatrix>,
    /// Largest constraint violation of the returned solution.
    pub residual: f64,
}

/// Is there a row-stochastic `D: Y → Z` with `vc = wc · D`?
///
/// ```
/// use avwc_core::channel::is_degraded;
/// use avwc_core::StochasticMatrix;
///
/// let w = StochasticMatrix::from_rows(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
/// let cert = is_degraded(&w, &w, 1e-9).unwrap();
/// assert!(cert.feasible);
/// ```
pub fn is_degraded(
    wc: &StochasticMatrix,
    vc: &StochasticMatrix,
    tol: f64,
) -> Result<DegradednessCertificate> {
    check_dim(wc.n_in(), vc.n_in(), "degradedness input alphabet")?;
    let (nx, ny, nz) = (wc.n_in(), wc.n_out(), vc.n_out());
    // Unknowns d[y*nz + z]; constraints: W·D = V (nx*nz rows), rows of D sum to 1.
    let nvar = ny * nz;
    let mut a = Vec::with_capacity(nx * nz + ny);
    let mut b = Vec::with_capacity(nx * nz + ny);
    for x in 0..nx {
        for z in 0..nz {
            let mut row = vec![0.0; nvar];
            for y in 0..ny {
                row[y * nz + z] = wc.get(x, y);
            }
            a.push(row);
            b.push(vc.get(x, z));
        }
    }
    for y in 0..ny {
        let mut row = vec![0.0; nvar];
        row[y * nz..(y + 1) * nz].iter_mut().for_each(|v| *v = 1.0);
        a.push(row);
        b.push(1.0);
    }
    let sol = phase1(&a, &b);
    let feasible = sol.infeasibility <= tol && sol.residual <= tol;
    let degrading_map = feasible.then(|| {
        let rows = sol
            .x
            .chunks(nz)
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.iter().map(|v| v / s).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        StochasticMatrix::from_flat_unchecked(ny, nz, rows.concat())
    });
    Ok(DegradednessCertificate {
        feasible,
        degrading_map,
        residual: sol.residual,
    })
}

/// One `(θ, θ′)` pair that failed the check.
#[derive(Debug, Clone, PartialEq)]
pub struct FailingPair {
    pub theta_legit: StochasticMatrix,
    pub theta_eve: StochasticMatrix,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongDegradednessReport {
    pub holds: bool,
    /// Always `"grid-verified"`: a finite net cannot prove the property.
    pub status: &'static str,
    pub grid_resolution: usize,
    pub vertex_pairs_checked: usize,
    pub grid_pairs_checked: usize,
    pub first_failure: Option<FailingPair>,
}

/// Row-wise grid over `P(S|X)`: every combination of per-row grid points.
fn row_grid(nx: usize, ns: usize, resolution: usize) -> Vec<Vec<f64>> {
    let rows = simplex_grid(ns, resolution);
    let mut out = Vec::new();
    for_each_tuple(rows.len(), nx, |t| {
        out.push(t.iter().flat_map(|&i| rows[i].iter().copied()).collect());
    });
    out
}

fn grid_len(nx: usize, ns: usize, resolution: usize) -> f64 {
    pow_f64(
        crate::simplex::simplex_grid_size(ns, resolution) as usize,
        nx,
    )
}

fn theta_matrix(nx: usize, ns: usize, t: &[f64]) -> StochasticMatrix {
    StochasticMatrix::from_flat_unchecked(nx, ns, t.to_vec())
}

/// Checks `X ↔ Y_θ ↔ Z_θ′` for all vertex pairs and then all pairs on a
/// row-wise grid. Stops at the first failure (lexicographic order).
pub fn is_strongly_degraded(
    pair: &AvwcPair,
    grid_resolution: usize,
    tol: f64,
) -> Result<StrongDegradednessReport> {
    let (nx, ns) = (pair.n_inputs(), pair.n_states());
    let (w, v) = (pair.legit(), pair.eve());
    let cap = super::DEFAULT_VERTEX_CAP;
    let wv = row_convex_vertices(w, cap)?;
    let vv = row_convex_vertices(v, cap)?;

    let check = |tw: &[f64], tv: &[f64]| -> Option<FailingPair> {
        let wc = row_convex_effective(w, tw);
        let vc = row_convex_effective(v, tv);
        let cert = is_degraded(&wc, &vc, tol).expect("shapes checked by AvwcPair");
        (!cert.feasible).then(|| FailingPair {
            theta_legit: theta_matrix(nx, ns, tw),
            theta_eve: theta_matrix(nx, ns, tv),
            residual: cert.residual,
        })
    };

    let vertex_pairs = wv.len() * vv.len();
    let failure = (0..vertex_pairs).into_par_iter().find_map_first(|i| {
        let (a, b) = (&wv[i / vv.len()], &vv[i % vv.len()]);
        check(a.weight_vector().as_slice(), b.weight_vector().as_slice())
    });
    if failure.is_some() {
        return Ok(StrongDegradednessReport {
            holds: false,
            status: "grid-verified",
            grid_resolution,
            vertex_pairs_checked: vertex_pairs,
            grid_pairs_checked: 0,
            first_failure: failure,
        });
    }

    let side = grid_len(nx, ns, grid_resolution);
    let needed = side * side;
    if needed > DEFAULT_PAIR_CAP {
        return Err(crate::Error::CapExceeded {
            what: "strong-degradedness grid pairs",
            needed,
            cap: DEFAULT_PAIR_CAP,
            hint: "lower the grid resolution",
        });
    }
    let grid = row_grid(nx, ns, grid_resolution);
    let total = grid.len() * grid.len();
    let failure = (0..total)
        .into_par_iter()
        .find_map_first(|i| check(&grid[i / grid.len()], &grid[i % grid.len()]));
    Ok(StrongDegradednessReport {
        holds: failure.is_none(),
        status: "grid-verified",
        grid_resolution,
        vertex_pairs_checked: vertex_pairs,
        grid_pairs_checked: total,
        first_failure: failure,
    })
}

/// Is every row-convex vertex of `family` degraded with respect to `candidate`?
///
/// Only the vertices are tested. Row-wise mixtures of post-processings need not
/// share a single degrading map, so this is the vertex form of the property.
pub fn dominates_all_vertices(
    candidate: &StochasticMatrix,
    vertices: &[ClosureElement],
    tol: f64,
) -> bool {
    vertices.iter().all(|g| {
        is_degraded(candidate, &g.effective, tol)
            .map(|c| c.feasible)
            .unwrap_or(false)
    })
}

/// First `θ*` (vertices, then the row-wise grid) whose `V_θ*` degrades every
/// other `V_θ`.
pub fn find_best_eavesdropper_channel(
    pair: &AvwcPair,
    grid_resolution: usize,
    tol: f64,
) -> Result<Option<ClosureElement>> {
    best_channel_in(pair.eve(), grid_resolution, tol)
}

pub(crate) fn best_channel_in(
    family: &ChannelFamily,
    grid_resolution: usize,
    tol: f64,
) -> Result<Option<ClosureElement>> {
    let vertices = row_convex_vertices(family, super::DEFAULT_VERTEX_CAP)?;
    if let Some(v) = vertices
        .par_iter()
        .find_first(|c| dominates_all_vertices(&c.effective, &vertices, tol))
    {
        return Ok(Some(v.clone()));
    }
    let (nx, ns) = (family.n_in(), family.n_states());
    let needed = grid_len(nx, ns, grid_resolution) * vertices.len() as f64;
    if needed > DEFAULT_PAIR_CAP {
        return Err(crate::Error::CapExceeded {
            what: "best-eavesdropper grid search",
            needed,
            cap: DEFAULT_PAIR_CAP,
            hint: "lower the grid resolution",
        });
    }
    let grid = row_grid(nx, ns, grid_resolution);
    Ok(grid
        .par_iter()
        .map(|t| ClosureElement {
            weights: ClosureWeights::RowConvex(theta_matrix(nx, ns, t)),
            effective: row_convex_effective(family, t),
        })
        .find_first(|c| dominates_all_vertices(&c.effective, &vertices, tol)))
}
