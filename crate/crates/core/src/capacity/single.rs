//! Outer maximization over input laws and the capacity result type.

use rayon::prelude::*;

use super::inner::{inner_max_with, inner_min_with, InnerOptions};
use super::JammerMode;
use crate::channel::{
    find_best_eavesdropper_channel, is_strongly_degraded, AvwcPair, ChannelFamily, ClosureElement,
    DEFAULT_DEGRADED_TOL, DEFAULT_GRID_RESOLUTION,
};
use crate::error::Result;
use crate::prob::{Distribution, StochasticMatrix};
use crate::simplex::{project_onto_simplex, simplex_grid, simplex_grid_size};

/// Outer grids larger than this are coarsened automatically.
pub const OUTER_GRID_BUDGET: f64 = 200_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityOptions {
    /// Outer simplex-grid resolution; `None` picks 100 when it fits the budget.
    pub grid_resolution: Option<usize>,
    /// Number of best grid points refined by local ascent.
    pub refine_starts: usize,
    pub ascent_max_iter: usize,
    /// Inner optimizer settings used during the outer sweep.
    pub inner: InnerOptions,
    /// Check strong degradedness and the best eavesdropper channel.
    pub check_hypotheses: bool,
    pub hypothesis_grid: usize,
    pub tol: f64,
    /// Seed for the random starts of the prefix optimizer.
    pub seed: u64,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            grid_resolution: None,
            refine_starts: 10,
            ascent_max_iter: 200,
            inner: InnerOptions {
                check_grid: None,
                vertex_starts: false,
                ..InnerOptions::default()
            },
            check_hypotheses: true,
            hypothesis_grid: DEFAULT_GRID_RESOLUTION,
            tol: DEFAULT_DEGRADED_TOL,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub grid_resolution: usize,
    pub grid_points: usize,
    /// `[best grid value, refined value]` of the raw objective.
    pub bracket: (f64, f64),
    pub ascent_iterations: usize,
    pub inner_iterations: usize,
    /// Best value on the 1/64 bracketing grid of Bob's closure at the optimum.
    pub legit_grid_value: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypotheses {
    pub strongly_degraded: Option<bool>,
    pub best_eve_found: Option<bool>,
    pub label: String,
}

impl Hypotheses {
    pub fn verified(&self) -> bool {
        self.strongly_degraded == Some(true) && self.best_eve_found == Some(true)
    }
}

/// Prefix channel used by a multi-letter bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixInfo {
    pub k: usize,
    pub psi_card: usize,
    pub rho: StochasticMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Capacity in bits per channel use, clipped at zero.
    pub value: f64,
    /// Unclipped `min I(P;W) − max I(P;V)` at the optimum (scaled by `1/k`
    /// for prefix bounds).
    pub raw_difference: f64,
    pub legit_value: f64,
    pub eve_value: f64,
    /// Law of the channel input, or of `Ψ` for prefix bounds.
    pub opt_input: Distribution,
    pub worst_legit: ClosureElement,
    pub best_eve: ClosureElement,
    pub mode: JammerMode,
    pub diagnostics: Diagnostics,
    pub hypotheses: Hypotheses,
    pub prefix: Option<PrefixInfo>,
}

/// The objective `P ↦ min I(P;W) − max I(P;V)` over the mode's closures,
/// optionally behind a prefix channel.
pub(crate) struct Objective<'a> {
    pub legit: &'a ChannelFamily,
    pub eve: &'a ChannelFamily,
    pub mode: JammerMode,
    pub prefix: Option<&'a StochasticMatrix>,
    pub inner: &'a InnerOptions,
}

pub(crate) struct Evaluation {
    pub raw: f64,
    pub legit: super::inner::InnerOutcome,
    pub eve: super::inner::InnerOutcome,
}

impl<'a> Objective<'a> {
    pub fn new(
        legit: &'a ChannelFamily,
        eve: &'a ChannelFamily,
        mode: JammerMode,
        prefix: Option<&'a StochasticMatrix>,
        inner: &'a InnerOptions,
    ) -> Self {
        Self {
            legit,
            eve,
            mode,
            prefix,
            inner,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.prefix
            .map_or(self.legit.n_in(), StochasticMatrix::n_in)
    }

    pub fn evaluate_with(&self, p: &[f64], inner: &InnerOptions) -> Result<Evaluation> {
        let p = Distribution::from_simplex_unchecked(p.to_vec());
        let kind = self.mode.closure_kind();
        let legit = inner_min_with(&p, self.legit, kind, self.prefix, inner)?;
        let eve = inner_max_with(&p, self.eve, kind, self.prefix, inner)?;
        Ok(Evaluation {
            raw: legit.value - eve.value,
            legit,
            eve,
        })
    }

    pub fn evaluate(&self, p: &[f64]) -> Result<Evaluation> {
        self.evaluate_with(p, self.inner)
    }

    pub fn value(&self, p: &[f64]) -> Result<f64> {
        Ok(self.evaluate(p)?.raw)
    }
}

/// Resolution used for an outer grid on the `dim`-simplex.
pub(crate) fn outer_resolution(dim: usize, requested: Option<usize>, budget: f64) -> usize {
    if let Some(r) = requested {
        return r.max(1);
    }
    let mut r = 100;
    while r > 1 && simplex_grid_size(dim, r) > budget {
        r -= 1;
    }
    r
}

pub(crate) struct OuterOutcome {
    pub p: Vec<f64>,
    pub raw: f64,
    pub grid_best: f64,
    pub grid_points: usize,
    pub resolution: usize,
    pub ascent_iterations: usize,
}

/// Projected ascent with central-difference gradients of `f(proj(u))` and
/// step halving.
pub(crate) fn local_ascent(
    obj: &Objective,
    start: &[f64],
    f0: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64, usize)> {
    const H: f64 = 1e-5;
    let n = start.len();
    let (mut p, mut f) = (start.to_vec(), f0);
    let mut step = 0.05;
    let mut iters = 0;
    let eval_proj = |u: &mut Vec<f64>| -> Result<f64> {
        project_onto_simplex(u);
        obj.value(u)
    };
    while iters < max_iter {
        iters += 1;
        let mut g = vec![0.0; n];
        for i in 0..n {
            let mut a = p.clone();
            a[i] += H;
            let mut b = p.clone();
            b[i] -= H;
            g[i] = (eval_proj(&mut a)? - eval_proj(&mut b)?) / (2.0 * H);
        }
        // Only the tangential part moves along the simplex.
        let mean = g.iter().sum::<f64>() / n as f64;
        g.iter_mut().for_each(|v| *v -= mean);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            break;
        }
        let mut t = step * 2.0;
        let mut moved = false;
        while t > 1e-9 {
            let mut u: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a + t * b / norm).collect();
            let fu = eval_proj(&mut u)?;
            if fu > f + 1e-13 {
                p = u;
                f = fu;
                step = t;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Ok((p, f, iters))
}

/// Grid sweep followed by local ascent from the best grid points.
pub(crate) fn outer_maximize(
    obj: &Objective,
    resolution: usize,
    refine_starts: usize,
    ascent_max_iter: usize,
) -> Result<OuterOutcome> {
    let grid = simplex_grid(obj.input_dim(), resolution);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|p| obj.value(p))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..grid.len()).collect();
    // Stable sort keeps lexicographic grid order among ties.
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let grid_best = values[order[0]];

    let refined: Vec<(Vec<f64>, f64, usize)> = order
        .iter()
        .take(refine_starts.max(1))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&i| local_ascent(obj, &grid[i], values[i], ascent_max_iter))
        .collect::<Result<_>>()?;
    let mut best = (grid[order[0]].clone(), grid_best);
    let mut ascent_iterations = 0;
    for (p, f, it) in refined {
        ascent_iterations += it;
        if f > best.1 + 1e-13 {
            best = (p, f);
        }
    }
    Ok(OuterOutcome {
        p: best.0,
        raw: best.1,
        grid_best,
        grid_points: grid.len(),
        resolution,
        ascent_iterations,
    })
}

pub(crate) fn check_hypotheses(pair: &AvwcPair, opts: &CapacityOptions) -> Hypotheses {
    if !opts.check_hypotheses {
        return Hypotheses {
            strongly_degraded: None,
            best_eve_found: None,
            label: "formula value, hypotheses not checked".to_string(),
        };
    }
    let sd = is_strongly_degraded(pair, opts.hypothesis_grid, opts.tol)
        .ok()
        .map(|r| r.holds);
    let be = find_best_eavesdropper_channel(pair, opts.hypothesis_grid, opts.tol)
        .ok()
        .map(|b| b.is_some());
    let label = if sd == Some(true) && be == Some(true) {
        "hypotheses verified (grid)".to_string()
    } else {
        "formula value, hypotheses unverified".to_string()
    };
    Hypotheses {
        strongly_degraded: sd,
        best_eve_found: be,
        label,
    }
}

/// Assembles a result from an outer optimum, re-running the inner problems
/// with the bracketing grid enabled.
pub(crate) fn finish(
    obj: &Objective,
    outer: OuterOutcome,
    opts: &CapacityOptions,
    hypotheses: Hypotheses,
    scale: f64,
    prefix: Option<PrefixInfo>,
) -> Result<CapacityResult> {
    let final_inner = InnerOptions {
        check_grid: InnerOptions::default().check_grid,
        vertex_starts: true,
        ..opts.inner.clone()
    };
    let ev = obj.evaluate_with(&outer.p, &final_inner)?;
    let mut flags: Vec<String> = ev.legit.flags.clone();
    flags.extend(ev.eve.flags.iter().cloned());
    // The final check can only lower Bob's minimum; keep the optimum honest.
    let raw = ev.raw;
    if raw < outer.raw - 1e-9 {
        flags.push(format!(
            "final inner check lowered the objective by {:.3e}",
            outer.raw - raw
        ));
    }
    Ok(CapacityResult {
        value: (raw * scale).max(0.0),
        raw_difference: raw * scale,
        legit_value: ev.legit.value,
        eve_value: ev.eve.value,
        opt_input: Distribution::from_simplex_unchecked(outer.p),
        worst_legit: ev.legit.element,
        best_eve: ev.eve.element,
        mode: obj.mode,
        diagnostics: Diagnostics {
            grid_resolution: outer.resolution,
            grid_points: outer.grid_points,
            bracket: (outer.grid_best * scale, outer.raw.max(raw) * scale),
            ascent_iterations: outer.ascent_iterations,
            inner_iterations: ev.legit.iterations + ev.eve.iterations,
            legit_grid_value: ev.legit.grid_value,
            flags,
        },
        hypotheses,
        prefix,
    })
}

/// `max_P [min_W I(P;W) − max_V I(P;V)]` with the closures chosen by `mode`.
pub fn secrecy_capacity_single_letter(
    pair: &AvwcPair,
    mode: JammerMode,
    opts: &CapacityOptions,
) -> Result<CapacityResult> {
    let obj = Objective {
        legit: pair.legit(),
        eve: pair.eve(),
        mode,
        prefix: None,
        inner: &opts.inner,
    };
    let r = outer_resolution(pair.n_inputs(), opts.grid_resolution, OUTER_GRID_BUDGET);
    let outer = outer_maximize(&obj, r, opts.refine_starts, opts.ascent_max_iter)?;
    let hyp = check_hypotheses(pair, opts);
    finish(&obj, outer, opts, hyp, 1.0, None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub convex: CapacityResult,
    pub row_convex: CapacityResult,
    /// `C(convex) − C(row-convex)`; nonnegative up to optimizer error.
    pub gap: f64,
    pub ordering_holds: bool,
}

/// Both single-letter values and their ordering `C ≥ Ĉ`.
pub fn capacity_ordering_report(
    pair: &AvwcPair,
    opts: &CapacityOptions,
    tol: f64,
) -> Result<OrderingReport> {
    let convex = secrecy_capacity_single_letter(pair, JammerMode::NoSideInfo, opts)?;
    let row_convex = secrecy_capacity_single_letter(pair, JammerMode::InputKnown, opts)?;
    let gap = convex.value - row_convex.value;
    Ok(OrderingReport {
        ordering_holds: gap >= -tol,
        gap,
        convex,
        row_convex,
    })
}
