//! Inner optimizations of `I(P; ·)` over a channel closure.
//!
//! `I(P;W)` is convex in `W` for fixed `P`, so Bob's worst channel may sit in
//! the interior of the closure (solved by projected gradient descent) while
//! Eve's best channel is always a vertex (solved by enumeration).
//!
//! Both routines optionally compose the closure with a prefix channel
//! `ρ: Ψ → X` on the left, i.e. they optimize `I(P_Ψ; ρ·W_θ)`. With `ρ`
//! absent the composite is the closure channel itself.

use crate::channel::{
    check_vertex_cap, closure_vertices, convex_effective, row_convex_into, ChannelFamily,
    ClosureElement, ClosureKind, ClosureWeights, DEFAULT_VERTEX_CAP,
};
use crate::error::{check_dim, Result};
use crate::prob::{mi_channel_gradient, mutual_information_raw, Distribution, StochasticMatrix};
use crate::simplex::{pow_f64, project_onto_simplex, simplex_grid, simplex_grid_size};

#[derive(Debug, Clone, PartialEq)]
pub struct InnerOptions {
    pub max_iter: usize,
    /// Stop once a step improves the objective by less than this fraction.
    pub rel_tol: f64,
    pub vertex_cap: usize,
    /// Also start the descent from every closure vertex. The problem is
    /// convex, so the barycenter start alone reaches the minimum value; the
    /// vertex starts only settle ties between equally good weights.
    pub vertex_starts: bool,
    /// Resolution of the grid used to bracket the descent result, if any.
    pub check_grid: Option<usize>,
    /// Largest grid the bracket check may enumerate.
    pub grid_cap: f64,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            rel_tol: 1e-9,
            vertex_cap: DEFAULT_VERTEX_CAP,
            vertex_starts: true,
            check_grid: Some(64),
            grid_cap: 1.0e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerOutcome {
    pub value: f64,
    pub element: ClosureElement,
    /// Descent or ascent steps summed over all starts.
    pub iterations: usize,
    pub converged: bool,
    /// Best value on the bracketing grid, when it was evaluated.
    pub grid_value: Option<f64>,
    pub flags: Vec<String>,
}

/// `min_{W ∈ closure} I(P;W)`.
pub fn inner_min_legit(
    p: &Distribution,
    family: &ChannelFamily,
    kind: ClosureKind,
) -> Result<(f64, ClosureElement)> {
    let o = inner_min_with(p, family, kind, None, &InnerOptions::default())?;
    Ok((o.value, o.element))
}

/// `max_{V ∈ closure} I(P;V)`.
pub fn inner_max_eve(
    p: &Distribution,
    family: &ChannelFamily,
    kind: ClosureKind,
) -> Result<(f64, ClosureElement)> {
    let o = inner_max_with(p, family, kind, None, &InnerOptions::default())?;
    Ok((o.value, o.element))
}

/// Weight parametrization of a closure plus scratch buffers.
struct Problem<'a> {
    family: &'a ChannelFamily,
    kind: ClosureKind,
    prefix: Option<&'a StochasticMatrix>,
    p: &'a [f64],
    eff: Vec<f64>,
    comp: Vec<f64>,
    g_comp: Vec<f64>,
    g_eff: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(
        p: &'a Distribution,
        family: &'a ChannelFamily,
        kind: ClosureKind,
        prefix: Option<&'a StochasticMatrix>,
    ) -> Result<Self> {
        let n_src = match prefix {
            Some(rho) => {
                check_dim(family.n_in(), rho.n_out(), "prefix output vs channel input")?;
                rho.n_in()
            }
            None => family.n_in(),
        };
        check_dim(n_src, p.len(), "input law vs channel input")?;
        let (nx, ny) = (family.n_in(), family.n_out());
        Ok(Self {
            family,
            kind,
            prefix,
            p: p.probs(),
            eff: vec![0.0; nx * ny],
            comp: vec![0.0; n_src * ny],
            g_comp: vec![0.0; n_src * ny],
            g_eff: vec![0.0; nx * ny],
        })
    }

    fn dim(&self) -> usize {
        match self.kind {
            ClosureKind::Convex => self.family.n_states(),
            ClosureKind::RowConvex => self.family.n_in() * self.family.n_states(),
        }
    }

    fn barycenter(&self) -> Vec<f64> {
        let ns = self.family.n_states();
        vec![1.0 / ns as f64; self.dim()]
    }

    fn set_weights(&mut self, w: &[f64]) {
        match self.kind {
            ClosureKind::Convex => {
                self.eff
                    .copy_from_slice(convex_effective(self.family, w).as_slice());
            }
            ClosureKind::RowConvex => row_convex_into(self.family, w, &mut self.eff),
        }
        let ny = self.family.n_out();
        if let Some(rho) = self.prefix {
            compose(rho, &self.eff, ny, &mut self.comp);
        } else {
            self.comp.copy_from_slice(&self.eff);
        }
    }

    fn value(&mut self, w: &[f64]) -> f64 {
        self.set_weights(w);
        mutual_information_raw(self.p, &self.comp, self.family.n_out())
    }

    /// Objective and gradient with respect to the weights.
    fn value_grad(&mut self, w: &[f64], grad: &mut [f64]) -> f64 {
        let v = self.value(w);
        let (nx, ny, ns) = (
            self.family.n_in(),
            self.family.n_out(),
            self.family.n_states(),
        );
        mi_channel_gradient(self.p, &self.comp, ny, &mut self.g_comp);
        match self.prefix {
            Some(rho) => {
                self.g_eff.iter_mut().for_each(|g| *g = 0.0);
                for psi in 0..rho.n_in() {
                    let gr = &self.g_comp[psi * ny..(psi + 1) * ny];
                    for (x, &r) in rho.row(psi).iter().enumerate() {
                        if r == 0.0 {
                            continue;
                        }
                        for (ge, &g) in self.g_eff[x * ny..(x + 1) * ny].iter_mut().zip(gr) {
                            *ge += r * g;
                        }
                    }
                }
            }
            None => self.g_eff.copy_from_slice(&self.g_comp),
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        for s in 0..ns {
            let ws = self.family.state(s);
            for x in 0..nx {
                let d: f64 = ws
                    .row(x)
                    .iter()
                    .zip(&self.g_eff[x * ny..(x + 1) * ny])
                    .map(|(a, b)| a * b)
                    .sum();
                match self.kind {
                    ClosureKind::Convex => grad[s] += d,
                    ClosureKind::RowConvex => grad[x * ns + s] = d,
                }
            }
        }
        v
    }

    fn project(&self, w: &mut [f64]) {
        match self.kind {
            ClosureKind::Convex => project_onto_simplex(w),
            ClosureKind::RowConvex => w
                .chunks_mut(self.family.n_states())
                .for_each(project_onto_simplex),
        }
    }

    fn element(&self, w: &[f64]) -> ClosureElement {
        let (nx, ns) = (self.family.n_in(), self.family.n_states());
        match self.kind {
            ClosureKind::Convex => ClosureElement {
                weights: ClosureWeights::Convex(Distribution::from_simplex_unchecked(w.to_vec())),
                effective: convex_effective(self.family, w),
            },
            ClosureKind::RowConvex => {
                let mut eff = vec![0.0; nx * self.family.n_out()];
                row_convex_into(self.family, w, &mut eff);
                ClosureElement {
                    weights: ClosureWeights::RowConvex(StochasticMatrix::from_flat_unchecked(
                        nx,
                        ns,
                        w.to_vec(),
                    )),
                    effective: StochasticMatrix::from_flat_unchecked(nx, self.family.n_out(), eff),
                }
            }
        }
    }

    fn vertex_weights(&self, cap: usize) -> Result<Vec<Vec<f64>>> {
        Ok(closure_vertices(self.family, self.kind, cap)?
            .iter()
            .map(ClosureElement::weight_vector)
            .collect())
    }

    fn grid_points(&self, resolution: usize) -> Vec<Vec<f64>> {
        let (nx, ns) = (self.family.n_in(), self.family.n_states());
        match self.kind {
            ClosureKind::Convex => simplex_grid(ns, resolution),
            ClosureKind::RowConvex => {
                let rows = simplex_grid(ns, resolution);
                let mut out = Vec::new();
                crate::simplex::for_each_tuple(rows.len(), nx, |t| {
                    out.push(t.iter().flat_map(|&i| rows[i].iter().copied()).collect());
                });
                out
            }
        }
    }

    fn grid_size(&self, resolution: usize) -> f64 {
        let (nx, ns) = (self.family.n_in(), self.family.n_states());
        let one = simplex_grid_size(ns, resolution);
        match self.kind {
            ClosureKind::Convex => one,
            ClosureKind::RowConvex => pow_f64(one as usize, nx),
        }
    }
}

/// `(ρ·E)(y|ψ) = Σ_x ρ(x|ψ) E(y|x)`.
fn compose(rho: &StochasticMatrix, eff: &[f64], ny: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for psi in 0..rho.n_in() {
        let o = &mut out[psi * ny..(psi + 1) * ny];
        for (x, &r) in rho.row(psi).iter().enumerate() {
            if r == 0.0 {
                continue;
            }
            for (d, &e) in o.iter_mut().zip(&eff[x * ny..(x + 1) * ny]) {
                *d += r * e;
            }
        }
    }
}

/// `a` is better than `b` for a minimization with lexicographic tie-break.
fn better_min(a: (f64, &[f64]), b: (f64, &[f64])) -> bool {
    const TIE: f64 = 1e-12;
    if a.0 < b.0 - TIE {
        return true;
    }
    if a.0 > b.0 + TIE {
        return false;
    }
    a.1.iter()
        .zip(b.1)
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x < y)
}

struct Descent {
    value: f64,
    weights: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Projected gradient with Armijo backtracking. `sign` is `1` to minimize and
/// `-1` to maximize.
fn projected_descent(prob: &mut Problem, start: &[f64], sign: f64, opts: &InnerOptions) -> Descent {
    let n = start.len();
    let mut w = start.to_vec();
    prob.project(&mut w);
    let mut grad = vec![0.0; n];
    let mut f = sign * prob.value_grad(&w, &mut grad);
    let mut step = {
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax > 0.0 {
            1.0 / gmax
        } else {
            1.0
        }
    };
    let mut trial = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut accepted = false;
        let mut t = step * 2.0;
        while t > 1e-18 {
            // Step along -∇(sign·f).
            for i in 0..n {
                trial[i] = w[i] - t * sign * grad[i];
            }
            prob.project(&mut trial);
            let decrease: f64 = trial
                .iter()
                .zip(&w)
                .zip(&grad)
                .map(|((a, b), g)| sign * g * (a - b))
                .sum();
            let ft = sign * prob.value(&trial);
            if ft <= f + 1e-4 * decrease && ft < f {
                let improvement = f - ft;
                std::mem::swap(&mut w, &mut trial);
                let scale = f.abs().max(ft.abs()).max(1e-12);
                f = ft;
                step = t;
                accepted = true;
                if improvement < opts.rel_tol * scale {
                    converged = true;
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // No descent direction left at machine precision: a stationary
            // point of the projected problem.
            converged = true;
        }
        if converged {
            break;
        }
        f = sign * prob.value_grad(&w, &mut grad);
    }
    Descent {
        value: sign * f,
        weights: w,
        iterations,
        converged,
    }
}

/// Minimization with explicit options and an optional prefix channel.
pub fn inner_min_with(
    p: &Distribution,
    family: &ChannelFamily,
    kind: ClosureKind,
    prefix: Option<&StochasticMatrix>,
    opts: &InnerOptions,
) -> Result<InnerOutcome> {
    let mut prob = Problem::new(p, family, kind, prefix)?;
    let mut flags = Vec::new();

    if family.n_states() == 1 {
        let w = vec![1.0; prob.dim()];
        let value = prob.value(&w);
        return Ok(InnerOutcome {
            value,
            element: prob.element(&w),
            iterations: 0,
            converged: true,
            grid_value: None,
            flags,
        });
    }

    let mut starts = if !opts.vertex_starts {
        Vec::new()
    } else {
        match prob.vertex_weights(opts.vertex_cap) {
            Ok(v) => v,
            Err(_) => {
                flags.push("vertex starts skipped: cap exceeded".to_string());
                Vec::new()
            }
        }
    };
    starts.push(prob.barycenter());

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut converged = true;
    for s in &starts {
        let d = projected_descent(&mut prob, s, 1.0, opts);
        iterations += d.iterations;
        converged &= d.converged;
        let replace = match &best {
            None => true,
            Some((bv, bw)) => better_min((d.value, &d.weights), (*bv, bw)),
        };
        if replace {
            best = Some((d.value, d.weights));
        }
    }
    if !converged {
        flags.push(format!(
            "inner minimization hit {} iterations without converging",
            opts.max_iter
        ));
    }
    let (mut value, mut weights) = best.expect("at least the barycenter start");

    let mut grid_value = None;
    if let Some(r) = opts.check_grid {
        if prob.grid_size(r) <= opts.grid_cap {
            let mut gbest: Option<(f64, Vec<f64>)> = None;
            for g in prob.grid_points(r) {
                let v = prob.value(&g);
                if gbest.as_ref().is_none_or(|(bv, _)| v < *bv) {
                    gbest = Some((v, g));
                }
            }
            let (gv, gw) = gbest.expect("grid is nonempty");
            grid_value = Some(gv);
            if gv < value - 1e-9 {
                flags.push(format!(
                    "grid point beat descent by {:.3e}; restarted from it",
                    value - gv
                ));
                let d = projected_descent(&mut prob, &gw, 1.0, opts);
                iterations += d.iterations;
                if d.value < gv {
                    value = d.value;
                    weights = d.weights;
                } else {
                    value = gv;
                    weights = gw;
                }
            }
        } else {
            flags.push(format!("bracket grid 1/{r} skipped: too large"));
        }
    }

    Ok(InnerOutcome {
        value,
        element: prob.element(&weights),
        iterations,
        converged,
        grid_value,
        flags,
    })
}

/// Maximization with explicit options and an optional prefix channel.
///
/// Enumerates closure vertices; if there are too many, falls back to
/// multi-start projected ascent and flags the result.
pub fn inner_max_with(
    p: &Distribution,
    family: &ChannelFamily,
    kind: ClosureKind,
    prefix: Option<&StochasticMatrix>,
    opts: &InnerOptions,
) -> Result<InnerOutcome> {
    let mut prob = Problem::new(p, family, kind, prefix)?;
    let enumerable = match kind {
        ClosureKind::Convex => true,
        ClosureKind::RowConvex => check_vertex_cap(family, opts.vertex_cap).is_ok(),
    };
    if enumerable {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for w in prob.vertex_weights(opts.vertex_cap)? {
            let v = prob.value(&w);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, w));
            }
        }
        let (value, w) = best.expect("closure has at least one vertex");
        return Ok(InnerOutcome {
            value,
            element: prob.element(&w),
            iterations: 0,
            converged: true,
            grid_value: None,
            flags: Vec::new(),
        });
    }

    // Fallback: ascent from the pure-state selections and the barycenter.
    let ns = family.n_states();
    let nx = family.n_in();
    let mut starts: Vec<Vec<f64>> = (0..ns)
        .map(|s| {
            let mut w = vec![0.0; nx * ns];
            (0..nx).for_each(|x| w[x * ns + s] = 1.0);
            w
        })
        .collect();
    starts.push(prob.barycenter());
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut converged = true;
    for s in &starts {
        let d = projected_descent(&mut prob, s, -1.0, opts);
        iterations += d.iterations;
        converged &= d.converged;
        if best.as_ref().is_none_or(|(bv, _)| d.value > *bv) {
            best = Some((d.value, d.weights));
        }
    }
    let (value, w) = best.expect("nonempty starts");
    Ok(InnerOutcome {
        value,
        element: prob.element(&w),
        iterations,
        converged,
        grid_value: None,
        flags: vec!["vertex cap exceeded: projected ascent fallback".to_string()],
    })
}
