//! Finite-`k` lower bounds with a prefix channel `ρ: Ψ → X^k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::single::{
    check_hypotheses, finish, local_ascent, outer_maximize, outer_resolution, CapacityOptions,
    CapacityResult, Objective, OuterOutcome, PrefixInfo, OUTER_GRID_BUDGET,
};
use super::{secrecy_capacity_single_letter, JammerMode};
use crate::channel::AvwcPair;
use crate::error::{check_dim, Error, Result};
use crate::prob::StochasticMatrix;
use crate::simplex::{pow_f64, project_onto_simplex};

/// Largest `|X|^k` the multi-letter bound accepts.
pub const MAX_BLOCK_INPUTS: usize = 4096;
const RANDOM_STARTS: usize = 5;
const MAX_ROUNDS: usize = 30;
const ROUND_TOL: f64 = 1e-6;
/// Grid budget for the `P_Ψ` step of the random starts.
const START_GRID_BUDGET: f64 = 2_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSpec {
    pub k: usize,
    pub psi_card: usize,
    /// A fixed prefix channel, or `None` to optimize it.
    pub rho: Option<StochasticMatrix>,
}

impl PrefixSpec {
    /// Optimized prefix with the default `|Ψ| = |X|^k + 1`.
    pub fn optimized(k: usize, n_inputs: usize) -> Self {
        Self {
            k,
            psi_card: n_inputs.pow(k as u32) + 1,
            rho: None,
        }
    }

    /// `Ψ = X^k` with `ρ` the identity.
    pub fn identity(k: usize, n_inputs: usize) -> Self {
        let n = n_inputs.pow(k as u32);
        Self {
            k,
            psi_card: n,
            rho: Some(StochasticMatrix::identity(n)),
        }
    }
}

/// `(1/k) max_{P_Ψ, ρ} [min I(Ψ; Y^k) − max I(Ψ; Z^k)]` over the closures of
/// the `k`-letter extension. A lower bound on the multi-letter capacity for
/// this `k` and `|Ψ|`.
pub fn secrecy_capacity_multi_letter_bound(
    pair: &AvwcPair,
    spec: &PrefixSpec,
    mode: JammerMode,
    opts: &CapacityOptions,
) -> Result<CapacityResult> {
    if spec.k == 0 || spec.psi_card == 0 {
        return Err(Error::Precondition(
            "prefix needs k >= 1 and |Psi| >= 1".to_string(),
        ));
    }
    let block = pow_f64(pair.n_inputs(), spec.k);
    if block > MAX_BLOCK_INPUTS as f64 {
        return Err(Error::CapExceeded {
            what: "multi-letter block inputs (|X|^k)",
            needed: block,
            cap: MAX_BLOCK_INPUTS as f64,
            hint: "lower k",
        });
    }
    let block = block as usize;
    let legit = pair.legit().extension(spec.k);
    let eve = pair.eve().extension(spec.k);
    let scale = 1.0 / spec.k as f64;
    let hyp = check_hypotheses(pair, opts);

    if let Some(rho) = &spec.rho {
        check_dim(spec.psi_card, rho.n_in(), "prefix rows vs |Psi|")?;
        check_dim(block, rho.n_out(), "prefix columns vs |X|^k")?;
        let obj = Objective {
            legit: &legit,
            eve: &eve,
            mode,
            prefix: Some(rho),
            inner: &opts.inner,
        };
        let r = outer_resolution(spec.psi_card, opts.grid_resolution, OUTER_GRID_BUDGET);
        let outer = outer_maximize(&obj, r, opts.refine_starts, opts.ascent_max_iter)?;
        let info = PrefixInfo {
            k: spec.k,
            psi_card: spec.psi_card,
            rho: rho.clone(),
        };
        return finish(&obj, outer, opts, hyp, scale, Some(info)).map(|r| labeled(r, spec));
    }

    let starts = initial_points(pair, spec, block, mode, opts)?;
    let mut best: Option<(Vec<f64>, StochasticMatrix, f64, usize)> = None;
    for (p0, rho0, grid_p) in starts {
        let (p, rho, f, iters) =
            alternate(&legit, &eve, mode, opts, p0, rho0, grid_p, spec.psi_card)?;
        if best.as_ref().is_none_or(|b| f > b.2 + 1e-13) {
            best = Some((p, rho, f, iters));
        }
    }
    let (p, rho, f, iters) = best.expect("at least the identity start");
    let obj = Objective {
        legit: &legit,
        eve: &eve,
        mode,
        prefix: Some(&rho),
        inner: &opts.inner,
    };
    let outer = OuterOutcome {
        p,
        raw: f,
        grid_best: f,
        grid_points: 0,
        resolution: 0,
        ascent_iterations: iters,
    };
    let info = PrefixInfo {
        k: spec.k,
        psi_card: spec.psi_card,
        rho: rho.clone(),
    };
    finish(&obj, outer, opts, hyp, scale, Some(info)).map(|r| labeled(r, spec))
}

fn labeled(mut res: CapacityResult, spec: &PrefixSpec) -> CapacityResult {
    res.diagnostics.flags.push(format!(
        "finite-k lower bound (k={}, |Psi|={})",
        spec.k, spec.psi_card
    ));
    res
}

/// `(P_Ψ, ρ, pick P_Ψ from a grid)` starting points: the identity embedding of the
/// single-letter optimum, then seeded random prefixes.
fn initial_points(
    pair: &AvwcPair,
    spec: &PrefixSpec,
    block: usize,
    mode: JammerMode,
    opts: &CapacityOptions,
) -> Result<Vec<(Vec<f64>, StochasticMatrix, bool)>> {
    let psi = spec.psi_card;
    let mut out = Vec::new();

    if psi >= block {
        let single = secrecy_capacity_single_letter(
            pair,
            mode,
            &CapacityOptions {
                check_hypotheses: false,
                ..opts.clone()
            },
        )?;
        let p1 = single.opt_input.probs();
        let mut p = vec![0.0; psi];
        let mut digits = vec![0usize; spec.k];
        for (idx, slot) in p.iter_mut().enumerate().take(block) {
            crate::simplex::index_to_tuple(idx, pair.n_inputs(), spec.k, &mut digits);
            *slot = digits.iter().map(|&d| p1[d]).product();
        }
        let mut rows = vec![0.0; psi * block];
        for i in 0..psi {
            if i < block {
                rows[i * block + i] = 1.0;
            } else {
                rows[i * block..(i + 1) * block].fill(1.0 / block as f64);
            }
        }
        out.push((
            p,
            StochasticMatrix::from_flat_unchecked(psi, block, rows),
            false,
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..RANDOM_STARTS {
        let mut rows = Vec::with_capacity(psi * block);
        for _ in 0..psi {
            let w: Vec<f64> = (0..block)
                .map(|_| -rng.gen::<f64>().max(1e-300).ln())
                .collect();
            let s: f64 = w.iter().sum();
            rows.extend(w.into_iter().map(|v| v / s));
        }
        out.push((
            vec![1.0 / psi as f64; psi],
            StochasticMatrix::from_flat_unchecked(psi, block, rows),
            true,
        ));
    }
    Ok(out)
}

/// Alternates a `P_Ψ` ascent with a row-wise `ρ` ascent until a round
/// improves by less than `1e-6`.
#[allow(clippy::too_many_arguments)]
fn alternate(
    legit: &crate::channel::ChannelFamily,
    eve: &crate::channel::ChannelFamily,
    mode: JammerMode,
    opts: &CapacityOptions,
    mut p: Vec<f64>,
    mut rho: StochasticMatrix,
    grid_p: bool,
    psi: usize,
) -> Result<(Vec<f64>, StochasticMatrix, f64, usize)> {
    let inner = &opts.inner;
    let mut iters = 0;
    // Random starts pick P_Ψ from a coarse grid first.
    let mut f = if grid_p {
        let obj = Objective::new(legit, eve, mode, Some(&rho), inner);
        let r = outer_resolution(psi, None, START_GRID_BUDGET);
        let o = outer_maximize(&obj, r, 1, 0)?;
        p = o.p;
        o.raw
    } else {
        Objective::new(legit, eve, mode, Some(&rho), inner).value(&p)?
    };
    for _ in 0..MAX_ROUNDS {
        let before = f;
        let obj = Objective::new(legit, eve, mode, Some(&rho), inner);
        let (np, nf, it) = local_ascent(&obj, &p, f, opts.ascent_max_iter)?;
        iters += it;
        if nf > f {
            p = np;
            f = nf;
        }
        let (nrho, nf, it) = rho_ascent(legit, eve, mode, opts, &p, &rho, f)?;
        iters += it;
        if nf > f {
            rho = nrho;
            f = nf;
        }
        if f - before < ROUND_TOL {
            break;
        }
    }
    Ok((p, rho, f, iters))
}

/// Projected ascent on the rows of `ρ` that carry mass under `P_Ψ`.
fn rho_ascent(
    legit: &crate::channel::ChannelFamily,
    eve: &crate::channel::ChannelFamily,
    mode: JammerMode,
    opts: &CapacityOptions,
    p: &[f64],
    rho: &StochasticMatrix,
    f0: f64,
) -> Result<(StochasticMatrix, f64, usize)> {
    const H: f64 = 1e-5;
    let (psi, block) = (rho.n_in(), rho.n_out());
    let active: Vec<usize> = (0..psi).filter(|&i| p[i] > 0.0).collect();
    let eval = |data: &mut Vec<f64>| -> Result<f64> {
        for &i in &active {
            project_onto_simplex(&mut data[i * block..(i + 1) * block]);
        }
        let r = StochasticMatrix::from_flat_unchecked(psi, block, data.clone());
        Objective::new(legit, eve, mode, Some(&r), &opts.inner).value(p)
    };
    let mut cur = rho.as_slice().to_vec();
    let mut f = f0;
    let mut step = 0.05;
    let mut iters = 0;
    while iters < opts.ascent_max_iter {
        iters += 1;
        let mut g = vec![0.0; cur.len()];
        for &i in &active {
            for j in 0..block {
                let idx = i * block + j;
                let mut a = cur.clone();
                a[idx] += H;
                let mut b = cur.clone();
                b[idx] -= H;
                g[idx] = (eval(&mut a)? - eval(&mut b)?) / (2.0 * H);
            }
            let row = &mut g[i * block..(i + 1) * block];
            let mean = row.iter().sum::<f64>() / block as f64;
            row.iter_mut().for_each(|v| *v -= mean);
        }
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            break;
        }
        let mut t = step * 2.0;
        let mut moved = false;
        while t > 1e-9 {
            let mut u: Vec<f64> = cur.iter().zip(&g).map(|(a, b)| a + t * b / norm).collect();
            let fu = eval(&mut u)?;
            if fu > f + 1e-13 {
                cur = u;
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
    Ok((
        StochasticMatrix::from_flat_unchecked(psi, block, cur),
        f,
        iters,
    ))
}
