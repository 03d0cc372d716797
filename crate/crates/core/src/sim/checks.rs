//! Desk checks of two facts the achievability argument leans on: stochastic
//! jammers are no stronger than deterministic ones, and a random typical
//! codeword rarely captures another codeword's output.

use rand::Rng;

use super::decode::{DecodingTable, TypicalityOracle};
use super::ensemble::{rng_for, CodebookEnsemble};
use super::estimate::{leakage_from_laws, mean_half_width};
use super::jammer::Evaluator;
use super::sequences::{checked_power, product_law, typical_set, EXACT_CAP};
use crate::capacity::inner_min_legit;
use crate::channel::{AvwcPair, ClosureKind};
use crate::error::{check_dim, Error, Result};
use crate::prob::Distribution;
use crate::simplex::{for_each_tuple, index_to_tuple, simplex_grid, tuple_to_index};

/// Grid points per stochastic-map row the equivalence check accepts.
pub const MAX_ROW_GRID: usize = 100_000;
/// Deterministic maps the leakage enumeration accepts.
pub const MAX_DETERMINISTIC_MAPS: usize = 1_000_000;
const ASCENT_STARTS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub n: usize,
    /// Worst error over codebooks, messages and deterministic `f: X^n → S^n`.
    pub deterministic_error: f64,
    /// Worst leakage over codebooks and deterministic maps.
    pub deterministic_leakage: f64,
    /// Grid denominators, ascending.
    pub resolutions: Vec<usize>,
    /// Exact maximum error over each stochastic-map grid.
    pub grid_error: Vec<f64>,
    /// Best leakage found on each grid (multi-start coordinate ascent).
    pub grid_leakage: Vec<f64>,
    /// Deterministic maxima dominate every grid value (within 1e-12).
    pub dominates: bool,
    /// Largest gap between a deterministic maximum and the finest grid.
    pub finest_gap: f64,
}

/// Compares worst-case error and leakage under deterministic jammer maps
/// `f: X^n → S^n` against stochastic maps `θ(s^n | x^n)` restricted to
/// simplex grids.
///
/// Error is linear in each row of `θ`, so the grid maximum is computed
/// exactly. Leakage is convex in the channel, and the grid is searched by
/// coordinate ascent over rows from the barycenter and seeded random starts.
/// Only rows for codewords that occur in a codebook influence either value.
pub fn deterministic_map_equivalence_check(
    pair: &AvwcPair,
    ensemble: &CodebookEnsemble,
    resolutions: &[usize],
    seed: u64,
) -> Result<EquivalenceReport> {
    let n = ensemble.n;
    if n > 4 || pair.n_inputs() > 3 || pair.n_states() > 3 {
        return Err(Error::Precondition(
            "equivalence check needs n <= 4 and alphabets of size <= 3".to_string(),
        ));
    }
    check_dim(
        pair.n_inputs(),
        ensemble.input.len(),
        "ensemble input vs pair",
    )?;
    let ns = pair.n_states();
    let n_seq = checked_power(ns, n, EXACT_CAP, "state sequences (|S|^n)", "")?;
    let nz = pair.n_eve_outputs();
    checked_power(
        nz,
        n,
        EXACT_CAP,
        "exact leakage (|Z|^n)",
        "use a smaller blocklength",
    )?;
    let mut resolutions = resolutions.to_vec();
    resolutions.sort_unstable();
    resolutions.dedup();
    for &r in &resolutions {
        let size = crate::simplex::simplex_grid_size(n_seq, r);
        if r == 0 || size > MAX_ROW_GRID as f64 {
            return Err(Error::CapExceeded {
                what: "stochastic-map row grid",
                needed: size,
                cap: MAX_ROW_GRID as f64,
                hint: "use a coarser resolution",
            });
        }
    }

    let table = DecodingTable::build(ensemble, pair.legit())?;
    let ev = Evaluator::exact(ensemble, &table, pair.legit());
    let profiles: Vec<Vec<Vec<f64>>> = (0..ensemble.u)
        .map(|u| (0..ensemble.messages()).map(|k| ev.profile(u, k)).collect())
        .collect();
    let deterministic_error = profiles
        .iter()
        .flatten()
        .flat_map(|p| p.iter().copied())
        .fold(0.0, f64::max);

    // Eve's output law for every (x^n, s^n).
    let nx = pair.n_inputs();
    let n_x = nx.pow(n as u32);
    let eve = pair.eve();
    let mut laws = vec![Vec::new(); n_x * n_seq];
    let mut s = vec![0; n];
    for_each_tuple(nx, n, |x| {
        let xi = tuple_to_index(x, nx);
        for si in 0..n_seq {
            index_to_tuple(si, ns, n, &mut s);
            laws[xi * n_seq + si] = product_law(n, nz, |i| eve.state(s[i]).row(x[i]));
        }
    });

    let books: Vec<Book> = (0..ensemble.u)
        .map(|u| Book::new(ensemble, u, nx))
        .collect();
    let mut deterministic_leakage = 0.0f64;
    for b in &books {
        let maps = checked_power(
            n_seq,
            b.rows.len(),
            MAX_DETERMINISTIC_MAPS,
            "deterministic jammer maps",
            "use fewer distinct codewords",
        )?;
        let mut choice = vec![0; b.rows.len()];
        for m in 0..maps {
            index_to_tuple(m, n_seq, b.rows.len(), &mut choice);
            let theta: Vec<Vec<f64>> = choice
                .iter()
                .map(|&c| {
                    let mut r = vec![0.0; n_seq];
                    r[c] = 1.0;
                    r
                })
                .collect();
            deterministic_leakage =
                deterministic_leakage.max(b.leakage(&theta, &laws, n_seq, ensemble));
        }
    }

    let mut grid_error = Vec::new();
    let mut grid_leakage = Vec::new();
    for &r in &resolutions {
        let grid = simplex_grid(n_seq, r);
        let e = profiles
            .iter()
            .flatten()
            .map(|p| {
                grid.iter()
                    .map(|g| g.iter().zip(p).map(|(a, b)| a * b).sum::<f64>())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        grid_error.push(e.clamp(0.0, 1.0));
        let mut best = 0.0f64;
        for (u, b) in books.iter().enumerate() {
            best = best.max(b.grid_ascent(
                &grid,
                &laws,
                n_seq,
                ensemble,
                seed ^ (u as u64) ^ ((r as u64) << 32),
            ));
        }
        grid_leakage.push(best);
    }

    let dominates = grid_error.iter().all(|&g| g <= deterministic_error + 1e-12)
        && grid_leakage
            .iter()
            .all(|&g| g <= deterministic_leakage + 1e-12);
    let finest_gap = match (grid_error.last(), grid_leakage.last()) {
        (Some(&e), Some(&l)) => (deterministic_error - e).max(deterministic_leakage - l),
        _ => 0.0,
    };
    Ok(EquivalenceReport {
        n,
        deterministic_error,
        deterministic_leakage,
        resolutions,
        grid_error,
        grid_leakage,
        dominates,
        finest_gap,
    })
}

/// One codebook with its distinct codewords as the free rows of `θ`.
struct Book {
    /// Lexicographic index of each distinct codeword.
    rows: Vec<usize>,
    /// For each message slot, the position of its codeword in `rows`.
    slot_row: Vec<usize>,
}

impl Book {
    fn new(e: &CodebookEnsemble, u: usize, nx: usize) -> Self {
        let mut rows = Vec::new();
        let slot_row = e
            .codebook(u)
            .iter()
            .map(|x| {
                let xi = tuple_to_index(x, nx);
                match rows.iter().position(|&r| r == xi) {
                    Some(k) => k,
                    None => {
                        rows.push(xi);
                        rows.len() - 1
                    }
                }
            })
            .collect();
        Self { rows, slot_row }
    }

    fn leakage(
        &self,
        theta: &[Vec<f64>],
        laws: &[Vec<f64>],
        n_seq: usize,
        e: &CodebookEnsemble,
    ) -> f64 {
        let mixed: Vec<Vec<f64>> = self
            .rows
            .iter()
            .zip(theta)
            .map(|(&xi, t)| {
                let mut out = vec![0.0; laws[0].len()];
                for (si, &w) in t.iter().enumerate() {
                    if w > 0.0 {
                        for (o, &l) in out.iter_mut().zip(&laws[xi * n_seq + si]) {
                            *o += w * l;
                        }
                    }
                }
                out
            })
            .collect();
        let per_slot: Vec<Vec<f64>> = self.slot_row.iter().map(|&k| mixed[k].clone()).collect();
        leakage_from_laws(&per_slot, e.j, e.l)
    }

    fn grid_ascent(
        &self,
        grid: &[Vec<f64>],
        laws: &[Vec<f64>],
        n_seq: usize,
        e: &CodebookEnsemble,
        seed: u64,
    ) -> f64 {
        let k = self.rows.len();
        let mut rng = rng_for(seed, 0);
        // Barycenter rounded onto the grid is the middle grid point for
        // symmetric grids; use the point nearest to uniform instead.
        let centre = grid
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let d = |g: &Vec<f64>| {
                    g.iter()
                        .map(|v| (v - 1.0 / n_seq as f64).powi(2))
                        .sum::<f64>()
                };
                d(a.1).partial_cmp(&d(b.1)).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut best = f64::NEG_INFINITY;
        for start in 0..ASCENT_STARTS {
            let mut idx: Vec<usize> = if start == 0 {
                vec![centre; k]
            } else {
                (0..k).map(|_| rng.gen_range(0..grid.len())).collect()
            };
            let theta_of = |idx: &[usize]| idx.iter().map(|&i| grid[i].clone()).collect::<Vec<_>>();
            let mut value = self.leakage(&theta_of(&idx), laws, n_seq, e);
            loop {
                let mut improved = false;
                for row in 0..k {
                    for g in 0..grid.len() {
                        if g == idx[row] {
                            continue;
                        }
                        let old = idx[row];
                        idx[row] = g;
                        let v = self.leakage(&theta_of(&idx), laws, n_seq, e);
                        if v > value + 1e-13 {
                            value = v;
                            improved = true;
                        } else {
                            idx[row] = old;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            best = best.max(value);
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionReport {
    pub n: usize,
    pub delta: f64,
    pub slack: f64,
    pub trials: usize,
    pub seed: u64,
    /// Mean over trials of `E_{X′}[W^n(D′(X′) | x^n, s^n)]`.
    pub estimate: f64,
    pub half_width: f64,
    /// `min I(P;W)` over the row-convex closure of the legitimate family.
    pub min_information: f64,
    /// `2^{-n(min I − slack)}`.
    pub bound: f64,
    pub satisfied: bool,
    /// `estimate / bound`.
    pub ratio: f64,
}

/// Probability that the output of a transmitted typical codeword lands in the
/// decoding set `D′(X′)` of an independent codeword `X′`, uniform on the
/// typical set.
///
/// Each trial draws `x^n` uniformly from the typical set and `s^n` uniformly;
/// the expectation over `X′` and the sum over `y^n` are exact.
pub fn collision_bound_check(
    pair: &AvwcPair,
    input: &Distribution,
    n: usize,
    delta: f64,
    slack: f64,
    trials: usize,
    seed: u64,
) -> Result<CollisionReport> {
    check_dim(pair.n_inputs(), input.len(), "input law vs channel input")?;
    if trials == 0 || n == 0 || delta.is_nan() || delta <= 0.0 {
        return Err(Error::Precondition(
            "collision check needs n, trials >= 1 and delta > 0".to_string(),
        ));
    }
    let legit = pair.legit();
    let ny = legit.n_out();
    let size = checked_power(
        ny,
        n,
        EXACT_CAP,
        "exact collision sum (|Y|^n)",
        "use a smaller blocklength",
    )?;
    let typical = typical_set(input.probs(), n, delta)?;
    if typical.is_empty() {
        return Err(Error::TypicalityRejection {
            attempts: 0,
            n,
            delta,
        });
    }

    // coverage[y] = Pr_{X′}[y ∈ D′(X′)]
    let mut oracle = TypicalityOracle::new(legit, n, delta);
    let mut coverage = vec![0.0; size];
    let mut y = vec![0; n];
    let weight = 1.0 / typical.len() as f64;
    for x in &typical {
        for (yi, c) in coverage.iter_mut().enumerate() {
            index_to_tuple(yi, ny, n, &mut y);
            if oracle.contains(x, &y) {
                *c += weight;
            }
        }
    }

    let ns = legit.n_states();
    let values: Vec<f64> = (0..trials as u64)
        .map(|t| {
            let mut rng = rng_for(seed, t);
            let x = &typical[rng.gen_range(0..typical.len())];
            let s: Vec<usize> = (0..n).map(|_| rng.gen_range(0..ns)).collect();
            let law = product_law(n, ny, |i| legit.state(s[i]).row(x[i]));
            law.iter().zip(&coverage).map(|(a, b)| a * b).sum()
        })
        .collect();
    let (estimate, half_width) = mean_half_width(&values);
    let (min_information, _) = inner_min_legit(input, legit, ClosureKind::RowConvex)?;
    let bound = 2f64.powf(-(n as f64) * (min_information - slack));
    Ok(CollisionReport {
        n,
        delta,
        slack,
        trials,
        seed,
        estimate,
        half_width,
        min_information,
        bound,
        satisfied: estimate <= bound,
        ratio: estimate / bound,
    })
}
