//! Common-randomness codebook ensembles drawn from the typical set.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sequences::typical_set_size;
use crate::channel::AvwcPair;
use crate::error::{check_dim, Error, Result};
use crate::prob::{type_is_typical, Distribution};

/// Attempts per codeword slot before giving up on typicality.
pub const MAX_REJECTIONS: usize = 100_000;
pub const DEFAULT_CODEBOOKS: usize = 8;
/// Margin added to the eavesdropper rate when sizing `L`.
pub const DEFAULT_TAU: f64 = 0.05;

/// How codeword cells relate across message pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellMode {
    /// Every sequence belongs to at most one `(j,l)` and appears once.
    Disjoint,
    /// Cells disjoint across `(j,l)`; a cell may repeat a sequence across
    /// codebooks because it has fewer than `U` members.
    DisjointRepeating,
    /// `J·L` exceeds the typical set; cells cannot be disjoint.
    Shared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodebookEnsemble {
    pub n: usize,
    pub j: usize,
    pub l: usize,
    pub u: usize,
    pub input: Distribution,
    pub delta: f64,
    pub seed: u64,
    pub stream: u64,
    pub cell_mode: CellMode,
    /// `|T^n_{P,δ}|`.
    pub typical_set_size: f64,
    codewords: Vec<Vec<usize>>,
}

impl CodebookEnsemble {
    pub fn codeword(&self, u: usize, j: usize, l: usize) -> &[usize] {
        &self.codewords[(u * self.j + j) * self.l + l]
    }

    /// Codewords of codebook `u`, indexed by `j·L + l`.
    pub fn codebook(&self, u: usize) -> &[Vec<usize>] {
        let m = self.j * self.l;
        &self.codewords[u * m..(u + 1) * m]
    }

    pub fn messages(&self) -> usize {
        self.j * self.l
    }

    pub fn note(&self) -> &'static str {
        match self.cell_mode {
            CellMode::Disjoint => "codewords drawn i.i.d. from P^n conditioned on typicality; disjoint cells, no repeats",
            CellMode::DisjointRepeating => "codewords drawn i.i.d. from P^n conditioned on typicality; disjoint cells, repeats across codebooks",
            CellMode::Shared => "codewords drawn i.i.d. from P^n conditioned on typicality; J*L exceeds the typical set, cells shared",
        }
    }
}

/// `δ = 0.1 · n^{-1/3}`.
pub fn default_delta(n: usize) -> f64 {
    0.1 * (n as f64).powf(-1.0 / 3.0)
}

/// `J = max(1, round(2^{nR}))`.
pub fn secure_message_count(n: usize, rate: f64) -> usize {
    (2f64.powf(n as f64 * rate).round() as usize).max(1)
}

/// `L = ⌈2^{n(I(P;V) + 3c′δ² + τ)}⌉` with `c′ = 1/(2 ln 2)`.
pub fn confusing_message_count(n: usize, eve_information: f64, delta: f64, tau: f64) -> usize {
    let c = 1.0 / (2.0 * std::f64::consts::LN_2);
    let exponent = n as f64 * (eve_information + 3.0 * c * delta * delta + tau);
    (2f64.powf(exponent).ceil() as usize).max(1)
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn draw_symbol(rng: &mut impl Rng, p: &[f64]) -> usize {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for (a, &pa) in p.iter().enumerate() {
        acc += pa;
        if r < acc {
            return a;
        }
    }
    // Rounding left r above the total; return the last supported symbol.
    p.iter().rposition(|&pa| pa > 0.0).unwrap_or(0)
}

/// Draws an ensemble with seed `seed` on substream 0.
#[allow(clippy::too_many_arguments)]
pub fn generate_ensemble(
    pair: &AvwcPair,
    input: &Distribution,
    n: usize,
    j: usize,
    l: usize,
    u: usize,
    delta: f64,
    seed: u64,
) -> Result<CodebookEnsemble> {
    generate_ensemble_on(pair, input, n, j, l, u, delta, seed, 0)
}

/// As [`generate_ensemble`], on an explicit PRNG substream.
#[allow(clippy::too_many_arguments)]
pub fn generate_ensemble_on(
    pair: &AvwcPair,
    input: &Distribution,
    n: usize,
    j: usize,
    l: usize,
    u: usize,
    delta: f64,
    seed: u64,
    stream: u64,
) -> Result<CodebookEnsemble> {
    check_dim(pair.n_inputs(), input.len(), "input law vs channel input")?;
    if n == 0 || j == 0 || l == 0 || u == 0 || delta.is_nan() || delta <= 0.0 {
        return Err(Error::Precondition(
            "ensemble needs n, J, L, U >= 1 and delta > 0".to_string(),
        ));
    }
    let p = input.probs();
    let t_size = typical_set_size(p, n, delta);
    if t_size == 0.0 {
        return Err(Error::TypicalityRejection {
            attempts: 0,
            n,
            delta,
        });
    }
    let messages = j * l;
    let cell_mode = if (messages * u) as f64 <= t_size {
        CellMode::Disjoint
    } else if messages as f64 <= t_size {
        CellMode::DisjointRepeating
    } else {
        CellMode::Shared
    };

    let mut rng = rng_for(seed, stream);
    let mut owner: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut codewords = Vec::with_capacity(messages * u);
    let mut counts = vec![0usize; p.len()];
    let mut x = vec![0usize; n];
    for _ in 0..u {
        for slot in 0..messages {
            let mut attempts = 0;
            loop {
                attempts += 1;
                if attempts > MAX_REJECTIONS {
                    return Err(Error::TypicalityRejection {
                        attempts: MAX_REJECTIONS,
                        n,
                        delta,
                    });
                }
                counts.iter_mut().for_each(|c| *c = 0);
                for xi in x.iter_mut() {
                    *xi = draw_symbol(&mut rng, p);
                    counts[*xi] += 1;
                }
                if !type_is_typical(&counts, p, n, delta) {
                    continue;
                }
                let ok = match (cell_mode, owner.get(&x)) {
                    (CellMode::Shared, _) | (_, None) => true,
                    (CellMode::DisjointRepeating, Some(&o)) => o == slot,
                    (CellMode::Disjoint, Some(_)) => false,
                };
                if ok {
                    break;
                }
            }
            if cell_mode != CellMode::Shared {
                owner.entry(x.clone()).or_insert(slot);
            }
            codewords.push(x.clone());
        }
    }
    Ok(CodebookEnsemble {
        n,
        j,
        l,
        u,
        input: input.clone(),
        delta,
        seed,
        stream,
        cell_mode,
        typical_set_size: t_size,
        codewords,
    })
}
