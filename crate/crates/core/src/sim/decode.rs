//! Decoding sets built from conditional typicality under some state sequence.
//!
//! `y^n ∈ D′(x^n)` iff `y^n ∈ T^n_{W,δ}(x^n, s^n)` for at least one `s^n`. The
//! condition only sees the joint counts `m(a,b,s)`, and it decouples over the
//! input symbol `a`, so instead of enumerating `|S|^n` sequences we search the
//! integer splits of each `N(a,b)` across states.

use std::collections::HashMap;

use super::ensemble::CodebookEnsemble;
use super::sequences::{checked_power, EXACT_CAP};
use crate::channel::{AvwcPair, ChannelFamily};
use crate::error::{check_dim, Result};
use crate::prob::joint_count_ok;
use crate::simplex::for_each_tuple;

/// Membership oracle for `D′(x^n)` with a per-input-symbol cache.
pub struct TypicalityOracle<'a> {
    family: &'a ChannelFamily,
    n: usize,
    n_delta: f64,
    cache: HashMap<(usize, Vec<usize>), bool>,
}

impl<'a> TypicalityOracle<'a> {
    pub fn new(family: &'a ChannelFamily, n: usize, delta: f64) -> Self {
        Self {
            family,
            n,
            n_delta: n as f64 * delta,
            cache: HashMap::new(),
        }
    }

    /// Is `y` conditionally typical with `x` under some state sequence?
    pub fn contains(&mut self, x: &[usize], y: &[usize]) -> bool {
        let (nx, ny) = (self.family.n_in(), self.family.n_out());
        let mut joint = vec![0usize; nx * ny];
        for (&a, &b) in x.iter().zip(y) {
            joint[a * ny + b] += 1;
        }
        (0..nx).all(|a| {
            let row = &joint[a * ny..(a + 1) * ny];
            if row.iter().all(|&c| c == 0) {
                return true;
            }
            let key = (a, row.to_vec());
            if let Some(&hit) = self.cache.get(&key) {
                return hit;
            }
            let ok = split_exists(self.family, a, row, self.n_delta);
            self.cache.insert(key, ok);
            ok
        })
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }
}

/// Is there an integer split `N(a,b) = Σ_s m(b,s)` such that every state's
/// slice is conditionally typical for row `a` of `W_s`?
fn split_exists(family: &ChannelFamily, a: usize, counts: &[usize], n_delta: f64) -> bool {
    let ns = family.n_states();
    let ny = counts.len();
    let mut m = vec![0usize; ny * ns];

    fn slice_ok(
        family: &ChannelFamily,
        a: usize,
        m: &[usize],
        ny: usize,
        ns: usize,
        nd: f64,
    ) -> bool {
        (0..ns).all(|s| {
            let na: usize = (0..ny).map(|b| m[b * ns + s]).sum();
            (0..ny).all(|b| joint_count_ok(m[b * ns + s], na, family.prob(a, s, b), nd))
        })
    }

    // Depth-first over output symbols b; at each, enumerate the split of
    // counts[b] into ns parts.
    fn rec(
        b: usize,
        family: &ChannelFamily,
        a: usize,
        counts: &[usize],
        m: &mut [usize],
        ns: usize,
        nd: f64,
    ) -> bool {
        let ny = counts.len();
        if b == ny {
            return slice_ok(family, a, m, ny, ns, nd);
        }
        let mut found = false;
        super::sequences::compositions(counts[b], ns, |parts| {
            if found {
                return;
            }
            // Zero clause prunes early.
            if parts
                .iter()
                .enumerate()
                .any(|(s, &c)| c > 0 && family.prob(a, s, b) == 0.0)
            {
                return;
            }
            m[b * ns..(b + 1) * ns].copy_from_slice(parts);
            if rec(b + 1, family, a, counts, m, ns, nd) {
                found = true;
            }
        });
        found
    }

    rec(0, family, a, counts, &mut m, ns, n_delta)
}

/// Decoding regions of one ensemble: for each codebook and message slot the
/// set of `y^n` (as lexicographic indices) decoded to it.
pub struct DecodingTable {
    pub n: usize,
    pub n_out: usize,
    /// `regions[u][slot]`, sorted ascending.
    pub regions: Vec<Vec<Vec<u32>>>,
}

impl DecodingTable {
    pub fn build(ensemble: &CodebookEnsemble, legit: &ChannelFamily) -> Result<Self> {
        let n = ensemble.n;
        let ny = legit.n_out();
        let size = checked_power(
            ny,
            n,
            EXACT_CAP,
            "exact decoding table (|Y|^n)",
            "use a smaller blocklength",
        )?;
        let mut oracle = TypicalityOracle::new(legit, n, ensemble.delta);
        let mut ys = Vec::with_capacity(size);
        for_each_tuple(ny, n, |t| ys.push(t.to_vec()));

        let mut dprime: HashMap<Vec<usize>, Vec<bool>> = HashMap::new();
        let mut regions = Vec::with_capacity(ensemble.u);
        for u in 0..ensemble.u {
            let book = ensemble.codebook(u);
            let mut hits = vec![0u32; size];
            for x in book {
                let set = dprime
                    .entry(x.clone())
                    .or_insert_with(|| ys.iter().map(|y| oracle.contains(x, y)).collect());
                for (h, &inside) in hits.iter_mut().zip(set.iter()) {
                    *h += inside as u32;
                }
            }
            let per_slot = book
                .iter()
                .map(|x| {
                    let set = &dprime[x];
                    (0..size as u32)
                        .filter(|&y| set[y as usize] && hits[y as usize] == 1)
                        .collect()
                })
                .collect();
            regions.push(per_slot);
        }
        Ok(Self {
            n,
            n_out: ny,
            regions,
        })
    }

    pub fn region(&self, u: usize, slot: usize) -> &[u32] {
        &self.regions[u][slot]
    }
}

/// Decodes `y` with codebook `u`: the unique `(j,l)` whose codeword has `y`
/// in its typicality set, or `None` when no or several codewords qualify.
pub fn decode(
    y: &[usize],
    ensemble: &CodebookEnsemble,
    u: usize,
    pair: &AvwcPair,
    delta: f64,
) -> Result<Option<(usize, usize)>> {
    check_dim(ensemble.n, y.len(), "received sequence vs blocklength")?;
    let mut oracle = TypicalityOracle::new(pair.legit(), ensemble.n, delta);
    let mut found = None;
    for (slot, x) in ensemble.codebook(u).iter().enumerate() {
        if oracle.contains(x, y) {
            if found.is_some() {
                return Ok(None);
            }
            found = Some((slot / ensemble.l, slot % ensemble.l));
        }
    }
    Ok(found)
}
