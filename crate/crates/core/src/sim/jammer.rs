//! Jammer policies and exact or sampled decoding-error evaluation.

use rand::Rng;

use super::decode::{DecodingTable, TypicalityOracle};
use super::ensemble::{rng_for, CodebookEnsemble};
use super::sequences::{checked_power, EXACT_CAP};
use crate::channel::{AvwcPair, ChannelFamily};
use crate::error::{Error, Result};
use crate::simplex::{for_each_tuple, index_to_tuple};

/// What the jammer sees before choosing `s^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JammerKnowledge {
    /// One fixed `s^n` for every message and codebook.
    Oblivious,
    /// `s^n` may depend on the message pair `(j,l)`.
    MessageAware,
    /// `s^n` may depend on the transmitted codeword.
    InputAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JammerStrategy {
    /// Every state sequence; needs `|S|^n ≤ 4096`.
    Exhaustive,
    /// Three coordinate-ascent sweeps from the most damaging constant sequence.
    GreedyPerSymbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JammerPolicy {
    pub knowledge: JammerKnowledge,
    pub strategy: JammerStrategy,
}

pub const GREEDY_SWEEPS: usize = 3;

impl JammerPolicy {
    pub fn new(knowledge: JammerKnowledge, strategy: JammerStrategy) -> Self {
        Self {
            knowledge,
            strategy,
        }
    }

    pub fn check(&self, n_states: usize, n: usize) -> Result<()> {
        if self.strategy == JammerStrategy::Exhaustive {
            checked_power(
                n_states,
                n,
                EXACT_CAP,
                "exhaustive jammer (|S|^n)",
                "use the greedy jammer or a smaller blocklength",
            )?;
        }
        Ok(())
    }

    pub fn label(&self) -> &'static str {
        match (self.knowledge, self.strategy) {
            (JammerKnowledge::Oblivious, JammerStrategy::Exhaustive) => "oblivious",
            (JammerKnowledge::Oblivious, JammerStrategy::GreedyPerSymbol) => "oblivious-greedy",
            (JammerKnowledge::MessageAware, JammerStrategy::Exhaustive) => "messages",
            (JammerKnowledge::MessageAware, JammerStrategy::GreedyPerSymbol) => "messages-greedy",
            (JammerKnowledge::InputAware, JammerStrategy::Exhaustive) => "input-exhaustive",
            (JammerKnowledge::InputAware, JammerStrategy::GreedyPerSymbol) => "input-greedy",
        }
    }
}

/// Error probability of one `(u, slot)` under a given `s^n`.
pub(crate) enum Evaluator<'a> {
    /// Exact sums of `W^n` over the decoding regions.
    Exact {
        ensemble: &'a CodebookEnsemble,
        table: &'a DecodingTable,
        legit: &'a ChannelFamily,
    },
    /// Monte Carlo with common random numbers shared by every `s^n`.
    Sampled {
        ensemble: &'a CodebookEnsemble,
        legit: &'a ChannelFamily,
        uniforms: Vec<Vec<f64>>,
    },
}

impl<'a> Evaluator<'a> {
    pub fn exact(
        ensemble: &'a CodebookEnsemble,
        table: &'a DecodingTable,
        legit: &'a ChannelFamily,
    ) -> Self {
        Evaluator::Exact {
            ensemble,
            table,
            legit,
        }
    }

    pub fn sampled(
        ensemble: &'a CodebookEnsemble,
        legit: &'a ChannelFamily,
        samples: usize,
        seed: u64,
        stream: u64,
    ) -> Self {
        let mut rng = rng_for(seed, stream);
        let uniforms = (0..samples.max(1))
            .map(|_| (0..ensemble.n).map(|_| rng.gen::<f64>()).collect())
            .collect();
        Evaluator::Sampled {
            ensemble,
            legit,
            uniforms,
        }
    }

    pub fn ensemble(&self) -> &CodebookEnsemble {
        match self {
            Evaluator::Exact { ensemble, .. } | Evaluator::Sampled { ensemble, .. } => ensemble,
        }
    }

    fn legit(&self) -> &ChannelFamily {
        match self {
            Evaluator::Exact { legit, .. } | Evaluator::Sampled { legit, .. } => legit,
        }
    }

    pub fn samples(&self) -> Option<usize> {
        match self {
            Evaluator::Exact { .. } => None,
            Evaluator::Sampled { uniforms, .. } => Some(uniforms.len()),
        }
    }

    /// `W^n(D^c_{u,slot} | x_{u,slot}, s^n)`.
    pub fn error(&self, u: usize, slot: usize, s: &[usize]) -> f64 {
        let e = self.ensemble();
        let x = &e.codebook(u)[slot];
        let legit = self.legit();
        match self {
            Evaluator::Exact { table, .. } => {
                let region = table.region(u, slot);
                let (n, ny) = (e.n, legit.n_out());
                let mut y = vec![0usize; n];
                let mut success = 0.0;
                for &yi in region {
                    index_to_tuple(yi as usize, ny, n, &mut y);
                    let mut p = 1.0;
                    for i in 0..n {
                        p *= legit.prob(x[i], s[i], y[i]);
                    }
                    success += p;
                }
                (1.0 - success).clamp(0.0, 1.0)
            }
            Evaluator::Sampled { uniforms, .. } => {
                let mut oracle = TypicalityOracle::new(legit, e.n, e.delta);
                let book = e.codebook(u);
                let mut failures = 0usize;
                let mut y = vec![0usize; e.n];
                for us in uniforms {
                    for i in 0..e.n {
                        y[i] = inverse_cdf(legit.state(s[i]).row(x[i]), us[i]);
                    }
                    let ok = oracle.contains(x, &y)
                        && book
                            .iter()
                            .enumerate()
                            .all(|(k, other)| k == slot || !oracle.contains(other, &y));
                    failures += (!ok) as usize;
                }
                failures as f64 / uniforms.len() as f64
            }
        }
    }

    /// Error for every `s^n` in lexicographic order.
    pub fn profile(&self, u: usize, slot: usize) -> Vec<f64> {
        let e = self.ensemble();
        let legit = self.legit();
        let ns = legit.n_states();
        match self {
            Evaluator::Exact { table, .. } => {
                let region = table.region(u, slot);
                let total = ns.pow(e.n as u32);
                if region.is_empty() {
                    return vec![1.0; total];
                }
                let x = &e.codebook(u)[slot];
                let (n, ny) = (e.n, legit.n_out());
                let ys: Vec<Vec<usize>> = region
                    .iter()
                    .map(|&yi| {
                        let mut y = vec![0; n];
                        index_to_tuple(yi as usize, ny, n, &mut y);
                        y
                    })
                    .collect();
                let mut out = Vec::with_capacity(total);
                let mut partial = vec![vec![1.0; ys.len()]; n + 1];
                profile_rec(0, n, ns, x, &ys, legit, &mut partial, &mut out);
                out
            }
            Evaluator::Sampled { .. } => {
                let mut out = Vec::new();
                for_each_tuple(ns, e.n, |s| out.push(self.error(u, slot, s)));
                out
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn profile_rec(
    i: usize,
    n: usize,
    ns: usize,
    x: &[usize],
    ys: &[Vec<usize>],
    legit: &ChannelFamily,
    partial: &mut [Vec<f64>],
    out: &mut Vec<f64>,
) {
    if i == n {
        let success: f64 = partial[n].iter().sum();
        out.push((1.0 - success).clamp(0.0, 1.0));
        return;
    }
    for s in 0..ns {
        let (head, tail) = partial.split_at_mut(i + 1);
        let (prev, next) = (&head[i], &mut tail[0]);
        for (k, y) in ys.iter().enumerate() {
            next[k] = prev[k] * legit.prob(x[i], s, y[i]);
        }
        profile_rec(i + 1, n, ns, x, ys, legit, partial, out);
    }
}

fn inverse_cdf(row: &[f64], r: f64) -> usize {
    let mut acc = 0.0;
    for (b, &w) in row.iter().enumerate() {
        acc += w;
        if r < acc {
            return b;
        }
    }
    row.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// A weighted set of `(u, slot)` targets the jammer attacks with one `s^n`.
pub(crate) type Targets = Vec<(f64, usize, usize)>;

fn objective(ev: &Evaluator, targets: &Targets, s: &[usize]) -> f64 {
    targets
        .iter()
        .map(|&(w, u, slot)| w * ev.error(u, slot, s))
        .sum()
}

/// Best `s^n` against `targets` and the error it achieves. Ties go to the
/// lexicographically first sequence.
pub(crate) fn best_response(
    ev: &Evaluator,
    targets: &Targets,
    strategy: JammerStrategy,
) -> (Vec<usize>, f64) {
    let e = ev.ensemble();
    let ns = ev.legit().n_states();
    let n = e.n;
    match strategy {
        JammerStrategy::Exhaustive => {
            let total = ns.pow(n as u32);
            let mut acc = vec![0.0; total];
            for &(w, u, slot) in targets {
                for (a, p) in acc.iter_mut().zip(ev.profile(u, slot)) {
                    *a += w * p;
                }
            }
            let (mut best_i, mut best_v) = (0, f64::NEG_INFINITY);
            for (i, &v) in acc.iter().enumerate() {
                if v > best_v + 1e-15 {
                    best_i = i;
                    best_v = v;
                }
            }
            let mut s = vec![0; n];
            index_to_tuple(best_i, ns, n, &mut s);
            (s, best_v)
        }
        JammerStrategy::GreedyPerSymbol => {
            let mut best = (vec![0; n], f64::NEG_INFINITY);
            for c in 0..ns {
                let s = vec![c; n];
                let v = objective(ev, targets, &s);
                if v > best.1 + 1e-15 {
                    best = (s, v);
                }
            }
            let (mut s, mut v) = best;
            for _ in 0..GREEDY_SWEEPS {
                let mut changed = false;
                for i in 0..n {
                    let original = s[i];
                    let mut best_c = original;
                    for c in 0..ns {
                        if c == original {
                            continue;
                        }
                        s[i] = c;
                        let t = objective(ev, targets, &s);
                        if t > v + 1e-15 {
                            v = t;
                            best_c = c;
                        }
                    }
                    s[i] = best_c;
                    changed |= best_c != original;
                }
                if !changed {
                    break;
                }
            }
            (s, v)
        }
    }
}

/// The jammer's best `s^n` for message pair `target = (j,l)`.
///
/// The objective is `Σ_u u_law[u] · W^n(D^c_{u,j,l} | x_{u,j,l}, s^n)`. For an
/// input-aware jammer every codebook with positive weight must carry `x_seq`
/// at `(j,l)`; other policies ignore `x_seq`.
#[allow(clippy::too_many_arguments)]
pub fn jammer_best_response(
    x_seq: &[usize],
    ensemble: &CodebookEnsemble,
    table: &DecodingTable,
    u_law: &[f64],
    pair: &AvwcPair,
    policy: &JammerPolicy,
    target: (usize, usize),
) -> Result<Vec<usize>> {
    policy.check(pair.n_states(), ensemble.n)?;
    if u_law.len() != ensemble.u {
        return Err(Error::DimensionMismatch {
            expected: ensemble.u,
            got: u_law.len(),
            context: "codebook law vs ensemble size",
        });
    }
    let slot = target.0 * ensemble.l + target.1;
    if policy.knowledge == JammerKnowledge::InputAware {
        for (u, &w) in u_law.iter().enumerate() {
            if w > 0.0 && ensemble.codebook(u)[slot] != x_seq {
                return Err(Error::Precondition(format!(
                    "codebook {u} does not send the given codeword for {target:?}"
                )));
            }
        }
    }
    let ev = Evaluator::exact(ensemble, table, pair.legit());
    let targets: Targets = match policy.knowledge {
        JammerKnowledge::Oblivious => {
            let m = ensemble.messages() as f64;
            u_law
                .iter()
                .enumerate()
                .flat_map(|(u, &w)| (0..ensemble.messages()).map(move |k| (w / m, u, k)))
                .collect()
        }
        _ => u_law
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(u, &w)| (w, u, slot))
            .collect(),
    };
    Ok(best_response(&ev, &targets, policy.strategy).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{Distribution, StochasticMatrix};
    use crate::sim::generate_ensemble;

    fn m(rows: &[&[f64]]) -> StochasticMatrix {
        StochasticMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn single_state_jammer_sends_zeros() {
        let w = m(&[&[0.9, 0.1], &[0.1, 0.9]]);
        let pair = AvwcPair::from_matrices(vec![w.clone()], vec![w]).unwrap();
        let p = Distribution::uniform(2);
        let e = generate_ensemble(&pair, &p, 4, 2, 1, 2, 0.3, 1).unwrap();
        let t = DecodingTable::build(&e, pair.legit()).unwrap();
        for strategy in [JammerStrategy::Exhaustive, JammerStrategy::GreedyPerSymbol] {
            let pol = JammerPolicy::new(JammerKnowledge::MessageAware, strategy);
            let s = jammer_best_response(&[], &e, &t, &[0.5, 0.5], &pair, &pol, (0, 0)).unwrap();
            assert_eq!(s, vec![0; 4]);
        }
    }

    #[test]
    fn damaging_state_is_chosen_at_n1() {
        // State 0 is clean, state 1 flips with probability 0.4. At n = 1 and
        // δ = 0.55 each decoding region is {x}: |1 − 0.4| ≥ δ rules out flips.
        let clean = StochasticMatrix::identity(2);
        let noisy = m(&[&[0.6, 0.4], &[0.4, 0.6]]);
        let pair = AvwcPair::from_matrices(vec![clean.clone(), noisy], vec![clean.clone(), clean])
            .unwrap();
        let p = Distribution::uniform(2);
        let e = generate_ensemble(&pair, &p, 1, 2, 1, 1, 0.55, 0).unwrap();
        let t = DecodingTable::build(&e, pair.legit()).unwrap();
        let ev = Evaluator::exact(&e, &t, pair.legit());
        assert!(ev.error(0, 0, &[0]).abs() < 1e-15);
        assert!((ev.error(0, 0, &[1]) - 0.4).abs() < 1e-12);
        let pol = JammerPolicy::new(JammerKnowledge::InputAware, JammerStrategy::Exhaustive);
        let x = e.codeword(0, 0, 0).to_vec();
        let s = jammer_best_response(&x, &e, &t, &[1.0], &pair, &pol, (0, 0)).unwrap();
        assert_eq!(s, vec![1]);
    }

    #[test]
    fn exhaustive_cap() {
        let pol = JammerPolicy::new(JammerKnowledge::InputAware, JammerStrategy::Exhaustive);
        assert!(matches!(pol.check(2, 20), Err(Error::CapExceeded { .. })));
        assert!(pol.check(2, 12).is_ok());
    }

    #[test]
    fn profile_matches_pointwise_errors() {
        let w0 = m(&[&[0.8, 0.2], &[0.3, 0.7]]);
        let w1 = m(&[&[0.6, 0.4], &[0.1, 0.9]]);
        let pair = AvwcPair::from_matrices(vec![w0.clone(), w1.clone()], vec![w0, w1]).unwrap();
        let p = Distribution::uniform(2);
        let e = generate_ensemble(&pair, &p, 4, 2, 1, 2, 0.35, 4).unwrap();
        let t = DecodingTable::build(&e, pair.legit()).unwrap();
        let ev = Evaluator::exact(&e, &t, pair.legit());
        let prof = ev.profile(1, 1);
        let mut k = 0;
        for_each_tuple(2, 4, |s| {
            assert!((prof[k] - ev.error(1, 1, s)).abs() < 1e-14);
            k += 1;
        });
    }
}
