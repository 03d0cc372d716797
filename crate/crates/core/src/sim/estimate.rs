//! Maximum-error and leakage estimates, and the per-blocklength driver.

use rayon::prelude::*;

use super::decode::DecodingTable;
use super::ensemble::{
    confusing_message_count, default_delta, generate_ensemble_on, secure_message_count, CellMode,
    CodebookEnsemble, DEFAULT_CODEBOOKS, DEFAULT_TAU,
};
use super::jammer::{best_response, Evaluator, JammerKnowledge, JammerPolicy, Targets};
use super::sequences::{checked_power, product_law, EXACT_CAP};
use crate::channel::AvwcPair;
use crate::error::{check_dim, Error, Result};
use crate::prob::{entropy_of, mutual_information, Distribution, StochasticMatrix};

/// Noise samples per `(u, slot, s^n)` when `|Y|^n` is too large to sum.
pub const DEFAULT_NOISE_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    /// `max_{j,l}` of the policy's error criterion.
    pub value: f64,
    pub worst_message: (usize, usize),
    /// The state sequence achieving it (for input-aware jammers, against the
    /// worst codeword).
    pub worst_states: Vec<usize>,
    /// `None` when computed exactly; else the number of noise samples.
    pub noise_samples: Option<usize>,
}

/// Error of one ensemble under a jammer policy.
///
/// * input-aware: `max_{j,l} max_x max_s` of the error averaged over the
///   codebooks that send `x` for `(j,l)`;
/// * message-aware: `max_{j,l} max_s` of the error averaged over codebooks;
/// * oblivious: one `s` maximizing the error averaged over codebooks and
///   messages, then `max_{j,l}` at that `s`.
pub(crate) fn max_error_with(ev: &Evaluator, policy: &JammerPolicy) -> ErrorEstimate {
    let e = ev.ensemble();
    let m = e.messages();
    let wu = 1.0 / e.u as f64;

    let groups: Vec<((usize, usize), Targets)> = match policy.knowledge {
        JammerKnowledge::InputAware => {
            let mut out = Vec::new();
            for slot in 0..m {
                let mut by_x: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
                for u in 0..e.u {
                    let x = &e.codebook(u)[slot];
                    match by_x.iter_mut().find(|(k, _)| k == x) {
                        Some((_, us)) => us.push(u),
                        None => by_x.push((x.clone(), vec![u])),
                    }
                }
                for (_, us) in by_x {
                    let w = 1.0 / us.len() as f64;
                    out.push((
                        (slot / e.l, slot % e.l),
                        us.into_iter().map(|u| (w, u, slot)).collect(),
                    ));
                }
            }
            out
        }
        JammerKnowledge::MessageAware => (0..m)
            .map(|slot| {
                (
                    (slot / e.l, slot % e.l),
                    (0..e.u).map(|u| (wu, u, slot)).collect(),
                )
            })
            .collect(),
        JammerKnowledge::Oblivious => {
            let all: Targets = (0..e.u)
                .flat_map(|u| (0..m).map(move |slot| (wu / m as f64, u, slot)))
                .collect();
            let (s, _) = best_response(ev, &all, policy.strategy);
            let mut best = ErrorEstimate {
                value: f64::NEG_INFINITY,
                worst_message: (0, 0),
                worst_states: s.clone(),
                noise_samples: ev.samples(),
            };
            for slot in 0..m {
                let v: f64 = (0..e.u).map(|u| wu * ev.error(u, slot, &s)).sum();
                if v > best.value + 1e-15 {
                    best.value = v;
                    best.worst_message = (slot / e.l, slot % e.l);
                }
            }
            best.value = best.value.clamp(0.0, 1.0);
            return best;
        }
    };

    let mut best = ErrorEstimate {
        value: f64::NEG_INFINITY,
        worst_message: (0, 0),
        worst_states: Vec::new(),
        noise_samples: ev.samples(),
    };
    for (msg, targets) in groups {
        if best.value >= 1.0 {
            break;
        }
        let (s, v) = best_response(ev, &targets, policy.strategy);
        if v > best.value + 1e-15 {
            best = ErrorEstimate {
                value: v,
                worst_message: msg,
                worst_states: s,
                noise_samples: ev.samples(),
            };
        }
    }
    best.value = best.value.clamp(0.0, 1.0);
    best
}

/// Maximum error of `ensemble` under `policy`: exact when `|Y|^n ≤ 4096`,
/// otherwise Monte Carlo over `noise_samples` channel draws per state
/// sequence with common random numbers.
pub fn estimate_max_error(
    ensemble: &CodebookEnsemble,
    pair: &AvwcPair,
    policy: &JammerPolicy,
    noise_samples: usize,
    seed: u64,
) -> Result<ErrorEstimate> {
    policy.check(pair.n_states(), ensemble.n)?;
    if noise_samples == 0 {
        return Err(Error::Precondition("need at least one sample".to_string()));
    }
    let exact = checked_power(pair.n_legit_outputs(), ensemble.n, EXACT_CAP, "", "").is_ok();
    if exact {
        let table = DecodingTable::build(ensemble, pair.legit())?;
        Ok(max_error_with(
            &Evaluator::exact(ensemble, &table, pair.legit()),
            policy,
        ))
    } else {
        sampled_max_error(ensemble, pair, policy, noise_samples, seed)
    }
}

/// Always samples the channel, even when the exact sum is affordable.
pub fn sampled_max_error(
    ensemble: &CodebookEnsemble,
    pair: &AvwcPair,
    policy: &JammerPolicy,
    noise_samples: usize,
    seed: u64,
) -> Result<ErrorEstimate> {
    policy.check(pair.n_states(), ensemble.n)?;
    let ev = Evaluator::sampled(
        ensemble,
        pair.legit(),
        noise_samples,
        seed,
        (1 << 63) | ensemble.stream,
    );
    Ok(max_error_with(&ev, policy))
}

/// `I(J; Z^n)` for codebook `u`, uniform `J`, uniform `L` within each `j`,
/// and the eavesdropper channel `eve` used letterwise.
pub fn estimate_leakage(
    ensemble: &CodebookEnsemble,
    eve: &StochasticMatrix,
    u: usize,
) -> Result<f64> {
    check_dim(
        ensemble.input.len(),
        eve.n_in(),
        "eavesdropper channel input",
    )?;
    checked_power(
        eve.n_out(),
        ensemble.n,
        EXACT_CAP,
        "exact leakage (|Z|^n)",
        "use a smaller blocklength",
    )?;
    let laws: Vec<Vec<f64>> = ensemble
        .codebook(u)
        .iter()
        .map(|x| product_law(ensemble.n, eve.n_out(), |i| eve.row(x[i])))
        .collect();
    Ok(leakage_from_laws(&laws, ensemble.j, ensemble.l))
}

/// `I(J; Z)` from the output laws of each `(j,l)` slot (uniform `J` and `L`).
pub(crate) fn leakage_from_laws(laws: &[Vec<f64>], j: usize, l: usize) -> f64 {
    let size = laws[0].len();
    let mut total = vec![0.0; size];
    let mut cond = 0.0;
    for jj in 0..j {
        let mut pz = vec![0.0; size];
        for ll in 0..l {
            for (a, &b) in pz.iter_mut().zip(&laws[jj * l + ll]) {
                *a += b / l as f64;
            }
        }
        cond += entropy_of(&pz) / j as f64;
        for (a, &b) in total.iter_mut().zip(&pz) {
            *a += b / j as f64;
        }
    }
    (entropy_of(&total) - cond).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub rate: f64,
    /// Overrides `J = round(2^{nR})`.
    pub j: Option<usize>,
    /// Overrides the `L` sizing rule.
    pub l: Option<usize>,
    pub u: usize,
    /// Overrides `δ = 0.1 n^{-1/3}`.
    pub delta: Option<f64>,
    pub tau: f64,
    /// Independent ensemble draws per blocklength.
    pub trials: usize,
    pub seed: u64,
    pub policy: JammerPolicy,
    pub noise_samples: usize,
    /// Sample the channel even where exact sums are affordable.
    pub force_sampling: bool,
}

impl SimConfig {
    pub fn new(rate: f64, policy: JammerPolicy, trials: usize, seed: u64) -> Self {
        Self {
            rate,
            j: None,
            l: None,
            u: DEFAULT_CODEBOOKS,
            delta: None,
            tau: DEFAULT_TAU,
            trials,
            seed,
            policy,
            noise_samples: DEFAULT_NOISE_SAMPLES,
            force_sampling: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub n: usize,
    pub rate: f64,
    pub j: usize,
    pub l: usize,
    pub u: usize,
    pub delta: f64,
    pub seed: u64,
    pub policy: JammerPolicy,
    pub cell_mode: CellMode,
    pub exact_channel: bool,
    /// One maximum-error value per ensemble draw.
    pub errors: Vec<f64>,
    /// One leakage value (max over codebooks) per draw, when `|Z|^n` allows.
    pub leakages: Option<Vec<f64>>,
    pub error_mean: f64,
    pub error_median: f64,
    /// 95% normal half-width over draws.
    pub error_half_width: f64,
    pub leakage_mean: Option<f64>,
    pub leakage_half_width: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub input: Distribution,
    pub eve_channel: StochasticMatrix,
    pub eve_information: f64,
    pub records: Vec<SimRecord>,
}

pub(crate) fn mean_half_width(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    }
}

/// Runs `config.trials` ensemble draws at blocklength `n`.
///
/// `input` generates the codewords; `eve` (the eavesdropper's best channel)
/// sizes `L` and carries the leakage computation.
pub fn simulate_blocklength(
    pair: &AvwcPair,
    input: &Distribution,
    eve: &StochasticMatrix,
    n: usize,
    config: &SimConfig,
) -> Result<SimRecord> {
    if config.trials == 0 || config.u == 0 || n == 0 {
        return Err(Error::Precondition(
            "trials, codebooks and blocklength must be positive".to_string(),
        ));
    }
    config.policy.check(pair.n_states(), n)?;
    let delta = config.delta.unwrap_or_else(|| default_delta(n));
    let eve_info = mutual_information(input, eve)?;
    let j = config
        .j
        .unwrap_or_else(|| secure_message_count(n, config.rate));
    let l = config
        .l
        .unwrap_or_else(|| confusing_message_count(n, eve_info, delta, config.tau));
    let exact = !config.force_sampling
        && checked_power(pair.n_legit_outputs(), n, EXACT_CAP, "", "").is_ok();
    let leak_ok = checked_power(eve.n_out(), n, EXACT_CAP, "", "").is_ok();

    let per_trial: Vec<(f64, Option<f64>, CellMode)> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let stream = ((n as u64) << 32) | t as u64;
            let e =
                generate_ensemble_on(pair, input, n, j, l, config.u, delta, config.seed, stream)?;
            let err = if exact {
                let table = DecodingTable::build(&e, pair.legit())?;
                max_error_with(&Evaluator::exact(&e, &table, pair.legit()), &config.policy)
            } else {
                sampled_max_error(&e, pair, &config.policy, config.noise_samples, config.seed)?
            };
            let leak = if leak_ok {
                let mut worst = 0.0f64;
                for u in 0..e.u {
                    worst = worst.max(estimate_leakage(&e, eve, u)?);
                }
                Some(worst)
            } else {
                None
            };
            Ok((err.value, leak, e.cell_mode))
        })
        .collect::<Result<_>>()?;

    let errors: Vec<f64> = per_trial.iter().map(|t| t.0).collect();
    let leakages: Option<Vec<f64>> = per_trial.iter().map(|t| t.1).collect();
    let (error_mean, error_half_width) = mean_half_width(&errors);
    let (leakage_mean, leakage_half_width) = match &leakages {
        Some(v) => {
            let (m, h) = mean_half_width(v);
            (Some(m), Some(h))
        }
        None => (None, None),
    };
    // Cell mode depends only on sizes, so every draw agrees.
    let cell_mode = per_trial[0].2;
    let note = match cell_mode {
        CellMode::Disjoint => "typicality-conditioned i.i.d. codewords; disjoint cells",
        CellMode::DisjointRepeating => {
            "typicality-conditioned i.i.d. codewords; disjoint cells with repeats across codebooks"
        }
        CellMode::Shared => {
            "typicality-conditioned i.i.d. codewords; J*L exceeds the typical set, cells shared"
        }
    }
    .to_string();
    Ok(SimRecord {
        n,
        rate: config.rate,
        j,
        l,
        u: config.u,
        delta,
        seed: config.seed,
        policy: config.policy,
        cell_mode,
        exact_channel: exact,
        error_median: median(&errors),
        errors,
        leakages,
        error_mean,
        error_half_width,
        leakage_mean,
        leakage_half_width,
        note,
    })
}

/// [`simulate_blocklength`] for each `n`.
pub fn simulate(
    pair: &AvwcPair,
    input: &Distribution,
    eve: &StochasticMatrix,
    ns: &[usize],
    config: &SimConfig,
) -> Result<SimReport> {
    let records = ns
        .iter()
        .map(|&n| simulate_blocklength(pair, input, eve, n, config))
        .collect::<Result<_>>()?;
    Ok(SimReport {
        input: input.clone(),
        eve_channel: eve.clone(),
        eve_information: mutual_information(input, eve)?,
        records,
    })
}
