use avwc_core::capacity::JammerMode;
use avwc_core::channel::DEFAULT_DEGRADED_TOL;
use avwc_core::sim::{JammerPolicy, DEFAULT_CODEBOOKS, DEFAULT_NOISE_SAMPLES, DEFAULT_TAU};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Path to a channel file, or the bundled example's name.
    pub channel: String,
    /// Analyze: degradedness grid. Capacity and simulate: outer input grid.
    pub grid: Option<usize>,
    pub tol: f64,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Analyze,
    Capacity(CapacityArgs),
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixKind {
    Identity,
    Optimized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityArgs {
    pub modes: Vec<JammerMode>,
    pub k: usize,
    pub psi: Option<usize>,
    /// `None` with `k = 1` and no `psi` means the single-letter formula.
    pub prefix: Option<PrefixKind>,
}

impl Default for CapacityArgs {
    fn default() -> Self {
        Self {
            modes: JammerMode::ALL.to_vec(),
            k: 1,
            psi: None,
            prefix: None,
        }
    }
}

impl CapacityArgs {
    pub fn multi_letter(&self) -> bool {
        self.k > 1 || self.psi.is_some() || self.prefix.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateArgs {
    pub ns: Vec<usize>,
    pub rate: f64,
    pub jammer: JammerPolicy,
    pub trials: usize,
    pub seed: u64,
    pub delta: Option<f64>,
    pub u: usize,
    pub j: Option<usize>,
    pub l: Option<usize>,
    pub tau: f64,
    pub noise_samples: usize,
    pub force_sampling: bool,
    /// Comma-separated input law; defaults to the optimizer of the matching mode.
    pub input: Option<String>,
}

impl SimulateArgs {
    pub fn new(ns: Vec<usize>, rate: f64, jammer: JammerPolicy) -> Self {
        Self {
            ns,
            rate,
            jammer,
            trials: 5,
            seed: 0,
            delta: None,
            u: DEFAULT_CODEBOOKS,
            j: None,
            l: None,
            tau: DEFAULT_TAU,
            noise_samples: DEFAULT_NOISE_SAMPLES,
            force_sampling: false,
            input: None,
        }
    }
}

impl RunConfig {
    pub fn new(channel: impl Into<String>, command: Command) -> Self {
        Self {
            channel: channel.into(),
            grid: None,
            tol: DEFAULT_DEGRADED_TOL,
            command,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if self.grid == Some(0) {
            return bad("--grid must be at least 1".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("--tol must lie in (0, 1), got {}", self.tol));
        }
        match &self.command {
            Command::Analyze => {}
            Command::Capacity(c) => {
                if c.modes.is_empty() {
                    return bad("no capacity mode selected".into());
                }
                if c.k == 0 {
                    return bad("--k must be at least 1".into());
                }
                if let Some(psi) = c.psi {
                    if psi < 2 {
                        return bad("--psi must be at least 2".into());
                    }
                    if c.prefix == Some(PrefixKind::Identity) {
                        return bad("--psi cannot be combined with the identity prefix".into());
                    }
                }
            }
            Command::Simulate(s) => {
                if s.ns.is_empty() || s.ns.contains(&0) {
                    return bad("--n needs one or more positive blocklengths".into());
                }
                if !(s.rate.is_finite() && s.rate >= 0.0) {
                    return bad(format!(
                        "--rate must be a non-negative number, got {}",
                        s.rate
                    ));
                }
                if s.trials == 0 || s.u == 0 || s.noise_samples == 0 {
                    return bad("--trials, --u and --noise-samples must be positive".into());
                }
                if s.j == Some(0) || s.l == Some(0) {
                    return bad("--j and --l must be positive".into());
                }
                if let Some(d) = s.delta {
                    if !(d > 0.0 && d < 1.0) {
                        return bad(format!("--delta must lie in (0, 1), got {d}"));
                    }
                }
                if !(s.tau.is_finite() && s.tau >= 0.0) {
                    return bad(format!("--tau must be non-negative, got {}", s.tau));
                }
            }
        }
        Ok(())
    }
}

/// Capacity mode whose jammer matches a simulation policy.
pub fn mode_for(policy: &JammerPolicy) -> JammerMode {
    use avwc_core::sim::JammerKnowledge::*;
    match policy.knowledge {
        Oblivious => JammerMode::NoSideInfo,
        MessageAware => JammerMode::MessagesOnly,
        InputAware => JammerMode::InputKnown,
    }
}
