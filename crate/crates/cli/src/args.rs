//! Command-line grammar.

use avwc_core::capacity::JammerMode;
use avwc_core::channel::DEFAULT_DEGRADED_TOL;
use avwc_core::sim::{
    JammerKnowledge, JammerPolicy, JammerStrategy, DEFAULT_CODEBOOKS, DEFAULT_NOISE_SAMPLES,
    DEFAULT_TAU,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{CapacityArgs, Command, PrefixKind, RunConfig, SimulateArgs};

#[derive(Debug, Parser)]
#[command(
    name = "avwc",
    version,
    about = "Secrecy capacity and code simulation for arbitrarily varying wiretap channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Channel file (JSON), or `example_sec5` for the bundled example
    pub channel: String,
    /// Grid resolution (degradedness grid for analyze, input grid otherwise)
    #[arg(long)]
    pub grid: Option<usize>,
    /// Degradedness tolerance
    #[arg(long, default_value_t = DEFAULT_DEGRADED_TOL)]
    pub tol: f64,
    /// Write CSV here (`-` for stdout, which moves the report to stderr)
    #[arg(long)]
    pub csv: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Closure sizes, strong degradedness and the best eavesdropper channel
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Single-letter secrecy capacity, or a k-letter lower bound
    Capacity {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
        /// Same as `--mode all`
        #[arg(long, conflicts_with = "mode")]
        all_modes: bool,
        /// Block length of the prefix bound
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Prefix alphabet size (optimized prefix only)
        #[arg(long)]
        psi: Option<usize>,
        #[arg(long, value_enum)]
        prefix: Option<PrefixArg>,
    },
    /// Monte-Carlo study of random codes against a jammer
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Blocklengths, comma separated
        #[arg(long = "n", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        /// Secret-message rate in bits per symbol
        #[arg(long)]
        rate: f64,
        #[arg(long, value_enum, default_value_t = JammerArg::InputGreedy)]
        jammer: JammerArg,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Typicality slack (default depends on n)
        #[arg(long)]
        delta: Option<f64>,
        /// Number of codebooks (common-randomness values)
        #[arg(long, default_value_t = DEFAULT_CODEBOOKS)]
        u: usize,
        /// Secret messages (default from the rate)
        #[arg(long)]
        j: Option<usize>,
        /// Confusing messages per secret (default from Eve's rate)
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
        /// Noise draws per codeword when the output space is too large to sum
        #[arg(long, default_value_t = DEFAULT_NOISE_SAMPLES)]
        noise_samples: usize,
        #[arg(long)]
        force_sampling: bool,
        /// Input law, comma separated (default: the optimizer of the matching mode)
        #[arg(long)]
        input: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    None,
    Messages,
    InputKnown,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrefixArg {
    Identity,
    Optimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JammerArg {
    Oblivious,
    Messages,
    InputGreedy,
    InputExhaustive,
}

impl From<JammerArg> for JammerPolicy {
    fn from(j: JammerArg) -> Self {
        use JammerKnowledge::*;
        use JammerStrategy::*;
        match j {
            JammerArg::Oblivious => JammerPolicy::new(Oblivious, Exhaustive),
            JammerArg::Messages => JammerPolicy::new(MessageAware, Exhaustive),
            JammerArg::InputGreedy => JammerPolicy::new(InputAware, GreedyPerSymbol),
            JammerArg::InputExhaustive => JammerPolicy::new(InputAware, Exhaustive),
        }
    }
}

impl Cli {
    /// The run configuration plus the CSV destination.
    pub fn into_config(self) -> (RunConfig, Option<String>) {
        let (common, command) = match self.command {
            Sub::Analyze { common } => (common, Command::Analyze),
            Sub::Capacity {
                common,
                mode,
                all_modes,
                k,
                psi,
                prefix,
            } => {
                let mode = if all_modes { ModeArg::All } else { mode };
                let modes = match mode {
                    ModeArg::None => vec![JammerMode::NoSideInfo],
                    ModeArg::Messages => vec![JammerMode::MessagesOnly],
                    ModeArg::InputKnown => vec![JammerMode::InputKnown],
                    ModeArg::All => JammerMode::ALL.to_vec(),
                };
                let prefix = prefix.map(|p| match p {
                    PrefixArg::Identity => PrefixKind::Identity,
                    PrefixArg::Optimized => PrefixKind::Optimized,
                });
                (
                    common,
                    Command::Capacity(CapacityArgs {
                        modes,
                        k,
                        psi,
                        prefix,
                    }),
                )
            }
            Sub::Simulate {
                common,
                ns,
                rate,
                jammer,
                trials,
                seed,
                delta,
                u,
                j,
                l,
                tau,
                noise_samples,
                force_sampling,
                input,
            } => (
                common,
                Command::Simulate(SimulateArgs {
                    ns,
                    rate,
                    jammer: jammer.into(),
                    trials,
                    seed,
                    delta,
                    u,
                    j,
                    l,
                    tau,
                    noise_samples,
                    force_sampling,
                    input,
                }),
            ),
        };
        let config = RunConfig {
            channel: common.channel,
            grid: common.grid,
            tol: common.tol,
            command,
        };
        (config, common.csv)
    }
}
