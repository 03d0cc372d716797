//! Secrecy-capacity expressions for the three jammer-knowledge modes.

mod inner;
mod prefix;
mod single;

pub use inner::{
    inner_max_eve, inner_max_with, inner_min_legit, inner_min_with, InnerOptions, InnerOutcome,
};
pub use prefix::{secrecy_capacity_multi_letter_bound, PrefixSpec, MAX_BLOCK_INPUTS};
pub use single::{
    capacity_ordering_report, secrecy_capacity_single_letter, CapacityOptions, CapacityResult,
    Diagnostics, Hypotheses, OrderingReport, PrefixInfo, OUTER_GRID_BUDGET,
};

use crate::channel::ClosureKind;

/// What the jammer knows when choosing the state sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JammerMode {
    NoSideInfo,
    MessagesOnly,
    /// Non-causal knowledge of the channel input.
    InputKnown,
}

impl JammerMode {
    pub const ALL: [JammerMode; 3] = [
        JammerMode::NoSideInfo,
        JammerMode::MessagesOnly,
        JammerMode::InputKnown,
    ];

    /// Closure both inner problems range over.
    pub fn closure_kind(self) -> ClosureKind {
        match self {
            JammerMode::NoSideInfo | JammerMode::MessagesOnly => ClosureKind::Convex,
            JammerMode::InputKnown => ClosureKind::RowConvex,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            JammerMode::NoSideInfo => "none",
            JammerMode::MessagesOnly => "messages",
            JammerMode::InputKnown => "input-known",
        }
    }
}

impl std::fmt::Display for JammerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
