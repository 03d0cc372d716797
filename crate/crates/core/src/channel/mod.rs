//! AVWC pairs, channel closures, and degradedness tests.

mod closure;
mod degraded;
mod family;

pub use closure::{
    closure_vertices, convex_vertices, mix_convex, mix_row_convex, row_convex_vertices,
    selection_element, ClosureElement, ClosureKind, ClosureWeights, DEFAULT_VERTEX_CAP,
};
pub use degraded::{
    dominates_all_vertices, find_best_eavesdropper_channel, is_degraded, is_strongly_degraded,
    DegradednessCertificate, FailingPair, StrongDegradednessReport, DEFAULT_DEGRADED_TOL,
    DEFAULT_GRID_RESOLUTION, DEFAULT_PAIR_CAP,
};
pub use family::{AvwcPair, ChannelFamily};

pub(crate) use closure::{check_vertex_cap, convex_effective, row_convex_into};
