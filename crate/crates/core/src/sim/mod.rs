//! Small-blocklength simulation of common-randomness wiretap codes under
//! adversarial jamming.

mod checks;
mod decode;
mod ensemble;
mod estimate;
mod jammer;
mod sequences;

pub use checks::{
    collision_bound_check, deterministic_map_equivalence_check, CollisionReport, EquivalenceReport,
    MAX_DETERMINISTIC_MAPS, MAX_ROW_GRID,
};
pub use decode::{decode, DecodingTable, TypicalityOracle};
pub use ensemble::{
    confusing_message_count, default_delta, generate_ensemble, generate_ensemble_on,
    secure_message_count, CellMode, CodebookEnsemble, DEFAULT_CODEBOOKS, DEFAULT_TAU,
    MAX_REJECTIONS,
};
pub use estimate::{
    estimate_leakage, estimate_max_error, sampled_max_error, simulate, simulate_blocklength,
    ErrorEstimate, SimConfig, SimRecord, SimReport, DEFAULT_NOISE_SAMPLES,
};
pub use jammer::{
    jammer_best_response, JammerKnowledge, JammerPolicy, JammerStrategy, GREEDY_SWEEPS,
};
pub use sequences::{typical_set, typical_set_size, EXACT_CAP};
