//! Finite-alphabet probability primitives. Logarithms are base 2 throughout.

mod distribution;
mod info;
mod matrix;
mod typical;

pub use distribution::{Distribution, PROB_TOLERANCE};
pub use info::{
    conditional_entropy, entropy, entropy_continuity_bound, mutual_information,
    output_distribution, variation_distance,
};
pub use matrix::StochasticMatrix;
pub use typical::{is_cond_typical, is_typical, sequence_type, SequenceType, TypicalityParams};

pub(crate) use info::{entropy_of, mi_channel_gradient, mutual_information_raw};
pub(crate) use typical::{joint_count_ok, type_is_typical};
