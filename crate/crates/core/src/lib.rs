pub mod capacity;
pub mod channel;
pub mod error;
pub mod lp;
pub mod prob;
pub mod sim;
pub mod simplex;

pub use error::{Error, Result};
pub use prob::{mutual_information, Distribution, StochasticMatrix};

// Compiles the guide's Rust snippets as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/probability.md")]
    mod probability {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/capacity.md")]
    mod capacity {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
}
