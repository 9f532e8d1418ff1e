//! Classical capacities of depolarizing channels and of two memory channels
//! built from them: a periodic channel and a convex combination of memoryless
//! channels. Closed-form capacities are checked against an independent
//! multi-start ensemble optimizer, including two-use entangled searches that
//! probe additivity.

pub mod capacity;
pub mod channels;
pub mod cli;
pub mod error;
pub mod holevo;
pub mod optimize;
pub mod quantum;
pub mod random;

pub use error::{Error, Result};
