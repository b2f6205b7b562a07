//! Local search for 0-1 programs with 0-1 constraint matrices.
//!
//! The solver handles rows of the form `sum_{j in N_i} x_j (<=|>=|=) b_i` with
//! arbitrary real costs, which covers set covering and set partitioning as
//! special cases. The search works on a penalized objective in which every
//! constraint violation is charged a per-row weight, and combines:
//!
//! * constant-time 1-flip gains backed by incrementally maintained caches
//!   ([`eval`]),
//! * a lazily built k-nearest-neighbor list over columns ranked by support
//!   overlap ([`neighbor`]),
//! * a 4-flip neighborhood local search walking that graph ([`search`]),
//! * an outer loop that adapts the penalty weights ([`weighting`]).
//!
//! The crate is `no_std` and only needs `alloc`. Wall-clock time is supplied
//! by the caller through the [`Budget`] trait.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod budget;
pub mod eval;
pub mod instance;
pub mod neighbor;
pub mod oracle;
pub mod search;
pub mod weighting;

#[cfg(test)]
pub(crate) mod testutil;

pub use budget::{Budget, CheckLimit, Unlimited};
pub use eval::{EvalError, PenaltyWeights, SearchState, Tolerance};
pub use instance::{Instance, InstanceError, Sense, Solution, Validation};
pub use neighbor::NeighborList;
pub use search::{fnls4, FnlsOutcome, Incumbent, Move, PiMap, SearchCounters};
pub use weighting::{wls, WlsConfig, WlsError, WlsObserver, WlsOutcome};
