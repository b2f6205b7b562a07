//! File formats, instance generation, reports and the command-line driver
//! around [`fourflip_core`].
//!
//! Parsing and output live here so that the solver crate stays `no_std`.

pub mod batch;
pub mod cli;
pub mod formats;
pub mod gen;
pub mod report;
pub mod solve;

pub use formats::{parse_columnwise, parse_native_bip, parse_rowwise_scp, Format, ParseError, ProblemKind};
pub use report::SolveReport;
pub use solve::{solve, SolveOptions, WallClock};
