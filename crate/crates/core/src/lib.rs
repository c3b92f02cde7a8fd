//! Generic zero controllability of discrete-time structured systems.
//!
//! A structured system `x(k+1) = A x(k) + B u(k)` is given only by the
//! zero/nonzero patterns of `A` and `B`. This crate decides from the system
//! digraph whether almost every numerical realization can be steered to the
//! origin in finite time, selects minimal sets of driver nodes that make an
//! autonomous system `x(k+1) = A x(k)` generically zero controllable, and
//! checks each structural verdict numerically on random realizations.

pub mod cli;
pub mod dot;
pub mod drivers;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod matching;
pub mod numeric;
pub mod paths;
pub mod pattern;
pub mod report;
pub mod scc;
pub mod structural;

pub use drivers::{
    build_b_pattern, enumerate_minimal_driver_sets, greedy_driver_set, minimal_driver_set,
    validate_driver_set, BMode, BPattern, DriverSet,
};
pub use error::{Error, Result};
pub use graph::{Edge, SystemGraph, Vertex};
pub use paths::{entry_paths, PathMonomial};
pub use pattern::PatternMatrix;
pub use scc::SccDecomposition;
pub use structural::{
    compute_nu, generic_rank, is_generically_controllable, is_generically_zero_controllable,
    is_irreducible, is_structurally_nilpotent, reducible_decomposition, Decomposition, ZcReport,
};
