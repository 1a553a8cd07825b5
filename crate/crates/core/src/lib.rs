//! Centrality measures for multilayer networks.
//!
//! A multilayer network with `N` nodes and `L` layers is represented by a fourth-order
//! adjacency tensor `A in R^{N x L x N x L}`. Walk-counting centralities are read out
//! of tensor functions `f(A)` (exponential, resolvent, power series) contracted with
//! the Einstein product:
//!
//! * exactly, through the flattened `NL x NL` supra-adjacency matrix, for small
//!   networks ([`centrality::Mode::Exact`]);
//! * approximately, through global or block tensor Arnoldi processes, for large ones
//!   ([`centrality::Mode::Krylov`]).
//!
//! ```
//! use mlcentrality::centrality::{total_communicability_per_node, Mode, ShiftConvention};
//! use mlcentrality::ingest::builtin_example1;
//!
//! let a = builtin_example1();
//! let report = total_communicability_per_node(&a, 1.0, Mode::Exact, ShiftConvention::Full).unwrap();
//! assert_eq!(report.ranking[0].node, 2);
//! assert_eq!(report.ranking[0].layer, 2);
//! ```

pub mod centrality;
pub mod cli;
pub mod error;
pub mod ingest;
pub mod krylov;
pub mod matrix_functions;
pub mod tensor;

pub use error::{Error, Result};
