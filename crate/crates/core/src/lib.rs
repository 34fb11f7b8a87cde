//! Horton-Strahler analysis of rooted full binary trees.
//!
//! The crate covers four layers:
//!
//! * [`tree`]: full binary trees with pruning, series reduction,
//!   Horton-Strahler orders and branch / side-branch counts.
//! * [`tokunaga`]: Tokunaga side-branching sequences, their generating
//!   function and the Horton exponent it determines.
//! * [`horton`]: expected branch counts for mean self-similar trees, by
//!   back-substitution and by power-series inversion, and convergence checks
//!   for the strong Horton law.
//! * [`sampler`]: Independent Random Attachment trees and seeded Monte Carlo
//!   estimates of Horton numbers and Tokunaga coefficients.
//!
//! [`newick`] and [`cli`] provide tree ingestion and the command-line front end.

pub mod cli;
pub mod error;
pub mod exec;
pub mod horton;
pub mod newick;
pub mod report;
pub mod sampler;
pub mod series;
pub mod tokunaga;
pub mod tree;

pub use error::{Error, Result};
pub use horton::{ConvergenceReport, ZetaTable};
pub use sampler::{SamplerConfig, SideBranchDistribution, SimulationReport};
pub use tokunaga::{ExponentResult, TokunagaSequence};
pub use tree::{BinaryTree, HortonStatistics, OrderAssignment};
