//! Numerical workbench for entanglement-assisted classical message
//! transmission over compound and arbitrarily varying quantum channels.
//!
//! The crate computes the saddle-point capacity formulas
//! `sup_ρ inf_s I(ρ, N_s)` (compound) and `sup_ρ inf_{N ∈ conv 𝔍} I(ρ, N)`
//! (arbitrarily varying), and constructs and exactly evaluates the
//! finite-blocklength code machinery around them: typical-subspace encoding
//! families, max-from-average conversion, robustified permutation codes, and
//! the dimension-five counterexample showing the average-error capacity of a
//! compound channel has no strong converse.
//!
//! Modules:
//! - [`linalg`]: dense complex primitives (eigendecomposition, partial
//!   trace, entropy, trace norm, purification).
//! - [`channels`]: CPTP maps in Kraus form, Choi matrices, mixtures, tensor
//!   application, cq channels, JSON ingestion.
//! - [`info`]: quantum mutual information, Holevo quantity and their
//!   structural inequalities.
//! - [`solver`]: the concave-convex saddle-point engine behind the capacity
//!   formulas, plus additivity and continuity checks.
//! - [`geometry`]: diamond-norm estimates and Hausdorff distance between
//!   channel sets.
//! - [`coding`]: finite-blocklength code constructions and exact error
//!   evaluation.
//! - [`manifest`]: reproduction recipes for CLI runs.
//! - [`cli`]: implementation of the `eacw` command-line tool.
//!
//! The `examples/` directory contains one runnable example per major
//! capability; start with `cargo run --release --example single_channel_capacity`.

pub mod channels;
pub mod cli;
pub mod coding;
pub mod error;
pub mod geometry;
pub mod info;
pub mod linalg;
pub mod manifest;
pub mod rng;
pub mod solver;
mod threads;

pub use channels::{Channel, ChannelSet, CqChannel};
pub use error::{Error, Result};
pub use linalg::{C64, ComplexMatrix, DensityMatrix, PureStateVector};
