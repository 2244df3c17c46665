//! Experiment runner, file formats and command line for `pargames-core`.
//!
//! * [`corpus`]: decision-tree corpora as text.
//! * [`transcript`]: plays as one move per line.
//! * [`sha`]: a SHA-256 based first-order PRF.
//! * [`runner`]: seeded parallel trials.
//! * [`checks`]: the game-model invariant suites behind `games-check`.
//! * [`experiments`]: the experiments behind each subcommand, returning
//!   serializable reports.
//! * [`cli`]: argument parsing and dispatch.

pub mod checks;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod runner;
pub mod sha;
pub mod transcript;

pub use error::Error;
