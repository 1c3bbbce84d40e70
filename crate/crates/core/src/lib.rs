//! Decision and construction library for multi-Latin rectangles with
//! prescribed symbol counts.
//!
//! An `r x s` rectangle over symbols `1..=k` holds a multiset of `lambda`
//! symbols in every cell, no symbol more than `lambda` times per line, and
//! symbol `l` at most `rho_l` times overall. The library decides whether such
//! a rectangle extends to an `n x n` square meeting every `rho_l` exactly
//! ([`admissibility`]), constructs the extension when it exists
//! ([`completion`]), provides closed-form checkers for the degenerate regimes
//! ([`corollaries`]), and cross-validates all of it against naive exhaustive
//! procedures ([`oracle`]).

pub mod admissibility;
pub mod completion;
pub mod corollaries;
pub mod factors;
pub mod generate;
pub mod model;
pub mod oracle;
pub mod rng;

/// An operation refused to run because its input exceeds the scale its
/// exhaustive strategy is meant for.
#[derive(Debug, Clone, thiserror::Error)]
#[error("scale guard exceeded: {0}")]
pub struct GuardError(pub String);
