//! Exact analysis of persuasion games in which several senders compete to be
//! the one source the receiver listens to.
//!
//! The crate covers game and signal evaluation ([`game`], [`signal`]), the
//! deviations a sender can construct against another sender's signal
//! ([`constructions`]), the single-sender optimum as an exact LP ([`lp`],
//! [`persuasion`]), profile payoffs and equilibrium refutation
//! ([`equilibrium`]), and brute-force cross-checks ([`oracle`]).
//!
//! Everything is computed over arbitrary-precision rationals; sender indices
//! are zero-based in the API and one-based in files and reports.

pub mod builtins;
pub mod constructions;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod io;
pub mod lp;
pub mod oracle;
pub mod persuasion;
pub mod rational;
pub mod signal;

pub use error::{Error, Result};
pub use game::{validate_game, GameSpec, ValidationReport};
pub use rational::Rational;
pub use signal::Signal;
