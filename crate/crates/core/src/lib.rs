//! Simulator for GHZ-based quantum anonymous notification.
//!
//! The crate is layered bottom-up:
//!
//! - [`qsim`]: exact density-matrix and Pauli-trajectory simulation with
//!   single- and two-qubit depolarizing channels.
//! - [`shares`]: additive angle shares modulo 2π.
//! - [`protocol`]: notification rounds, sessions and the Monte Carlo drivers
//!   for detection, anonymity and false-positive experiments.
//! - [`attacks`]: semi-honest guessing, rotation poisoning, last-speaker
//!   forgery and majority-vote mitigation.
//! - [`quanet`]: discrete-event model of privacy classification and
//!   notification-triggered switch bypass.
//!
//! All randomness flows through [`RngStream`], so every experiment is a pure
//! function of its configuration and master seed.

pub mod attacks;
pub mod error;
pub mod protocol;
pub mod qsim;
pub mod quanet;
pub mod rng;
pub mod shares;
pub mod stats;

pub use error::{Error, Result};
pub use rng::RngStream;
