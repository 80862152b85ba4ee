//! Stackelberg risk preference design.
//!
//! A leader chooses the distribution μ of risk-preference types in a
//! population; the population (the follower) then minimizes the
//! μ-weighted spectral risk of a convex loss. This crate evaluates and
//! solves both levels on sampled scenarios, verifies approximate equilibria
//! on grids, and measures the approximation bounds that tie the leader's
//! ambiguity tolerance to the loss of optimality.
//!
//! Modules, bottom up:
//! - [`risk`]: empirical V@R, AV@R, spectral and Kusuoka risk, step spectra.
//! - [`type_space`]: type spaces, mixing of spectra, W1 on the line.
//! - [`follower`]: loss models, scenarios, the follower objective and solver.
//! - [`stripe`]: the leader's problem, brute-force oracle, verification.
//! - [`bounds`]: growth, Lipschitz and regularity estimates and bound checks.
//! - [`scenarios`]: contract design and risk-sensitive meta-learning.
//! - [`cli`]: the `stripe` command-line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod follower;
pub mod risk;
pub mod scenarios;
pub mod stripe;
pub mod type_space;

pub use error::{Error, Result};
