//! Equilibrium computation and verification for two-team majoritarian
//! multi-battle contests in which each team manager divides a prize budget
//! among the team's players before the battles are fought.
//!
//! The crate is organised bottom-up:
//!
//! - [`domain`]: contest primitives, allocations and solution records.
//! - [`probability`]: reduced-form battle probabilities, the Poisson-binomial
//!   law of battle wins, pivotality and the contest-level gradient.
//! - [`equilibrium`]: the closed-form equilibrium, efforts and effort cost.
//! - [`verification`]: conditional moments, the log-Hessian, numerical best
//!   responses and counterexamples.
//! - [`certificate`]: exact-integer coefficient certificate for the
//!   covariance-domination matrix.
//! - [`temporal`]: cluster-ordered play with clinching and pivotal gaps.
//! - [`analytics`]: comparative-statics sweeps.
//! - [`cli`]: the command-line front end.

pub mod analytics;
pub mod certificate;
pub mod cli;
pub mod domain;
pub mod equilibrium;
pub mod error;
pub mod probability;
pub mod temporal;
pub mod verification;

pub use domain::{validate_spec, Allocation, Battle, ContestSpec, Equilibrium, Team, TemporalStructure};
pub use equilibrium::solve;
pub use error::{ContestError, Result};
