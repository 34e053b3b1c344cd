//! Simulation and analysis of one-way local-measurement protocols on
//! bipartite product-state ensembles.
//!
//! * [`quantum`]: kets, Hermitian operators, Kraus sets and Hermitian null spaces.
//! * [`ensembles`]: the four-state and nine-state product ensembles, their
//!   generalizations, and the ensemble file format.
//! * [`discrimination`]: exact simulation of one-way protocols and optimal
//!   minimum-error estimation.
//! * [`nogo`]: the zero-error constraint system on the first measuring party.
//! * [`cli`]: the `locc` command-line front end and its report schema.

pub mod cli;
pub mod discrimination;
pub mod ensembles;
pub mod error;
pub mod nogo;
pub mod quantum;
pub mod tol;

pub use error::{Error, Result};
