//! Validated evaluation of zeta and L-functions, elliptic-curve local data
//! over prime fields, DFS cutsets of rooted graphs, and exact checks of the
//! chart and bundle structure of the two-sphere.

pub mod arith;
pub mod cli;
pub mod cutset;
pub mod dirichlet;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod primes;
mod quad;
pub mod zeta;

pub use error::{Error, ErrorKind, Result};
