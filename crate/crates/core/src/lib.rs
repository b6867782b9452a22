//! Solver and verifier toolkit for the two-function tt*-Toda lattice
//!
//! ```text
//!     Delta w0 = e^{a w0} - e^{w1 - w0}
//!     Delta w1 = e^{w1 - w0} - e^{-b w1}
//! ```
//!
//! on the punctured plane, with w_i ~ gamma_i log|z| at the origin and decay
//! at infinity.
//!
//! The crate has two halves:
//!
//! * numerics — a log-radial finite-difference kernel ([`grid`]), the scalar
//!   comparison problems bracketing the system ([`scalar`]), the monotone
//!   iteration scheme with its bootstrap and boundary ladders ([`toda`]), and
//!   integral-identity verification ([`identities`]);
//! * exact algebra — the block case table, the rational maps between monomial
//!   exponents and asymptotic data, the worked-example catalog, and the
//!   real-form matrix checks ([`holodata`]), all in exact rational arithmetic.
//!
//! The `ttstar` binary exposes both halves as subcommands; see the crate
//! README for usage.

pub mod cli;
pub mod error;
pub mod grid;
pub mod holodata;
pub mod identities;
pub mod scalar;
pub mod toda;

pub use error::{Error, Result};
pub use grid::{RadialField, RadialGrid};
pub use toda::{BoundaryData, Solution, SolveConfig, SystemSpec};
