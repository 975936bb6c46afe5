//! Cournot duopoly with ad valorem tax evasion.
//!
//! - [`model`]: profits, first-order conditions, the closed-form equilibrium
//!   and its feasibility range, penalty-scale sweeps.
//! - [`dynamics`]: gradient-adjustment dynamics with and without the
//!   follower's observation delay, RK4 integration, oscillation verdicts.
//! - [`linear`]: Jacobian at the equilibrium, characteristic polynomials,
//!   Routh-Hurwitz test and a root-finding cross-check.
//! - [`bifurcation`]: imaginary-axis crossings, critical delay,
//!   transversality and delay-stability classification.
//! - [`config`], [`output`], [`cli`]: the command-line front end.

pub mod bifurcation;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod linear;
pub mod model;
pub mod output;
pub mod poly;

pub use bifurcation::{classify, Classification, HopfAnalysis};
pub use dynamics::{AdjustmentSpeeds, HistorySpec, Trajectory};
pub use error::{Error, Result};
pub use model::{equilibrium, MarketState, ModelParams};
