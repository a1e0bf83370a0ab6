//! Simulation and certification toolkit for resilient fixed-time cooperative
//! output regulation of uncertain strict-feedback multi-agent systems under
//! denial-of-service attacks.
//!
//! The crate is organized around the closed-loop pieces:
//!
//! * [`numkit`] — small dense linear algebra, signed fractional powers,
//!   symmetric eigenvalues, bracketed root finding, RK4.
//! * [`topology`] — undirected agent graph with leader links and the
//!   `H`/`H̄`/`H̃` matrices derived from it.
//! * [`dos`] — per-edge attack schedules, the switching adjacency, and the
//!   duration-budget accounting.
//! * [`plant`] — the marginally stable exosystem and strict-feedback agents,
//!   including the one-link manipulator bench.
//! * [`observer`] — the distributed resilient fixed-time observer and its
//!   derivative chain.
//! * [`controller`] — adaptive backstepping with forward-mode jets for all
//!   partial derivatives.
//! * [`analysis`] — certificate constants, condition checks, settling-time
//!   bounds, and residual-set aggregates.
//! * [`engine`] — closed-loop assembly, switching-aligned integration, traces
//!   and metrics.

pub mod analysis;
pub mod controller;
pub mod dos;
pub mod engine;
mod error;
pub mod numkit;
pub mod observer;
pub mod plant;
pub mod topology;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
