//! Analysis kernel for the discrete two-species lottery-Ricker competition map
//!
//! ```text
//! x' = r1 x / (a + x + y)
//! y' = y exp(r2 - x - y)
//! ```
//!
//! and for the Ricker competition map with constant stocking of species `x`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure function
//! of its inputs; IO, parallel drivers and the command line live in the
//! companion `lottery-ricker-cli` crate.
//!
//! Module map:
//!
//! * [`map`]: parameters, states, one step of the dynamics, Jacobians, the
//!   compact absorbing region `D_eps`.
//! * [`orbits`]: boundary equilibria, the Ricker 2-cycle on the `y`-axis, the
//!   interior 2-cycle in closed form with Newton polish.
//! * [`stability`]: Jacobian products, Jury test, regime classification,
//!   Lyapunov-ratio certificates and the persistence probe.
//! * [`geometry`]: heteroclinic connection from `(r1, 0)` to `(0, r2)` and
//!   finite-rank pre-images of points and curves.
//! * [`basin`]: per-point fate classification and basin rasters.
#![cfg_attr(not(test), no_std)]
// `!(a <= b)` is used on purpose so NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod basin;
mod error;
pub mod geometry;
pub mod linalg;
pub mod map;
pub mod orbits;
mod roots;
pub mod sampling;
pub mod stability;

pub use error::{Error, Result};
pub use linalg::Mat2;
pub use map::{InvariantRegion, MapFamily, Params, State, StockingParams};
