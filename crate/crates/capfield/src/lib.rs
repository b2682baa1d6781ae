//! Cap-based boundary functions on the sphere, their Poisson extensions into
//! the unit ball, and desk-scale measurements of the boundary growth spectrum.
//!
//! The library is organized bottom-up:
//!
//! - [`sphere`]: points, caps, slices, gauges, separated nets, 5r-coverings;
//! - [`poisson`]: the Poisson kernel of the ball and integrals of cap sums;
//! - [`slicer`]: Harnack slice decompositions of the kernel and the maximal
//!   cap-average comparison;
//! - [`construct`]: saturating and divergence-witness boundary functions;
//! - [`analysis`]: radial profiles, growth exponents, box dimensions, and the
//!   measured growth spectrum;
//! - [`pipeline`]: named verification suites and the end-to-end spectrum run.
//!
//! Everything is deterministic given the seeds recorded in the outputs.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod construct;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod poisson;
pub mod quad;
pub mod slicer;
pub mod special;
pub mod sphere;

pub use error::{CapfieldError, Result};
