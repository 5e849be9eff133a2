//! Exact vortex-line solutions of the time-dependent Schrödinger and
//! Klein-Gordon equations, local vortex anatomy, and a numerical vortex-line
//! extractor/tracker with an independent split-step propagator.
//!
//! The crate is organised around five parts:
//!
//! * [`catalog`]: closed-form wave functions, their polynomial vortex
//!   prefactors, the generating-function construction and PDE residuals.
//! * [`anatomy`]: flow velocity, circulation, winding, the `w` vector and the
//!   vortex-line velocity.
//! * [`tracker`]: plaquette-based zero-line extraction, refinement, frame
//!   matching and creation/annihilation/reconnection events.
//! * [`propagator`]: Strang split-step spectral evolution used as an
//!   independent oracle.
//! * [`scenario`]: configuration-driven runs, presets and verification
//!   summaries used by the `qvortex` binary.

pub mod anatomy;
pub mod catalog;
pub mod consts;
pub mod error;
pub mod jet;
pub mod poly;
pub mod propagator;
pub mod scenario;
pub mod tracker;

pub use catalog::{AnalyticField, Governing, Solution, SolutionSpec};
pub use consts::{PhysicalConstants, WaveVector};
pub use error::{Error, Result};
pub use jet::{Jet, Scalar};
pub use poly::{Monomial, PolynomialPrefactor};

pub use num_complex::Complex64 as C64;

/// Real 3-vector used for positions, directions and velocities.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Complex 3-vector, e.g. the gradient of a wave function.
pub type CVec3 = nalgebra::Vector3<C64>;
