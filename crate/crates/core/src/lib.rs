//! Multi-spike approximate solutions of the anisotropic planar Neumann problem
//! with Hardy-Henon weight,
//!
//! ```text
//! -div(a(x) grad u) + a(x) u = a(x) |x-q|^{2 alpha} u^p   in Omega,
//! du/dnu = 0                                              on the boundary,
//! ```
//!
//! for large exponent `p`. The crate builds the bubble-plus-correction ansatz,
//! solves the concentration-parameter system, maximizes the reduced energy over
//! spike configurations, refines to a discrete solution by damped Newton, and
//! verifies the asymptotic concentration targets (mass, spike height, far-field
//! decay) at desk scale.

pub mod ansatz;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod greenfn;
// pub mod io;
pub mod linalg;
pub mod numeric;
pub mod params;
pub mod pipeline;
pub mod problem;
pub mod profiles;
// pub mod refine;

pub use error::{Error, Result};
pub use geometry::{Domain, Mesh, Point, SpikeConfiguration};
pub use problem::{CoefficientModel, ProblemConfig};
