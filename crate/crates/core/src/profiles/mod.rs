//! Closed-form bubbles, radial correction profiles, moment constants, kernel
//! elements, and the energy shape constants.

mod bubbles;
mod constants;
mod kernels;
mod radial;

pub use bubbles::{bubble_interior, bubble_spike, Family};
pub use constants::{moment_constant, shape_constants};
pub use kernels::{kernel_element, KernelElement, KernelKind};
pub use radial::{omega1_closed, omega1_tilde_closed, solve_radial_correction, RadialProfile};

use crate::error::Result;
use std::sync::Arc;

/// The two solved correction profiles of one family, as used by the ansatz.
#[derive(Debug, Clone)]
pub struct ProfilePair {
    pub omega1: Arc<RadialProfile>,
    pub omega2: Arc<RadialProfile>,
}

impl ProfilePair {
    pub fn solve(family: Family) -> Result<ProfilePair> {
        let omega1 = Arc::new(solve_radial_correction(family, 1, None)?);
        let omega2 = Arc::new(solve_radial_correction(family, 2, Some(omega1.clone()))?);
        Ok(ProfilePair { omega1, omega2 })
    }
}
