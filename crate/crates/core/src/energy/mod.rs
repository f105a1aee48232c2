//! Energy functional, reduced-energy expansion, and maximization over the
//! spike configuration space.

mod maximize;
mod numeric;
mod reduced;

pub use maximize::{landscape_scan, maximize_reduced_energy, GreenCache, LandscapeRow,
    MaximizeOptions, MaximizeOutcome};
pub use numeric::{energy_numeric_field, energy_numeric_fn};
pub use reduced::{reduced_energy_asymptotic, EnergyReport, ShapeConstants};
