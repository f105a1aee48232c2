//! The anisotropic Neumann operator -Lap_a u + u, its P1 discretization, and
//! the Green's function with regular part and Robin values.

mod assemble;
mod field;
mod green;

pub use assemble::{tri_quadrature, NeumannOperator, TRI_QUAD_PTS};
pub use field::FieldOnMesh;
pub use green::{
    greens_function, reflection_diagnostic, robin_function, solve_neumann, GreensField, PoleTag,
};
