//! The approximate solution: bubbles plus corrections, its residual measured
//! in the bubble-adapted weighted norm, and the potential of the linearized
//! operator.

mod corrections;
mod field;
mod residual;

pub use corrections::{lemma_comparison_gap, solve_correction};
pub use field::{assemble_ansatz, AnsatzField};
pub use residual::{residual_norm, sample_cloud, ResidualReport};
