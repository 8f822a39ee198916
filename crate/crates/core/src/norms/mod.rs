//! Boundary Sobolev norms, the rigid-motion distance `Θ(g)`, the frequency
//! `F[g]` and interior energies.

mod boundary;
mod interior;

pub use boundary::{
    boundary_norm_table, boundary_sobolev_norm, frequency, rigid_motion_distance, rigid_projection,
    sobolev_inner, BoundaryNormTable, RigidMotion, RigidProjection, RIGID_TOLERANCE,
};
pub use interior::{
    displacement_energy_on_ball, gradient_energy_on_ball, linf, linf_on_mask, scalar_l2_norm,
    strain_energy, strain_energy_on_ball,
};
