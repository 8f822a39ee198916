//! P2 finite elements for `div(C ∇̂u) = f` with Dirichlet data.

mod assemble;
mod field;
mod solve;
mod weak;

pub use assemble::{
    assemble, assemble_with, element_stiffness, StiffnessSystem, StressConvention,
    ELEMENT_QUADRATURE,
};
pub use field::{
    frob, frob2, integrate_mesh, skew, strain, sym, DisplacementField, Mat2, SolveInfo,
    StrainSample, VectorField,
};
pub use solve::{
    energy_product, interior_residual, interior_rhs, iteration_cap, load_vector, solve_dirichlet,
    SOLVER_TOLERANCE,
};
pub use weak::{weak_identity_gap, WeakIdentityGap};
