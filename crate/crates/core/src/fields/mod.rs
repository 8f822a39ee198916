//! Coefficient fields, phantoms and Dirichlet data.

mod lame;
mod phantom;
mod scalar;
mod trace;

pub use lame::{validate_lame, InequalityCheck, LamePair, LameReport};
pub use phantom::{
    make_phantom, make_phantom_with_degree, ramp, Inclusion, Phantom, PhantomSpec, RAMP_EASE,
    RAMP_MAX_SLOPE,
};
pub use scalar::ScalarField;
pub use trace::{trace_from_closure, BoundaryGenerator, BoundaryTrace, FourierMode};
