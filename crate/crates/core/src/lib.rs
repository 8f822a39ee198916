//! Numerical core for the heterogeneous isotropic Lamé system
//!
//! ```text
//! div(C ∇̂u) = 0 in Ω,   u = g on ∂Ω,   C ∇̂u = λ div(u) I + μ ∇̂u
//! ```
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It provides
//!
//! * [`geometry`]: smooth 2-D domains, ring triangulations, interior masks `Ω_d`
//!   and ball quadratures `B_r(x)`;
//! * [`fields`]: Lamé coefficient fields, phantoms and Dirichlet traces;
//! * [`elasticity`]: a P2 finite-element forward solver and strain evaluators;
//! * [`norms`]: boundary Sobolev norms, the rigid-motion distance `Θ(g)`,
//!   the frequency `F[g]` and interior energies;
//! * [`estimates`]: numerical certificates for the stability and
//!   unique-continuation inequalities;
//! * [`reconstruct`]: recovery of `μ` from one interior displacement field.
//!
//! The companion `lamestab` crate adds file formats, configuration and the
//! command line runner.
#![no_std]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basis;
pub mod dense;
pub mod elasticity;
pub mod error;
pub mod estimates;
pub mod fields;
pub mod fit;
pub mod geometry;
pub mod norms;
pub mod quadrature;
pub mod reconstruct;
pub mod sparse;

pub use error::{Error, Result};

/// A point (or vector) of the plane.
pub type Point = [f64; 2];

/// Space dimension. Types are written for the plane only.
pub const DIM: usize = 2;

/// `x` reduced to `[0, period)`.
pub(crate) fn wrap(x: f64, period: f64) -> f64 {
    let r = x % period;
    if r < 0.0 {
        r + period
    } else {
        r
    }
}
