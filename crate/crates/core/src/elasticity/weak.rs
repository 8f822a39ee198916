use alloc::sync::Arc;

use super::field::{frob, integrate_mesh, sym};
use super::{DisplacementField, StressConvention, ELEMENT_QUADRATURE};
use crate::error::{Error, Result};
use crate::fields::ScalarField;

/// The two sides of the weak comparison identity and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakIdentityGap {
    /// `c ∫ φ ∇̂u : ∇̂ζ`.
    pub lhs: f64,
    /// `−∫ λ div(u − v) div ζ − c ∫ μ₂ ∇̂(u − v) : ∇̂ζ`.
    pub rhs: f64,
    pub gap: f64,
    /// `(‖∇̂u‖ + ‖∇̂v‖) ‖∇̂ζ‖`.
    pub scale: f64,
}

impl WeakIdentityGap {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.gap.abs() / self.scale
        } else {
            self.gap.abs()
        }
    }
}

/// Evaluates the identity obtained by subtracting the weak formulations of
/// `u` (shear modulus `μ₁ = μ₂ + φ`) and `v` (shear modulus `μ₂`) tested
/// against an interior field `ζ`:
///
/// ```text
/// c ∫ φ ∇̂u:∇̂ζ = −∫ λ div(u − v) div ζ − c ∫ μ₂ ∇̂(u − v):∇̂ζ
/// ```
///
/// Both sides are integrated element by element; the gap vanishes up to the
/// algebraic residual of the two solves.
pub fn weak_identity_gap(
    u: &DisplacementField,
    v: &DisplacementField,
    lambda: &ScalarField,
    mu2: &ScalarField,
    phi: &ScalarField,
    zeta: &DisplacementField,
    convention: StressConvention,
) -> Result<WeakIdentityGap> {
    let mesh = u.mesh();
    for m in [v.mesh(), lambda.mesh(), mu2.mesh(), phi.mesh(), zeta.mesh()] {
        if !Arc::ptr_eq(mesh, m) {
            return Err(Error::MeshMismatch);
        }
    }
    if zeta.boundary_max_abs() != 0.0 {
        return Err(Error::InvalidInput(
            "test field must vanish on the boundary".into(),
        ));
    }
    let c = convention.mu_factor();
    let lhs = integrate_mesh(mesh, ELEMENT_QUADRATURE, &mut |t, l, _| {
        c * phi.eval(t, l) * frob(&u.strain(t, l), &zeta.strain(t, l))
    });
    let rhs = integrate_mesh(mesh, ELEMENT_QUADRATURE, &mut |t, l, _| {
        let d = sym(sub(u.gradient(t, l), v.gradient(t, l)));
        let ez = zeta.strain(t, l);
        -lambda.eval(t, l) * (d[0][0] + d[1][1]) * (ez[0][0] + ez[1][1])
            - c * mu2.eval(t, l) * frob(&d, &ez)
    });
    let scale = (u.strain_l2_norm() + v.strain_l2_norm()) * zeta.strain_l2_norm();
    Ok(WeakIdentityGap {
        lhs,
        rhs,
        gap: lhs - rhs,
        scale,
    })
}

fn sub(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}
