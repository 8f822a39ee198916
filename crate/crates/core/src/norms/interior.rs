#[allow(unused_imports)]
use num_traits::Float;

use crate::elasticity::{frob2, DisplacementField};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{BallQuadrature, SubdomainMask};
use crate::Point;

/// `max |f|` over the degrees of freedom of the flagged elements, with the
/// point where it is attained. Ties go to the lowest dof index.
pub fn linf_on_mask(field: &ScalarField, mask: &SubdomainMask) -> Result<(f64, Point)> {
    let mesh = field.mesh();
    if mask.element_flags.len() != mesh.triangle_count()
        || mask.node_flags.len() != mesh.node_count()
    {
        return Err(Error::MeshMismatch);
    }
    let mut best: Option<(f64, usize)> = None;
    // P1 dofs are the vertices, which come first in the node numbering
    for i in 0..field.dof_count() {
        if !mask.node_flags[i] {
            continue;
        }
        let v = field.values()[i].abs();
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, i));
        }
    }
    let (v, i) = best.ok_or(Error::EmptySubdomain { d: mask.d })?;
    Ok((v, field.dof_point(i)))
}

/// `max |f|` over the whole mesh.
pub fn linf(field: &ScalarField) -> f64 {
    field.sup_norm()
}

/// `‖f‖_{L²(Ω)}`.
pub fn scalar_l2_norm(field: &ScalarField) -> f64 {
    crate::elasticity::integrate_mesh(field.mesh(), 4, &mut |t, l, _| {
        let v = field.eval(t, l);
        v * v
    })
    .sqrt()
}

fn check_ball(u: &DisplacementField, ball: &BallQuadrature) {
    debug_assert!(ball.elements.iter().all(|&t| t < u.mesh().triangle_count()));
}

/// `∫_{B_r(x) ∩ Ω} |∇̂u|²`.
pub fn strain_energy_on_ball(u: &DisplacementField, ball: &BallQuadrature) -> f64 {
    check_ball(u, ball);
    ball.integrate(|t, l, _| frob2(&u.strain(t, l)))
}

/// `∫_{B_r(x) ∩ Ω} |u|²`.
pub fn displacement_energy_on_ball(u: &DisplacementField, ball: &BallQuadrature) -> f64 {
    check_ball(u, ball);
    ball.integrate(|t, l, _| {
        let v = u.eval(t, l);
        v[0] * v[0] + v[1] * v[1]
    })
}

/// `∫_{B_r(x) ∩ Ω} |∇u|²`.
pub fn gradient_energy_on_ball(u: &DisplacementField, ball: &BallQuadrature) -> f64 {
    check_ball(u, ball);
    ball.integrate(|t, l, _| frob2(&u.gradient(t, l)))
}

/// `∫_Ω |∇̂u|²`.
pub fn strain_energy(u: &DisplacementField) -> f64 {
    u.strain_l2_norm().powi(2)
}
