use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{DisplacementField, SolveInfo, StiffnessSystem};
use crate::basis::p2_values;
use crate::error::{Error, Result};
use crate::fields::BoundaryTrace;
use crate::geometry::from_barycentric;
use crate::quadrature::triangle_rule;
use crate::sparse::pcg;
use crate::Point;

/// Relative residual at which the conjugate gradient iteration stops.
pub const SOLVER_TOLERANCE: f64 = 1e-12;

/// Iteration cap `50 √n` for `n` unknowns.
pub fn iteration_cap(n: usize) -> usize {
    (50.0 * (n as f64).sqrt()).ceil() as usize
}

/// Load vector `∫ f · φ` on all degrees of freedom.
pub fn load_vector(system: &StiffnessSystem, f: &dyn Fn(Point) -> [f64; 2]) -> Vec<f64> {
    let mesh = &system.mesh;
    let mut out = vec![0.0; system.dof_count()];
    let rule = triangle_rule(5);
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangle_points(t);
        let area = mesh.triangle_area(t);
        let nodes = mesh.element_nodes(t);
        for (l, w) in rule.iter() {
            let fx = f(from_barycentric(tri, *l));
            let phi = p2_values(*l);
            for k in 0..6 {
                out[2 * nodes[k]] += w * area * phi[k] * fx[0];
                out[2 * nodes[k] + 1] += w * area * phi[k] * fx[1];
            }
        }
    }
    out
}

/// Right-hand side on the interior unknowns after eliminating the boundary.
pub fn interior_rhs(
    system: &StiffnessSystem,
    g: &BoundaryTrace,
    body_force: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Vec<f64> {
    let lifted = boundary_lift(system, g);
    let kg = system.full.mul_vec(&lifted);
    let load = body_force.map(|f| load_vector(system, f));
    system
        .interior_dofs
        .iter()
        .map(|&d| load.as_ref().map_or(0.0, |l| l[d]) - kg[d])
        .collect()
}

fn boundary_lift(system: &StiffnessSystem, g: &BoundaryTrace) -> Vec<f64> {
    let mut x = vec![0.0; system.dof_count()];
    for (&node, v) in g.nodes().iter().zip(g.values()) {
        x[2 * node] = v[0];
        x[2 * node + 1] = v[1];
    }
    x
}

/// Solves `a(u, ζ) = ∫ f · ζ` for all interior `ζ` with `u = g` on `∂Ω`.
pub fn solve_dirichlet(
    system: &StiffnessSystem,
    g: &BoundaryTrace,
    body_force: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<DisplacementField> {
    if !Arc::ptr_eq(&system.mesh, g.mesh()) {
        return Err(Error::MeshMismatch);
    }
    let rhs = interior_rhs(system, g, body_force);
    let sol = pcg(
        &system.interior,
        &rhs,
        SOLVER_TOLERANCE,
        iteration_cap(rhs.len()),
    )?;
    let mut x = boundary_lift(system, g);
    for (i, &d) in system.interior_dofs.iter().enumerate() {
        x[d] = sol.x[i];
    }
    let mut u = DisplacementField::from_dof_vector(system.mesh.clone(), &x)?;
    u.trace = Some(g.clone());
    u.solve_info = Some(SolveInfo {
        iterations: sol.iterations,
        relative_residual: sol.relative_residual,
    });
    Ok(u)
}

/// `‖K_II u_I − rhs‖ / ‖rhs‖` for a solved field.
pub fn interior_residual(
    system: &StiffnessSystem,
    u: &DisplacementField,
    body_force: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<f64> {
    let g = u
        .trace
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("field carries no boundary trace".into()))?;
    let rhs = interior_rhs(system, g, body_force);
    let x = u.to_dof_vector();
    let xi: Vec<f64> = system.interior_dofs.iter().map(|&d| x[d]).collect();
    let ax = system.interior.mul_vec(&xi);
    let num: f64 = ax
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den: f64 = rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
    Ok(if den > 0.0 { num / den } else { num })
}

/// `a(u, w)` with the system's coefficients.
pub fn energy_product(
    system: &StiffnessSystem,
    u: &DisplacementField,
    w: &DisplacementField,
) -> f64 {
    let y = system.full.mul_vec(&w.to_dof_vector());
    u.to_dof_vector().iter().zip(&y).map(|(a, b)| a * b).sum()
}
