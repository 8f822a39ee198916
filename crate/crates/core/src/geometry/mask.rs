use alloc::vec;
use alloc::vec::Vec;

use super::mesh::TriMesh;
use crate::error::{Error, Result};

/// Elements and P2 nodes of the interior subdomain
/// `Ω_d = {x ∈ Ω : dist(x, ∂Ω) > d}`.
#[derive(Debug, Clone)]
pub struct SubdomainMask {
    pub d: f64,
    /// `true` when all three vertices are farther than `d` from `∂Ω`.
    pub element_flags: Vec<bool>,
    /// `true` for every P2 node of a flagged element.
    pub node_flags: Vec<bool>,
}

impl SubdomainMask {
    pub fn flagged_elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.element_flags
            .iter()
            .enumerate()
            .filter_map(|(t, &f)| f.then_some(t))
    }

    pub fn element_count(&self) -> usize {
        self.element_flags.iter().filter(|&&f| f).count()
    }

    pub fn area(&self, mesh: &TriMesh) -> f64 {
        self.flagged_elements().map(|t| mesh.triangle_area(t)).sum()
    }
}

/// Flags the elements of `Ω_d`, using the analytic distance to the boundary.
pub fn interior_mask(mesh: &TriMesh, d: f64) -> Result<SubdomainMask> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidInput(alloc::format!(
            "subdomain depth must be positive, got {d}"
        )));
    }
    let domain = mesh.domain();
    let far: Vec<bool> = mesh
        .vertices()
        .iter()
        .map(|&p| domain.distance_to_boundary(p) > d)
        .collect();
    let element_flags: Vec<bool> = mesh
        .triangles()
        .iter()
        .map(|tri| tri.iter().all(|&v| far[v]))
        .collect();
    if !element_flags.iter().any(|&f| f) {
        return Err(Error::EmptySubdomain { d });
    }
    let mut node_flags = vec![false; mesh.node_count()];
    for (t, &flag) in element_flags.iter().enumerate() {
        if flag {
            for n in mesh.element_nodes(t) {
                node_flags[n] = true;
            }
        }
    }
    Ok(SubdomainMask {
        d,
        element_flags,
        node_flags,
    })
}
