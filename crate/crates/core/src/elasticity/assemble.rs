use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{barycentric_gradients, p2_gradients};
use crate::error::{Error, Result};
use crate::fields::{validate_lame, LamePair};
use crate::geometry::TriMesh;
use crate::quadrature::triangle_rule;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// How `μ` enters the stress.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StressConvention {
    /// `C ∇̂u = λ div(u) I + μ ∇̂u`.
    #[default]
    Standard,
    /// `C ∇̂u = λ div(u) I + 2μ ∇̂u`.
    Engineering,
}

impl StressConvention {
    /// Factor multiplying `μ ∇̂u`.
    pub fn mu_factor(self) -> f64 {
        match self {
            StressConvention::Standard => 1.0,
            StressConvention::Engineering => 2.0,
        }
    }
}

/// Quadrature degree used for every element integral.
pub const ELEMENT_QUADRATURE: u32 = 4;

/// The assembled P2 stiffness matrix of
/// `a(u, ζ) = ∫ λ div u div ζ + c μ ∇̂u : ∇̂ζ` and its interior block.
///
/// Vector degrees of freedom are numbered `2 · node + component`.
#[derive(Debug, Clone)]
pub struct StiffnessSystem {
    pub mesh: Arc<TriMesh>,
    pub pair: LamePair,
    pub convention: StressConvention,
    /// Full matrix on all degrees of freedom.
    pub full: CsrMatrix,
    /// Block acting on interior degrees of freedom.
    pub interior: CsrMatrix,
    /// Interior degrees of freedom in increasing order.
    pub interior_dofs: Vec<usize>,
    /// Position of each degree of freedom in `interior_dofs`.
    pub interior_index: Vec<Option<usize>>,
}

impl StiffnessSystem {
    pub fn dof_count(&self) -> usize {
        self.full.rows
    }
}

/// Element stiffness matrix, rows and columns `2 · local_node + component`.
pub fn element_stiffness(
    mesh: &TriMesh,
    pair: &LamePair,
    convention: StressConvention,
    t: usize,
) -> [[f64; 12]; 12] {
    let tri = mesh.triangle_points(t);
    let (gl, area) = barycentric_gradients(&tri);
    let c = convention.mu_factor();
    let mut k = [[0.0; 12]; 12];
    for (l, w) in triangle_rule(ELEMENT_QUADRATURE).iter() {
        let g = p2_gradients(*l, &gl);
        let lam = pair.lambda.eval(t, *l) * w * area;
        let mu = c * pair.mu.eval(t, *l) * w * area;
        for a in 0..6 {
            for b in 0..6 {
                let dot = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                for i in 0..2 {
                    for j in 0..2 {
                        let delta = if i == j { dot } else { 0.0 };
                        k[2 * a + i][2 * b + j] +=
                            lam * g[a][i] * g[b][j] + 0.5 * mu * (delta + g[a][j] * g[b][i]);
                    }
                }
            }
        }
    }
    k
}

/// Assembles the stiffness matrix with the standard stress convention.
pub fn assemble(mesh: Arc<TriMesh>, pair: &LamePair) -> Result<StiffnessSystem> {
    assemble_with(mesh, pair, StressConvention::Standard)
}

pub fn assemble_with(
    mesh: Arc<TriMesh>,
    pair: &LamePair,
    convention: StressConvention,
) -> Result<StiffnessSystem> {
    if !Arc::ptr_eq(&mesh, pair.mu.mesh()) || !Arc::ptr_eq(&mesh, pair.lambda.mesh()) {
        return Err(Error::MeshMismatch);
    }
    let report = validate_lame(pair);
    if let Some(bad) = report.failures().next() {
        return Err(Error::BudgetViolation(alloc::format!(
            "{} fails: {} against {}",
            bad.name,
            bad.worst_value,
            bad.threshold
        )));
    }
    let ndof = 2 * mesh.node_count();
    let mut trip = TripletBuilder::with_capacity(ndof, ndof, 144 * mesh.triangle_count());
    for t in 0..mesh.triangle_count() {
        let k = element_stiffness(&mesh, pair, convention, t);
        let nodes = mesh.element_nodes(t);
        for a in 0..6 {
            for i in 0..2 {
                for b in 0..6 {
                    for j in 0..2 {
                        trip.push(2 * nodes[a] + i, 2 * nodes[b] + j, k[2 * a + i][2 * b + j]);
                    }
                }
            }
        }
    }
    let full = trip.build();

    let boundary = mesh.boundary_node_flags();
    let mut interior_index = vec![None; ndof];
    let mut interior_dofs = Vec::new();
    for dof in 0..ndof {
        if !boundary[dof / 2] {
            interior_index[dof] = Some(interior_dofs.len());
            interior_dofs.push(dof);
        }
    }
    let ni = interior_dofs.len();
    let mut block = TripletBuilder::with_capacity(ni, ni, full.nnz());
    for (ri, &r) in interior_dofs.iter().enumerate() {
        for (c, v) in full.row(r) {
            if let Some(ci) = interior_index[c] {
                block.push(ri, ci, v);
            }
        }
    }
    Ok(StiffnessSystem {
        mesh,
        pair: pair.clone(),
        convention,
        full,
        interior: block.build(),
        interior_dofs,
        interior_index,
    })
}
