use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::{p1_values, p2_values};
use crate::error::{Error, Result};
use crate::geometry::TriMesh;
use crate::Point;

/// A continuous piecewise-polynomial scalar field (P1 or P2) on a mesh.
#[derive(Debug, Clone)]
pub struct ScalarField {
    mesh: Arc<TriMesh>,
    degree: u8,
    values: Vec<f64>,
    lipschitz_bound: f64,
    value_bounds: (f64, f64),
}

impl ScalarField {
    /// P1 values live on vertices, P2 values on all nodes.
    pub fn from_values(mesh: Arc<TriMesh>, degree: u8, values: Vec<f64>) -> Result<Self> {
        let expected = match degree {
            1 => mesh.vertex_count(),
            2 => mesh.node_count(),
            _ => {
                return Err(Error::InvalidInput(alloc::format!(
                    "unsupported field degree {degree}"
                )))
            }
        };
        if values.len() != expected {
            return Err(Error::InvalidInput(alloc::format!(
                "degree-{degree} field needs {expected} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite field value".into()));
        }
        let mut field = ScalarField {
            mesh,
            degree,
            values,
            lipschitz_bound: 0.0,
            value_bounds: (0.0, 0.0),
        };
        field.refresh();
        Ok(field)
    }

    pub fn from_fn(mesh: Arc<TriMesh>, degree: u8, f: impl Fn(Point) -> f64) -> Result<Self> {
        let n = if degree == 2 {
            mesh.node_count()
        } else {
            mesh.vertex_count()
        };
        let values = (0..n).map(|i| f(mesh.node_point(i))).collect();
        Self::from_values(mesh, degree, values)
    }

    pub fn constant(mesh: Arc<TriMesh>, c: f64) -> Self {
        let n = mesh.vertex_count();
        Self::from_values(mesh, 1, alloc::vec![c; n]).expect("constant field")
    }

    fn refresh(&mut self) {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        self.value_bounds = (lo, hi);
        self.lipschitz_bound = self.measured_lipschitz();
    }

    /// Raises the reported Lipschitz bound to `bound` (never below the
    /// measured edge slopes).
    pub fn with_lipschitz_bound(mut self, bound: f64) -> Self {
        self.lipschitz_bound = bound.max(self.measured_lipschitz());
        self
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dof_count(&self) -> usize {
        self.values.len()
    }

    pub fn dof_point(&self, i: usize) -> Point {
        self.mesh.node_point(i)
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn value_bounds(&self) -> (f64, f64) {
        self.value_bounds
    }

    pub fn sup_norm(&self) -> f64 {
        self.value_bounds.0.abs().max(self.value_bounds.1.abs())
    }

    /// Largest `|jump| / length` over mesh edges (P1) or over the segments
    /// joining neighbouring P2 nodes.
    pub fn measured_lipschitz(&self) -> f64 {
        let mesh = &self.mesh;
        let slope = |i: usize, j: usize| {
            let (p, q) = (mesh.node_point(i), mesh.node_point(j));
            (self.values[i] - self.values[j]).abs() / (p[0] - q[0]).hypot(p[1] - q[1])
        };
        if self.degree == 1 {
            mesh.edges()
                .iter()
                .map(|e| slope(e[0], e[1]))
                .fold(0.0, f64::max)
        } else {
            let mut best = 0.0f64;
            for t in 0..mesh.triangle_count() {
                let n = mesh.element_nodes(t);
                for (a, b) in [
                    (0, 3),
                    (3, 1),
                    (1, 4),
                    (4, 2),
                    (2, 5),
                    (5, 0),
                    (3, 4),
                    (4, 5),
                    (5, 3),
                ] {
                    best = best.max(slope(n[a], n[b]));
                }
            }
            best
        }
    }

    /// Value inside element `t` at barycentric point `l`.
    pub fn eval(&self, t: usize, l: [f64; 3]) -> f64 {
        let nodes = self.mesh.element_nodes(t);
        if self.degree == 1 {
            let w = p1_values(l);
            (0..3).map(|k| w[k] * self.values[nodes[k]]).sum()
        } else {
            let w = p2_values(l);
            (0..6).map(|k| w[k] * self.values[nodes[k]]).sum()
        }
    }

    /// Point evaluation; `None` outside the mesh.
    pub fn eval_at(&self, p: Point) -> Option<f64> {
        self.mesh.locate(p).map(|(t, l)| self.eval(t, l))
    }

    /// The same field as a P2 field (exact for P1 input).
    pub fn to_degree2(&self) -> ScalarField {
        if self.degree == 2 {
            return self.clone();
        }
        let mut values = self.values.clone();
        values.extend(
            self.mesh
                .edges()
                .iter()
                .map(|e| 0.5 * (self.values[e[0]] + self.values[e[1]])),
        );
        debug_assert_eq!(values.len(), self.mesh.node_count());
        let mut out = ScalarField {
            mesh: self.mesh.clone(),
            degree: 2,
            values,
            lipschitz_bound: 0.0,
            value_bounds: self.value_bounds,
        };
        out.lipschitz_bound = self.lipschitz_bound.max(out.measured_lipschitz());
        out
    }

    /// Values at the mesh vertices.
    pub fn vertex_values(&self) -> &[f64] {
        &self.values[..self.mesh.vertex_count()]
    }

    /// `self + c · other`, promoted to the larger degree.
    pub fn add_scaled(&self, other: &ScalarField, c: f64) -> Result<ScalarField> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh) {
            return Err(Error::MeshMismatch);
        }
        let (a, b) = if self.degree == other.degree {
            (self.clone(), other.clone())
        } else {
            (self.to_degree2(), other.to_degree2())
        };
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x + c * y)
            .collect();
        let out = ScalarField::from_values(a.mesh.clone(), a.degree, values)?;
        let bound = a.lipschitz_bound + c.abs() * b.lipschitz_bound;
        Ok(out.with_lipschitz_bound(bound))
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        let (lo, hi) = (self.value_bounds.0 * c, self.value_bounds.1 * c);
        out.value_bounds = (lo.min(hi), lo.max(hi));
        out.lipschitz_bound = self.lipschitz_bound * c.abs();
        out
    }

    /// `max |value|` over the degrees of freedom on `∂Ω`.
    pub fn boundary_max_abs(&self) -> f64 {
        let flags = self.mesh.boundary_node_flags();
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| flags[*i])
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }
}
