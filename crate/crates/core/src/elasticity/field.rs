use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::{barycentric_gradients, p2_gradients, p2_values};
use crate::error::{Error, Result};
use crate::fields::BoundaryTrace;
use crate::geometry::{from_barycentric, TriMesh};
use crate::quadrature::triangle_rule;
use crate::Point;

/// A 2×2 matrix, row-major: `m[i][j]`.
pub type Mat2 = [[f64; 2]; 2];

/// Iteration count and final residual of a linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveInfo {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// A continuous P2 vector field. Displacements returned by the solver carry
/// the trace they were solved with.
#[derive(Debug, Clone)]
pub struct DisplacementField {
    mesh: Arc<TriMesh>,
    values: Vec<[f64; 2]>,
    pub trace: Option<BoundaryTrace>,
    pub solve_info: Option<SolveInfo>,
}

/// P2 vector fields that are not displacements (test functions, errors).
pub type VectorField = DisplacementField;

/// Strain at one quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainSample {
    pub element: usize,
    pub point: Point,
    pub weight: f64,
    pub strain: Mat2,
}

impl DisplacementField {
    pub fn from_nodal(mesh: Arc<TriMesh>, values: Vec<[f64; 2]>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::InvalidInput(alloc::format!(
                "vector field needs {} nodal values, got {}",
                mesh.node_count(),
                values.len()
            )));
        }
        Ok(DisplacementField {
            mesh,
            values,
            trace: None,
            solve_info: None,
        })
    }

    /// P2 interpolant of `f`.
    pub fn from_fn(mesh: Arc<TriMesh>, f: impl Fn(Point) -> [f64; 2]) -> Self {
        let values = (0..mesh.node_count())
            .map(|i| f(mesh.node_point(i)))
            .collect();
        DisplacementField {
            mesh,
            values,
            trace: None,
            solve_info: None,
        }
    }

    pub fn zeros(mesh: Arc<TriMesh>) -> Self {
        let n = mesh.node_count();
        Self::from_nodal(mesh, alloc::vec![[0.0; 2]; n]).expect("sized")
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [[f64; 2]] {
        &mut self.values
    }

    /// Interleaved `[u0x, u0y, u1x, ...]`.
    pub fn to_dof_vector(&self) -> Vec<f64> {
        self.values.iter().flat_map(|v| [v[0], v[1]]).collect()
    }

    pub fn from_dof_vector(mesh: Arc<TriMesh>, dofs: &[f64]) -> Result<Self> {
        if !dofs.len().is_multiple_of(2) {
            return Err(Error::InvalidInput("odd number of vector dofs".into()));
        }
        Self::from_nodal(mesh, dofs.chunks(2).map(|c| [c[0], c[1]]).collect())
    }

    pub fn eval(&self, t: usize, l: [f64; 3]) -> [f64; 2] {
        let n = self.mesh.element_nodes(t);
        let w = p2_values(l);
        let mut out = [0.0; 2];
        for k in 0..6 {
            out[0] += w[k] * self.values[n[k]][0];
            out[1] += w[k] * self.values[n[k]][1];
        }
        out
    }

    /// `g[i][j] = ∂_j u_i` inside element `t`.
    pub fn gradient(&self, t: usize, l: [f64; 3]) -> Mat2 {
        let (gl, _) = barycentric_gradients(&self.mesh.triangle_points(t));
        self.gradient_with(t, l, &gl)
    }

    pub fn gradient_with(&self, t: usize, l: [f64; 3], gl: &[Point; 3]) -> Mat2 {
        let n = self.mesh.element_nodes(t);
        let g = p2_gradients(l, gl);
        let mut out = [[0.0; 2]; 2];
        for k in 0..6 {
            let v = self.values[n[k]];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += v[i] * g[k][j];
                }
            }
        }
        out
    }

    /// `∇̂u = ½(∇u + ∇uᵀ)`.
    pub fn strain(&self, t: usize, l: [f64; 3]) -> Mat2 {
        sym(self.gradient(t, l))
    }

    pub fn divergence(&self, t: usize, l: [f64; 3]) -> f64 {
        let g = self.gradient(t, l);
        g[0][0] + g[1][1]
    }

    /// Strain at the element quadrature points of every triangle.
    pub fn strain_samples(&self) -> Vec<StrainSample> {
        let rule = triangle_rule(super::ELEMENT_QUADRATURE);
        let mut out = Vec::with_capacity(rule.len() * self.mesh.triangle_count());
        for t in 0..self.mesh.triangle_count() {
            let tri = self.mesh.triangle_points(t);
            let (gl, area) = barycentric_gradients(&tri);
            for (l, w) in rule.iter() {
                out.push(StrainSample {
                    element: t,
                    point: from_barycentric(tri, *l),
                    weight: w * area,
                    strain: sym(self.gradient_with(t, *l, &gl)),
                });
            }
        }
        out
    }

    /// `∫_Ω f(t, l, x)` with the element rule of the given degree.
    pub fn integrate(&self, degree: u32, mut f: impl FnMut(usize, [f64; 3], Point) -> f64) -> f64 {
        integrate_mesh(&self.mesh, degree, &mut f)
    }

    pub fn l2_norm(&self) -> f64 {
        self.integrate(4, |t, l, _| {
            let u = self.eval(t, l);
            u[0] * u[0] + u[1] * u[1]
        })
        .sqrt()
    }

    /// `‖∇u‖_{L²}` (full gradient).
    pub fn gradient_l2_norm(&self) -> f64 {
        self.integrate(2, |t, l, _| frob2(&self.gradient(t, l)))
            .sqrt()
    }

    /// `‖∇̂u‖_{L²}`.
    pub fn strain_l2_norm(&self) -> f64 {
        self.integrate(2, |t, l, _| frob2(&self.strain(t, l)))
            .sqrt()
    }

    /// `‖u − f‖_{L²}` against an analytic field.
    pub fn l2_error(&self, f: impl Fn(Point) -> [f64; 2]) -> f64 {
        self.integrate(5, |t, l, x| {
            let u = self.eval(t, l);
            let e = f(x);
            (u[0] - e[0]).powi(2) + (u[1] - e[1]).powi(2)
        })
        .sqrt()
    }

    /// `self + c · other`; the trace is dropped.
    pub fn add_scaled(&self, other: &DisplacementField, c: f64) -> Result<DisplacementField> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh) {
            return Err(Error::MeshMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| [a[0] + c * b[0], a[1] + c * b[1]])
            .collect();
        DisplacementField::from_nodal(self.mesh.clone(), values)
    }

    pub fn scaled(&self, c: f64) -> DisplacementField {
        let mut out = self.clone();
        for v in &mut out.values {
            v[0] *= c;
            v[1] *= c;
        }
        out.trace = self.trace.as_ref().map(|g| g.scaled(c));
        out
    }

    /// Largest nodal value on `∂Ω` (zero for test functions).
    pub fn boundary_max_abs(&self) -> f64 {
        let flags = self.mesh.boundary_node_flags();
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| flags[*i])
            .map(|(_, v)| v[0].abs().max(v[1].abs()))
            .fold(0.0, f64::max)
    }
}

pub fn integrate_mesh(
    mesh: &TriMesh,
    degree: u32,
    f: &mut impl FnMut(usize, [f64; 3], Point) -> f64,
) -> f64 {
    let rule = triangle_rule(degree);
    let mut total = 0.0;
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangle_points(t);
        let area = mesh.triangle_area(t);
        let mut s = 0.0;
        for (l, w) in rule.iter() {
            s += w * f(t, *l, from_barycentric(tri, *l));
        }
        total += s * area;
    }
    total
}

pub fn sym(g: Mat2) -> Mat2 {
    let off = 0.5 * (g[0][1] + g[1][0]);
    [[g[0][0], off], [off, g[1][1]]]
}

pub fn skew(g: Mat2) -> Mat2 {
    let w = 0.5 * (g[0][1] - g[1][0]);
    [[0.0, w], [-w, 0.0]]
}

/// Frobenius product `A : B`.
pub fn frob(a: &Mat2, b: &Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

pub fn frob2(a: &Mat2) -> f64 {
    frob(a, a)
}

/// Strain of `u` at the element quadrature points.
pub fn strain(u: &DisplacementField) -> Vec<StrainSample> {
    u.strain_samples()
}
