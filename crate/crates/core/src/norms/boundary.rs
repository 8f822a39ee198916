use alloc::sync::Arc;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dense::cholesky_solve;
use crate::error::{Error, Result};
use crate::fields::{trace_from_closure, BoundaryTrace};
use crate::geometry::TriMesh;
use crate::Point;

/// `x ↦ a + W x` with `W = [[0, −w], [w, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigidMotion {
    pub a: [f64; 2],
    pub w: f64,
}

impl RigidMotion {
    pub fn new(a: [f64; 2], w: f64) -> Self {
        RigidMotion { a, w }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[0.0, -self.w], [self.w, 0.0]]
    }

    pub fn eval(&self, p: Point) -> [f64; 2] {
        [self.a[0] - self.w * p[1], self.a[1] + self.w * p[0]]
    }

    pub fn trace(&self, mesh: Arc<TriMesh>) -> Result<BoundaryTrace> {
        let r = *self;
        trace_from_closure(mesh, move |p| r.eval(p))
    }
}

/// Fourier weight `(1 + k̃²)^s`.
fn weight(trace: &BoundaryTrace, k: i64, s: f64) -> f64 {
    let kt = trace.wavenumber(k);
    (1.0 + kt * kt).powf(s)
}

/// `Σ_k (1 + k̃²)^s Re(f̂_k · conj ĝ_k)` summed over both components.
pub fn sobolev_inner(f: &BoundaryTrace, g: &BoundaryTrace, s: f64) -> Result<f64> {
    if !Arc::ptr_eq(f.mesh(), g.mesh()) {
        return Err(Error::MeshMismatch);
    }
    Ok(f.modes()
        .zip(g.modes())
        .map(|((k, a0, a1), (_, b0, b1))| {
            weight(f, k, s) * ((a0 * b0.conj()).re + (a1 * b1.conj()).re)
        })
        .sum())
}

/// `‖g‖_{H^s(∂Ω)}` in the Fourier-weight norm along arclength.
pub fn boundary_sobolev_norm(trace: &BoundaryTrace, s: f64) -> f64 {
    trace
        .modes()
        .map(|(k, a, b)| weight(trace, k, s) * (a.norm_sqr() + b.norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

/// Result of the `H^{1/2}` projection onto rigid motions.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidProjection {
    pub theta: f64,
    pub minimizer: RigidMotion,
    /// `‖a + W x‖_{H^{1/2}}` of the minimizer.
    pub projection_norm: f64,
    /// Largest `|⟨g − r*, e_i⟩| / (‖g‖ ‖e_i‖)` over the three generators.
    pub orthogonality: f64,
}

fn generators(mesh: &Arc<TriMesh>) -> Result<[BoundaryTrace; 3]> {
    Ok([
        trace_from_closure(mesh.clone(), |_| [1.0, 0.0])?,
        trace_from_closure(mesh.clone(), |_| [0.0, 1.0])?,
        trace_from_closure(mesh.clone(), |p| [-p[1], p[0]])?,
    ])
}

/// `Θ(g) = min_{a, W} ‖g − (a + W x)‖_{H^{1/2}(∂Ω)}` and its minimizer.
pub fn rigid_projection(trace: &BoundaryTrace) -> Result<RigidProjection> {
    let e = generators(trace.mesh())?;
    let mut gram = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            gram[i][j] = sobolev_inner(&e[i], &e[j], 0.5)?;
        }
        rhs[i] = sobolev_inner(trace, &e[i], 0.5)?;
    }
    let c = cholesky_solve(&gram, &rhs, 1e-12).ok_or(Error::DegenerateGram)?;
    let minimizer = RigidMotion::new([c[0], c[1]], c[2]);
    let proj = e[0]
        .scaled(c[0])
        .add_scaled(&e[1], c[1])?
        .add_scaled(&e[2], c[2])?;
    let residual = trace.add_scaled(&proj, -1.0)?;
    let theta = boundary_sobolev_norm(&residual, 0.5);
    let gn = boundary_sobolev_norm(trace, 0.5);
    let mut orthogonality: f64 = 0.0;
    for ei in &e {
        let den = gn * boundary_sobolev_norm(ei, 0.5);
        if den > 0.0 {
            orthogonality = orthogonality.max(sobolev_inner(&residual, ei, 0.5)?.abs() / den);
        }
    }
    Ok(RigidProjection {
        theta,
        minimizer,
        projection_norm: boundary_sobolev_norm(&proj, 0.5),
        orthogonality,
    })
}

/// `(Θ(g), minimizer)`.
pub fn rigid_motion_distance(trace: &BoundaryTrace) -> Result<(f64, RigidMotion)> {
    let p = rigid_projection(trace)?;
    Ok((p.theta, p.minimizer))
}

/// Relative size of `Θ(g)` below which `g` counts as rigid.
pub const RIGID_TOLERANCE: f64 = 1e-9;

fn is_rigid(theta: f64, norm: f64) -> bool {
    theta <= RIGID_TOLERANCE * norm || theta == 0.0
}

/// `F[g] = ‖g‖_{H¹} / Θ(g)`.
pub fn frequency(trace: &BoundaryTrace) -> Result<f64> {
    let (theta, _) = rigid_motion_distance(trace)?;
    if is_rigid(theta, boundary_sobolev_norm(trace, 0.5)) {
        return Err(Error::RigidTrace);
    }
    Ok(boundary_sobolev_norm(trace, 1.0) / theta)
}

/// The boundary quantities entering the a-priori assumptions on `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryNormTable {
    pub perimeter: f64,
    pub h_half: f64,
    pub h_one: f64,
    pub h_three_halves: f64,
    pub theta: f64,
    pub minimizer: RigidMotion,
    /// `None` for a rigid trace.
    pub frequency: Option<f64>,
}

impl BoundaryNormTable {
    /// Rows `(s, ‖g‖_{H^s})`.
    pub fn rows(&self) -> [(f64, f64); 3] {
        [
            (0.5, self.h_half),
            (1.0, self.h_one),
            (1.5, self.h_three_halves),
        ]
    }

    /// Whether `‖g‖_{H^{3/2}} ≤ L₀` and `F[g] ≤ L₀/δ₀` hold (the second
    /// follows from the first together with `Θ(g) ≥ δ₀`).
    pub fn within_budget(&self, l0: f64, delta0: f64) -> bool {
        self.h_three_halves <= l0
            && self.theta >= delta0
            && self.frequency.is_some_and(|f| f <= l0 / delta0)
    }
}

pub fn boundary_norm_table(trace: &BoundaryTrace) -> Result<BoundaryNormTable> {
    let (theta, minimizer) = rigid_motion_distance(trace)?;
    let h_half = boundary_sobolev_norm(trace, 0.5);
    let h_one = boundary_sobolev_norm(trace, 1.0);
    Ok(BoundaryNormTable {
        perimeter: trace.perimeter(),
        h_half,
        h_one,
        h_three_halves: boundary_sobolev_norm(trace, 1.5),
        theta,
        minimizer,
        frequency: if is_rigid(theta, h_half) {
            None
        } else {
            Some(h_one / theta)
        },
    })
}
