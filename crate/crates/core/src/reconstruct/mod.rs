//! Recovery of the shear modulus `μ` from one interior displacement field,
//! with `λ` known and `μ` given on `∂Ω`.
//!
//! The weak equation `∫ λ div u div ζ + c μ ∇̂u : ∇̂ζ = 0` is linear in `μ`.
//! Testing it with every interior P2 vector hat `ζ_j` gives residuals
//! `r_j(μ) = a_j + (B μ)_j` over the P1 nodal values of `μ`, and the
//! reconstruction minimizes `‖a + B μ‖² + α ‖∇μ‖²` with the boundary values
//! fixed.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::basis::{barycentric_gradients, p1_values, p2_gradients};
use crate::elasticity::{
    assemble_with, solve_dirichlet, sym, DisplacementField, StressConvention, ELEMENT_QUADRATURE,
};
use crate::error::{Error, Result};
use crate::fields::{BoundaryTrace, LamePair, ScalarField};
use crate::fit::{median, power_fit, PowerFit};
use crate::geometry::{interior_mask, TriMesh};
use crate::norms::linf_on_mask;
use crate::quadrature::triangle_rule;
use crate::sparse::{dot, pcg, CsrMatrix, SpdOperator, TripletBuilder};

/// Relative residual of the normal equations.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;

/// A vertex whose column of `B` has squared norm below this fraction of
/// `trace(BᵀB)` carries no information.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// A measurement with `‖∇̂u‖² ≤ RIGID_STRAIN_RATIO ‖∇u‖²` is treated as rigid.
pub const RIGID_STRAIN_RATIO: f64 = 1e-14;

/// A measured P2 displacement field on the reconstruction mesh.
#[derive(Debug, Clone)]
pub struct InteriorMeasurement {
    pub field: DisplacementField,
    /// Standard deviation of the noise per nodal component.
    pub noise_level: f64,
}

impl InteriorMeasurement {
    pub fn new(field: DisplacementField, noise_level: f64) -> Result<Self> {
        if field.values().iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "measurement contains non-finite values".into(),
            ));
        }
        Ok(InteriorMeasurement { field, noise_level })
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        self.field.mesh()
    }

    /// `u` plus independent `N(0, σ²)` noise on every nodal component, drawn
    /// from ChaCha8 seeded with `seed`.
    pub fn noisy(u: &DisplacementField, sigma: f64, seed: u64) -> Result<Self> {
        let mut field = u.clone();
        field.trace = None;
        field.solve_info = None;
        if sigma > 0.0 {
            let normal =
                Normal::new(0.0, sigma).map_err(|e| Error::InvalidInput(alloc::format!("{e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in field.values_mut() {
                v[0] += normal.sample(&mut rng);
                v[1] += normal.sample(&mut rng);
            }
        }
        Self::new(field, sigma)
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub mu_rec: ScalarField,
    /// `‖a + B μ_rec‖`.
    pub residual_norm: f64,
    pub regularization_weight: f64,
    /// `‖μ_rec − μ_true‖_{L∞(Ω_d)}` at the vertices, once a truth is given.
    pub linf_error_on_interior: Option<f64>,
    pub iterations: usize,
}

impl ReconstructionResult {
    /// Fills in the interior error against `truth`.
    pub fn with_truth(mut self, truth: &ScalarField, d: f64) -> Result<Self> {
        self.linf_error_on_interior = Some(vertex_error(&self.mu_rec, truth, d)?);
        Ok(self)
    }
}

/// `max |μ − μ_true|` over the vertices of `Ω_d`.
pub fn vertex_error(mu: &ScalarField, truth: &ScalarField, d: f64) -> Result<f64> {
    if !Arc::ptr_eq(mu.mesh(), truth.mesh()) {
        return Err(Error::MeshMismatch);
    }
    let mesh = mu.mesh().clone();
    let diff: Vec<f64> = mu
        .vertex_values()
        .iter()
        .zip(truth.vertex_values())
        .map(|(a, b)| a - b)
        .collect();
    let field = ScalarField::from_values(mesh.clone(), 1, diff)?;
    Ok(linf_on_mask(&field, &interior_mask(&mesh, d)?)?.0)
}

/// The linear residual map `μ ↦ a + B μ`.
#[derive(Debug, Clone)]
pub struct ResidualMap {
    /// Rows: interior vector dofs; columns: vertices.
    pub b: CsrMatrix,
    pub a: Vec<f64>,
}

impl ResidualMap {
    pub fn residual(&self, mu_vertices: &[f64]) -> Vec<f64> {
        let mut r = self.b.mul_vec(mu_vertices);
        for (x, y) in r.iter_mut().zip(&self.a) {
            *x += y;
        }
        r
    }

    pub fn residual_norm(&self, mu_vertices: &[f64]) -> f64 {
        let r = self.residual(mu_vertices);
        dot(&r, &r).sqrt()
    }
}

/// Assembles `a_j = ∫ λ div u div ζ_j` and `B_{j,i} = c ∫ ψ_i ∇̂u : ∇̂ζ_j`
/// for the interior P2 vector hats `ζ_j` and the P1 hats `ψ_i`.
pub fn residual_map(
    u: &DisplacementField,
    lambda: &ScalarField,
    convention: StressConvention,
) -> Result<ResidualMap> {
    let mesh = u.mesh();
    if !Arc::ptr_eq(mesh, lambda.mesh()) {
        return Err(Error::MeshMismatch);
    }
    let flags = mesh.boundary_node_flags();
    let mut row_of = vec![usize::MAX; mesh.node_count()];
    let mut rows = 0;
    for (n, &b) in flags.iter().enumerate() {
        if !b {
            row_of[n] = rows;
            rows += 2;
        }
    }
    let c = convention.mu_factor();
    let rule = triangle_rule(ELEMENT_QUADRATURE);
    let mut tb =
        TripletBuilder::with_capacity(rows, mesh.vertex_count(), mesh.triangle_count() * 36);
    let mut a = vec![0.0; rows];
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangle_points(t);
        let (gl, area) = barycentric_gradients(&tri);
        let nodes = mesh.element_nodes(t);
        let verts = mesh.triangles()[t];
        let mut local = [[[0.0; 3]; 2]; 6];
        let mut local_a = [[0.0; 2]; 6];
        for (l, w) in rule.iter() {
            let wa = w * area;
            let e = sym(u.gradient_with(t, *l, &gl));
            let div = e[0][0] + e[1][1];
            let lam = lambda.eval(t, *l);
            let psi = p1_values(*l);
            let gz = p2_gradients(*l, &gl);
            for k in 0..6 {
                for i in 0..2 {
                    // ∇̂u : ∇̂(e_i φ_k) = Σ_j ε_ij ∂_j φ_k
                    let s = e[i][0] * gz[k][0] + e[i][1] * gz[k][1];
                    local_a[k][i] += wa * lam * div * gz[k][i];
                    for m in 0..3 {
                        local[k][i][m] += wa * c * psi[m] * s;
                    }
                }
            }
        }
        for k in 0..6 {
            let r = row_of[nodes[k]];
            if r == usize::MAX {
                continue;
            }
            for i in 0..2 {
                a[r + i] += local_a[k][i];
                for m in 0..3 {
                    tb.push(r + i, verts[m], local[k][i][m]);
                }
            }
        }
    }
    Ok(ResidualMap { b: tb.build(), a })
}

/// P1 stiffness matrix `∫ ∇ψ_i · ∇ψ_j`.
fn p1_laplacian(mesh: &TriMesh) -> CsrMatrix {
    let mut tb = TripletBuilder::with_capacity(
        mesh.vertex_count(),
        mesh.vertex_count(),
        9 * mesh.triangle_count(),
    );
    for t in 0..mesh.triangle_count() {
        let (g, area) = barycentric_gradients(&mesh.triangle_points(t));
        let v = mesh.triangles()[t];
        for i in 0..3 {
            for j in 0..3 {
                tb.push(v[i], v[j], area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
            }
        }
    }
    tb.build()
}

/// `x ↦ B_Iᵀ B_I x + α L_II x` on the interior vertices.
struct NormalOperator<'a> {
    b: &'a CsrMatrix,
    lap: &'a CsrMatrix,
    alpha: f64,
    free: &'a [usize],
    diag: Vec<f64>,
    nv: usize,
}

impl NormalOperator<'_> {
    fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.nv];
        for (k, &i) in self.free.iter().enumerate() {
            full[i] = x[k];
        }
        full
    }
}

impl SpdOperator for NormalOperator<'_> {
    fn dim(&self) -> usize {
        self.free.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let full = self.expand(x);
        let btb = self.b.mul_transpose_vec(&self.b.mul_vec(&full));
        let lx = if self.alpha > 0.0 {
            self.lap.mul_vec(&full)
        } else {
            Vec::new()
        };
        for (k, &i) in self.free.iter().enumerate() {
            y[k] = btb[i]
                + if self.alpha > 0.0 {
                    self.alpha * lx[i]
                } else {
                    0.0
                };
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }
}

/// Default Tikhonov weight `10⁻⁶ · ∫|∇̂u|² / |Ω|`.
pub fn default_reg_weight(meas: &InteriorMeasurement) -> f64 {
    1e-6 * meas.field.strain_l2_norm().powi(2) / meas.mesh().total_area()
}

/// Least-squares reconstruction of P1 `μ` with the boundary vertex values
/// taken from `mu_boundary`.
pub fn reconstruct_mu(
    meas: &InteriorMeasurement,
    lambda: &ScalarField,
    mu_boundary: &ScalarField,
    reg_weight: f64,
) -> Result<ReconstructionResult> {
    reconstruct_mu_with(
        meas,
        lambda,
        mu_boundary,
        reg_weight,
        StressConvention::default(),
    )
}

pub fn reconstruct_mu_with(
    meas: &InteriorMeasurement,
    lambda: &ScalarField,
    mu_boundary: &ScalarField,
    reg_weight: f64,
    convention: StressConvention,
) -> Result<ReconstructionResult> {
    let mesh = meas.mesh().clone();
    if !Arc::ptr_eq(&mesh, mu_boundary.mesh()) {
        return Err(Error::MeshMismatch);
    }
    if !(reg_weight >= 0.0) || !reg_weight.is_finite() {
        return Err(Error::InvalidInput(alloc::format!(
            "regularization weight must be >= 0, got {reg_weight}"
        )));
    }
    let map = residual_map(&meas.field, lambda, convention)?;
    let nv = mesh.vertex_count();
    let free: Vec<usize> = (0..nv).filter(|&v| !mesh.is_boundary_vertex(v)).collect();
    let col = map.b.column_norms_squared();
    let trace: f64 = free.iter().map(|&i| col[i]).sum();
    // a rigid measurement has round-off strain everywhere
    let strain2 = meas.field.strain_l2_norm().powi(2);
    let grad2 = meas.field.gradient_l2_norm().powi(2);
    let no_strain = !(strain2 > RIGID_STRAIN_RATIO * grad2);
    let degenerate: Vec<usize> = free
        .iter()
        .copied()
        .filter(|&i| no_strain || !(col[i] >= DEGENERACY_THRESHOLD * trace))
        .collect();
    if !degenerate.is_empty() {
        let mut bbox = [
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ];
        for &i in &degenerate {
            let p = mesh.vertices()[i];
            bbox = [
                bbox[0].min(p[0]),
                bbox[1].max(p[0]),
                bbox[2].min(p[1]),
                bbox[3].max(p[1]),
            ];
        }
        return Err(Error::IllPosed {
            degenerate_vertices: degenerate.len(),
            bbox,
        });
    }
    let lap = p1_laplacian(&mesh);
    let mut mu = vec![0.0; nv];
    let bvals = mu_boundary.vertex_values();
    for v in 0..nv {
        if mesh.is_boundary_vertex(v) {
            mu[v] = bvals[v];
        }
    }
    // right-hand side −B_Iᵀ(a + B_B μ_B) − α L_IB μ_B
    let r0 = map.residual(&mu);
    let bt = map.b.mul_transpose_vec(&r0);
    let lb = lap.mul_vec(&mu);
    let rhs: Vec<f64> = free.iter().map(|&i| -bt[i] - reg_weight * lb[i]).collect();
    let ldiag = lap.diagonal();
    let op = NormalOperator {
        b: &map.b,
        lap: &lap,
        alpha: reg_weight,
        free: &free,
        diag: free
            .iter()
            .map(|&i| col[i] + reg_weight * ldiag[i])
            .collect(),
        nv,
    };
    let cap = 20 * free.len() + 100;
    let sol = pcg(&op, &rhs, RECONSTRUCTION_TOLERANCE, cap)?;
    for (k, &i) in free.iter().enumerate() {
        mu[i] = sol.x[k];
    }
    let residual_norm = map.residual_norm(&mu);
    Ok(ReconstructionResult {
        mu_rec: ScalarField::from_values(mesh, 1, mu)?,
        residual_norm,
        regularization_weight: reg_weight,
        linf_error_on_interior: None,
        iterations: sol.iterations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRow {
    pub sigma: f64,
    /// One error per replicate.
    pub errors: Vec<f64>,
    pub median_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSweep {
    pub rows: Vec<NoiseRow>,
    /// `error ≈ A σ^p` over the rows with `σ > 0`.
    pub fit: Option<PowerFit>,
    pub reg_weight: f64,
}

impl NoiseSweep {
    /// Number of adjacent pairs whose median error decreases.
    pub fn inversions(&self) -> usize {
        self.rows
            .windows(2)
            .filter(|w| w[1].median_error < w[0].median_error)
            .count()
    }
}

/// Replicates per noise level.
pub const NOISE_REPLICATES: u64 = 3;

/// Reconstructs `μ` from noisy copies of the forward solution for `truth`
/// with data `g`. Replicate `k` of level `i` draws its noise from ChaCha8
/// seeded with `seed + 1000 i + k`. `reg_weight = None` uses
/// [`default_reg_weight`] of the noiseless field for every level.
pub fn noise_sweep(
    truth: &LamePair,
    g: &BoundaryTrace,
    d: f64,
    noise_levels: &[f64],
    seed: u64,
    reg_weight: Option<f64>,
) -> Result<NoiseSweep> {
    if noise_levels.windows(2).any(|w| !(w[0] <= w[1])) || noise_levels.first() != Some(&0.0) {
        return Err(Error::InvalidInput(
            "noise levels must be ascending and start at 0".into(),
        ));
    }
    let mesh = truth.mu.mesh().clone();
    let system = assemble_with(mesh, truth, StressConvention::default())?;
    let u = solve_dirichlet(&system, g, None)?;
    let clean = InteriorMeasurement::noisy(&u, 0.0, seed)?;
    let alpha = reg_weight.unwrap_or_else(|| default_reg_weight(&clean));
    let mut rows = Vec::with_capacity(noise_levels.len());
    for (i, &sigma) in noise_levels.iter().enumerate() {
        let reps = if sigma > 0.0 { NOISE_REPLICATES } else { 1 };
        let mut errors = Vec::with_capacity(reps as usize);
        for k in 0..reps {
            let meas =
                InteriorMeasurement::noisy(&u, sigma, seed.wrapping_add(1000 * i as u64 + k))?;
            let rec =
                reconstruct_mu(&meas, &truth.lambda, &truth.mu, alpha)?.with_truth(&truth.mu, d)?;
            errors.push(rec.linf_error_on_interior.unwrap_or(f64::NAN));
        }
        rows.push(NoiseRow {
            sigma,
            median_error: median(&errors),
            errors,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.sigma > 0.0)
        .map(|r| (r.sigma, r.median_error))
        .unzip();
    let fit = if xs.len() >= 2 {
        Some(power_fit(&xs, &ys)?)
    } else {
        None
    };
    Ok(NoiseSweep {
        rows,
        fit,
        reg_weight: alpha,
    })
}
