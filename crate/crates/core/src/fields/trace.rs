use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::TriMesh;
use crate::Point;

/// Dirichlet data on `∂Ω`.
///
/// `values` are the closure evaluated at the boundary P2 nodes (in the
/// order of [`TriMesh::boundary_nodes`]) and are what the solver imposes.
/// `samples` are the closure evaluated on the curve itself at the same
/// arclength parameters; the Fourier coefficients
/// `ĝ_k = L^{-1/2} ∫ g e^{-i k̃ s} ds`, `k̃ = 2πk/L`, come from the
/// trapezoidal rule on these samples.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    mesh: Arc<TriMesh>,
    nodes: Vec<usize>,
    params: Vec<f64>,
    values: Vec<[f64; 2]>,
    samples: Vec<[f64; 2]>,
    k_max: usize,
    // index k + k_max
    fourier: [Vec<Complex64>; 2],
}

/// Builds a trace by evaluating `closure` at boundary nodes and curve points.
pub fn trace_from_closure(
    mesh: Arc<TriMesh>,
    closure: impl Fn(Point) -> [f64; 2],
) -> Result<BoundaryTrace> {
    let bn = mesh.boundary_nodes();
    let nodes: Vec<usize> = bn.iter().map(|b| b.0).collect();
    let params: Vec<f64> = bn.iter().map(|b| b.1).collect();
    let values: Vec<[f64; 2]> = nodes.iter().map(|&n| closure(mesh.node_point(n))).collect();
    let samples: Vec<[f64; 2]> = params
        .iter()
        .map(|&s| closure(mesh.domain().point_at(s)))
        .collect();
    if values
        .iter()
        .chain(&samples)
        .flatten()
        .any(|v| !v.is_finite())
    {
        return Err(Error::InvalidInput("boundary data is not finite".into()));
    }
    Ok(BoundaryTrace::assemble(
        mesh, nodes, params, values, samples,
    ))
}

impl BoundaryTrace {
    fn assemble(
        mesh: Arc<TriMesh>,
        nodes: Vec<usize>,
        params: Vec<f64>,
        values: Vec<[f64; 2]>,
        samples: Vec<[f64; 2]>,
    ) -> Self {
        let n = samples.len();
        let k_max = (n.max(1) - 1) / 2;
        let l = mesh.domain().perimeter();
        let ds = l / n as f64;
        let norm = ds / l.sqrt();
        let mut fourier = [
            Vec::with_capacity(2 * k_max + 1),
            Vec::with_capacity(2 * k_max + 1),
        ];
        for k in -(k_max as i64)..=k_max as i64 {
            let kt = 2.0 * core::f64::consts::PI * k as f64 / l;
            let mut acc = [Complex64::new(0.0, 0.0); 2];
            for (s, g) in params.iter().zip(&samples) {
                let e = Complex64::from_polar(1.0, -kt * s);
                acc[0] += e * g[0];
                acc[1] += e * g[1];
            }
            fourier[0].push(acc[0] * norm);
            fourier[1].push(acc[1] * norm);
        }
        BoundaryTrace {
            mesh,
            nodes,
            params,
            values,
            samples,
            k_max,
            fourier,
        }
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    /// Boundary P2 node indices, in counter-clockwise order.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Arclength parameter of each boundary node.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Values imposed at the boundary nodes.
    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    /// Values on the curve at the node parameters.
    pub fn samples(&self) -> &[[f64; 2]] {
        &self.samples
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn perimeter(&self) -> f64 {
        self.mesh.domain().perimeter()
    }

    /// `k̃ = 2πk / L`.
    pub fn wavenumber(&self, k: i64) -> f64 {
        2.0 * core::f64::consts::PI * k as f64 / self.perimeter()
    }

    /// `ĝ_k` of component `comp`, zero for `|k| > k_max`.
    pub fn coefficient(&self, comp: usize, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            return Complex64::new(0.0, 0.0);
        }
        self.fourier[comp][(k + self.k_max as i64) as usize]
    }

    /// Iterates `(k, ĝ_k(comp 0), ĝ_k(comp 1))`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64, Complex64)> + '_ {
        let km = self.k_max as i64;
        (-km..=km).map(move |k| {
            let i = (k + km) as usize;
            (k, self.fourier[0][i], self.fourier[1][i])
        })
    }

    /// Fourier series evaluated at arclength `s`.
    pub fn synthesize(&self, s: f64) -> [f64; 2] {
        let l = self.perimeter();
        let mut out = [0.0; 2];
        for (k, a, b) in self.modes() {
            let e = Complex64::from_polar(1.0, self.wavenumber(k) * s);
            out[0] += (a * e).re;
            out[1] += (b * e).re;
        }
        let c = 1.0 / l.sqrt();
        [out[0] * c, out[1] * c]
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, other: &BoundaryTrace, c: f64) -> Result<BoundaryTrace> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh) {
            return Err(Error::MeshMismatch);
        }
        let comb = |a: &[[f64; 2]], b: &[[f64; 2]]| -> Vec<[f64; 2]> {
            a.iter()
                .zip(b)
                .map(|(x, y)| [x[0] + c * y[0], x[1] + c * y[1]])
                .collect()
        };
        let mut out = self.clone();
        out.values = comb(&self.values, &other.values);
        out.samples = comb(&self.samples, &other.samples);
        for comp in 0..2 {
            for (x, y) in out.fourier[comp].iter_mut().zip(&other.fourier[comp]) {
                *x += y * c;
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> BoundaryTrace {
        let mut out = self.clone();
        for v in out.values.iter_mut().chain(out.samples.iter_mut()) {
            v[0] *= c;
            v[1] *= c;
        }
        for comp in 0..2 {
            for x in &mut out.fourier[comp] {
                *x *= c;
            }
        }
        out
    }
}

/// One Fourier mode `amp_cos cos(kθ) + amp_sin sin(kθ)` in component
/// `component`, with `θ` the polar angle of the boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierMode {
    pub component: usize,
    pub k: u32,
    pub amp_cos: f64,
    pub amp_sin: f64,
}

/// Named families of Dirichlet data.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryGenerator {
    /// `g(x) = A x + b`.
    Affine {
        matrix: [[f64; 2]; 2],
        offset: [f64; 2],
    },
    /// Sum of polar-angle Fourier modes.
    FourierModes(Vec<FourierMode>),
    /// `g(x) = a + w (−x₂, x₁)`.
    Rigid { a: [f64; 2], w: f64 },
}

impl BoundaryGenerator {
    pub fn eval(&self, p: Point) -> [f64; 2] {
        match self {
            BoundaryGenerator::Affine {
                matrix: m,
                offset: b,
            } => [
                m[0][0] * p[0] + m[0][1] * p[1] + b[0],
                m[1][0] * p[0] + m[1][1] * p[1] + b[1],
            ],
            BoundaryGenerator::FourierModes(modes) => {
                let theta = p[1].atan2(p[0]);
                let mut out = [0.0; 2];
                for m in modes {
                    let kt = m.k as f64 * theta;
                    out[m.component.min(1)] += m.amp_cos * kt.cos() + m.amp_sin * kt.sin();
                }
                out
            }
            BoundaryGenerator::Rigid { a, w } => [a[0] - w * p[1], a[1] + w * p[0]],
        }
    }

    pub fn trace(&self, mesh: Arc<TriMesh>) -> Result<BoundaryTrace> {
        trace_from_closure(mesh, |p| self.eval(p))
    }
}
