use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated a documented precondition.
    InvalidInput(String),
    /// The domain boundary is not `C^{1,1}` (for example a sharp corner).
    NonSmoothBoundary(String),
    /// The mesh failed a structural check.
    InvalidMesh(String),
    /// No element of the mesh lies inside `Ω_d`.
    EmptySubdomain { d: f64 },
    /// Two objects that must live on one mesh do not.
    MeshMismatch,
    /// Conjugate gradients did not reach the requested tolerance.
    SolverDiverged { iterations: usize, residual: f64 },
    /// The rigid-motion Gram matrix is singular.
    DegenerateGram,
    /// `Θ(g) = 0`: the frequency is infinite.
    RigidTrace,
    /// The measured strain carries no information on part of the domain.
    IllPosed {
        degenerate_vertices: usize,
        bbox: [f64; 4],
    },
    /// A coefficient pair left the admissible `(α₀, β₀, M)` budget.
    BudgetViolation(String),
    /// A fit was requested on too little data.
    InsufficientData(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NonSmoothBoundary(msg) => write!(f, "boundary is not C^1,1: {msg}"),
            Error::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            Error::EmptySubdomain { d } => write!(f, "interior subdomain Ω_d is empty for d = {d}"),
            Error::MeshMismatch => write!(f, "fields live on different meshes"),
            Error::SolverDiverged {
                iterations,
                residual,
            } => write!(
                f,
                "conjugate gradients stopped after {iterations} iterations with relative residual {residual:e}"
            ),
            Error::DegenerateGram => write!(f, "rigid-motion Gram matrix is not positive definite"),
            Error::RigidTrace => write!(f, "trace is a rigid motion (Θ(g) = 0), frequency is infinite"),
            Error::IllPosed {
                degenerate_vertices,
                bbox,
            } => write!(
                f,
                "reconstruction is ill-posed: strain vanishes around {degenerate_vertices} vertices in [{}, {}] x [{}, {}]",
                bbox[0], bbox[1], bbox[2], bbox[3]
            ),
            Error::BudgetViolation(msg) => write!(f, "coefficient budget violated: {msg}"),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
