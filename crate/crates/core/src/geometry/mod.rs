//! Domains with `C^{1,1}` boundary, their triangulations, the interior
//! subdomains `Ω_d` and quadratures on balls `B_r(x)`.

mod ball;
mod domain;
mod mask;
mod mesh;

pub use ball::{ball_quadrature, point_triangle_distance, BallQuadrature, LEAF_DIVISOR};
pub use domain::{Domain, DomainKind, DomainSpec};
pub use mask::{interior_mask, SubdomainMask};
pub use mesh::{barycentric, build_mesh, from_barycentric, TriMesh, BOUNDARY_TOLERANCE};
