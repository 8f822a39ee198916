//! Lagrange shape functions on straight triangles.
//!
//! Local P2 node order is `[v0, v1, v2, m01, m12, m20]`, matching
//! [`TriMesh::element_nodes`](crate::geometry::TriMesh::element_nodes).

use crate::Point;

/// Gradients of the barycentric coordinates of `tri` together with its area.
pub fn barycentric_gradients(tri: &[Point; 3]) -> ([Point; 3], f64) {
    let [a, b, c] = *tri;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let inv = 1.0 / det;
    let g = [
        [(b[1] - c[1]) * inv, (c[0] - b[0]) * inv],
        [(c[1] - a[1]) * inv, (a[0] - c[0]) * inv],
        [(a[1] - b[1]) * inv, (b[0] - a[0]) * inv],
    ];
    (g, 0.5 * det)
}

pub fn p1_values(l: [f64; 3]) -> [f64; 3] {
    l
}

pub fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

/// Physical gradients of the six P2 shape functions at barycentric point `l`.
pub fn p2_gradients(l: [f64; 3], grad_l: &[Point; 3]) -> [Point; 6] {
    let vert = |i: usize| {
        let f = 4.0 * l[i] - 1.0;
        [f * grad_l[i][0], f * grad_l[i][1]]
    };
    let edge = |i: usize, j: usize| {
        [
            4.0 * (l[i] * grad_l[j][0] + l[j] * grad_l[i][0]),
            4.0 * (l[i] * grad_l[j][1] + l[j] * grad_l[i][1]),
        ]
    };
    [
        vert(0),
        vert(1),
        vert(2),
        edge(0, 1),
        edge(1, 2),
        edge(2, 0),
    ]
}
