use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::mesh::{barycentric, dist, from_barycentric, signed_area, TriMesh};
use crate::quadrature::triangle_rule;
use crate::Point;

/// Cut leaves are refined until their diameter is at most `r / LEAF_DIVISOR`.
pub const LEAF_DIVISOR: f64 = 16.0;

/// Quadrature for integrals over `B_r(center) ∩ Ω`.
///
/// Each node remembers the mesh element it lies in and its barycentric
/// coordinates there, so finite-element fields can be evaluated directly.
#[derive(Debug, Clone)]
pub struct BallQuadrature {
    pub center: Point,
    pub radius: f64,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub elements: Vec<usize>,
    pub barycentric: Vec<[f64; 3]>,
    /// The ball reaches outside the domain.
    pub clipped: bool,
    /// Total area of the leaves cut by the circle.
    pub straddle_area: f64,
}

impl BallQuadrature {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w f(x)` over the quadrature nodes.
    pub fn integrate(&self, mut f: impl FnMut(usize, [f64; 3], Point) -> f64) -> f64 {
        (0..self.len())
            .map(|q| self.weights[q] * f(self.elements[q], self.barycentric[q], self.points[q]))
            .sum()
    }
}

// a sub-triangle of an element, as barycentric corners in the parent
type Leaf = [[f64; 3]; 3];

/// Builds a quadrature for `B_r(center) ∩ Ω`.
///
/// Elements inside the ball use a rule exact to degree `order`. Elements cut
/// by the circle are split into four recursively until the cut leaves have
/// diameter at most `r / LEAF_DIVISOR`; each cut leaf is then replaced by the
/// convex polygon spanned by its corners inside the ball and the points where
/// its edges cross the circle, integrated with the same rule on a fan. The
/// area lost is the sum of thin circular segments, about `s² / (6 r²)` of the
/// ball area for leaves of size `s`.
pub fn ball_quadrature(mesh: &TriMesh, center: Point, r: f64, order: u32) -> BallQuadrature {
    let mut quad = BallQuadrature {
        center,
        radius: r,
        points: Vec::new(),
        weights: Vec::new(),
        elements: Vec::new(),
        barycentric: Vec::new(),
        clipped: mesh.domain().distance_to_boundary(center) < r,
        straddle_area: 0.0,
    };
    if !(r > 0.0) {
        return quad;
    }
    let rule = triangle_rule(order);
    let r2 = r * r;
    let inside = |p: Point| (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2) <= r2;
    let candidates =
        mesh.triangles_near(center[0] - r, center[0] + r, center[1] - r, center[1] + r);
    let identity: Leaf = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let target = r / LEAF_DIVISOR;

    for t in candidates {
        let tri = mesh.triangle_points(t);
        if point_triangle_distance(center, tri) > r {
            continue;
        }
        let element_area = signed_area(tri[0], tri[1], tri[2]);
        let mut diam = dist(tri[0], tri[1])
            .max(dist(tri[1], tri[2]))
            .max(dist(tri[2], tri[0]));
        let mut cut: Vec<Leaf> = Vec::new();
        let mut full: Vec<Leaf> = Vec::new();
        classify(identity, &tri, center, r, &inside, &mut full, &mut cut);
        while !cut.is_empty() && diam > target {
            diam *= 0.5;
            let previous = core::mem::take(&mut cut);
            for leaf in previous {
                for child in split(leaf) {
                    classify(child, &tri, center, r, &inside, &mut full, &mut cut);
                }
            }
        }
        for leaf in full {
            let area = element_area * leaf_fraction(&leaf);
            for (l, w) in rule.iter() {
                let bary = combine(&leaf, l);
                quad.push(t, bary, from_barycentric(tri, bary), w * area);
            }
        }
        for leaf in cut {
            let corners = leaf.map(|b| from_barycentric(tri, b));
            quad.straddle_area += element_area * leaf_fraction(&leaf);
            let poly = clip_to_disk(&corners, center, r, &inside);
            for k in 1..poly.len().saturating_sub(1) {
                let sub = [poly[0], poly[k], poly[k + 1]];
                let area = signed_area(sub[0], sub[1], sub[2]);
                if !(area > 0.0) {
                    continue;
                }
                for (l, w) in rule.iter() {
                    let p = from_barycentric(sub, *l);
                    quad.push(t, barycentric(tri, p), p, w * area);
                }
            }
        }
    }
    quad
}

// Corners of `tri` inside the disk and the crossings of its edges with the
// circle, in counter-clockwise order.
fn clip_to_disk(
    tri: &[Point; 3],
    center: Point,
    r: f64,
    inside: &impl Fn(Point) -> bool,
) -> Vec<Point> {
    let mut out = Vec::with_capacity(6);
    for k in 0..3 {
        let a = tri[k];
        let b = tri[(k + 1) % 3];
        if inside(a) {
            out.push(a);
        }
        let d = [b[0] - a[0], b[1] - a[1]];
        let f = [a[0] - center[0], a[1] - center[1]];
        let qa = d[0] * d[0] + d[1] * d[1];
        let qb = 2.0 * (f[0] * d[0] + f[1] * d[1]);
        let qc = f[0] * f[0] + f[1] * f[1] - r * r;
        let disc = qb * qb - 4.0 * qa * qc;
        if !(qa > 0.0) || disc < 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                out.push([a[0] + t * d[0], a[1] + t * d[1]]);
            }
        }
    }
    out
}

impl BallQuadrature {
    fn push(&mut self, element: usize, bary: [f64; 3], p: Point, w: f64) {
        self.elements.push(element);
        self.barycentric.push(bary);
        self.points.push(p);
        self.weights.push(w);
    }
}

fn classify(
    leaf: Leaf,
    tri: &[Point; 3],
    center: Point,
    r: f64,
    inside: &impl Fn(Point) -> bool,
    full: &mut Vec<Leaf>,
    cut: &mut Vec<Leaf>,
) {
    let corners = leaf.map(|b| from_barycentric(*tri, b));
    if corners.iter().all(|&p| inside(p)) {
        full.push(leaf);
    } else if point_triangle_distance(center, corners) <= r {
        cut.push(leaf);
    }
}

fn split(leaf: Leaf) -> [Leaf; 4] {
    let mid = |a: [f64; 3], b: [f64; 3]| {
        [
            0.5 * (a[0] + b[0]),
            0.5 * (a[1] + b[1]),
            0.5 * (a[2] + b[2]),
        ]
    };
    let [a, b, c] = leaf;
    let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
    [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
}

fn combine(leaf: &Leaf, l: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, corner) in leaf.iter().enumerate() {
        for i in 0..3 {
            out[i] += l[k] * corner[i];
        }
    }
    out
}

// area of a barycentric sub-triangle relative to its parent
fn leaf_fraction(leaf: &Leaf) -> f64 {
    let [a, b, c] = leaf;
    let det = (b[1] - a[1]) * (c[2] - a[2]) - (c[1] - a[1]) * (b[2] - a[2]);
    det.abs()
}

/// Euclidean distance from `p` to the closed triangle `tri`.
pub fn point_triangle_distance(p: Point, tri: [Point; 3]) -> f64 {
    let area = signed_area(tri[0], tri[1], tri[2]);
    let l0 = signed_area(p, tri[1], tri[2]) / area;
    let l1 = signed_area(tri[0], p, tri[2]) / area;
    let l2 = 1.0 - l0 - l1;
    if l0 >= 0.0 && l1 >= 0.0 && l2 >= 0.0 {
        return 0.0;
    }
    (0..3)
        .map(|k| point_segment_distance(p, tri[k], tri[(k + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, DomainSpec};
    use core::f64::consts::PI;

    #[test]
    fn ball_area_and_odd_moment() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.05).unwrap();
        let q = ball_quadrature(&mesh, [0.0, 0.0], 0.3, 4);
        let exact = PI * 0.09;
        assert!(
            (q.area() - exact).abs() < 1e-3 * exact,
            "{} vs {exact}",
            q.area()
        );
        let m1 = q.integrate(|_, _, p| p[0]);
        assert!(m1.abs() < 1e-3 * exact * 0.3);
        assert!(!q.clipped);
        for &p in &q.points {
            assert!(p[0].hypot(p[1]) <= 0.3 + 1e-12);
        }
    }

    #[test]
    fn zero_radius_is_empty() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.1).unwrap();
        let q = ball_quadrature(&mesh, [0.2, 0.1], 0.0, 4);
        assert!(q.is_empty());
        assert_eq!(q.integrate(|_, _, _| 1.0), 0.0);
    }

    #[test]
    fn clipping_is_reported() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.1).unwrap();
        let q = ball_quadrature(&mesh, [0.9, 0.0], 0.2, 2);
        assert!(q.clipped);
        assert!(q.area() < PI * 0.04);
        for &p in &q.points {
            assert!(p[0].hypot(p[1]) <= 1.0);
        }
    }

    #[test]
    fn point_triangle_distance_cases() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert_eq!(point_triangle_distance([0.2, 0.2], tri), 0.0);
        assert!((point_triangle_distance([2.0, 0.0], tri) - 1.0).abs() < 1e-15);
        assert!((point_triangle_distance([1.0, 1.0], tri) - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
