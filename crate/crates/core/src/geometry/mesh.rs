use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::domain::{Domain, DomainSpec};
use crate::error::{Error, Result};
use crate::Point;

/// Tolerance, relative to the domain scale, for boundary vertices to sit on
/// the analytic curve.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

/// A conforming, positively oriented triangulation of a [`Domain`].
///
/// Besides the vertices the mesh numbers the quadratic (P2) nodes: node `v`
/// for `v < vertex_count()` is a vertex, node `vertex_count() + e` is the
/// midpoint of edge `e`.
#[derive(Debug, Clone)]
pub struct TriMesh {
    domain: Domain,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_loop: Vec<usize>,
    boundary_arclength: Vec<f64>,
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    boundary_edges: Vec<usize>,
    on_boundary: Vec<bool>,
    node_on_boundary: Vec<bool>,
    h_max: f64,
    grid: TriangleGrid,
}

impl TriMesh {
    /// Assembles a mesh from raw parts and checks every structural invariant:
    /// orientation, conformity, a single closed boundary loop covering all
    /// boundary edges, and boundary vertices on the analytic curve.
    pub fn from_parts(
        domain: Domain,
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_loop: Vec<usize>,
    ) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() || nv < 3 {
            return Err(Error::InvalidMesh(format!(
                "need at least one triangle, got {} vertices and {} triangles",
                nv,
                triangles.len()
            )));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not positively oriented (signed area {area:e})"
                )));
            }
        }

        let (edges, triangle_edges, edge_use) = build_edges(&triangles)?;

        // boundary edges are those used by exactly one triangle
        let mut boundary_edge_count = 0usize;
        let mut next_on_boundary = vec![usize::MAX; nv];
        for (e, uses) in edge_use.iter().enumerate() {
            if let EdgeUse::Single(from) = uses {
                boundary_edge_count += 1;
                let [a, b] = edges[e];
                let to = if *from == a { b } else { a };
                if next_on_boundary[*from] != usize::MAX {
                    return Err(Error::InvalidMesh(format!(
                        "vertex {from} starts two boundary edges"
                    )));
                }
                next_on_boundary[*from] = to;
            }
        }
        if boundary_loop.len() != boundary_edge_count || boundary_loop.len() < 3 {
            return Err(Error::InvalidMesh(format!(
                "boundary loop has {} vertices but the mesh has {} boundary edges",
                boundary_loop.len(),
                boundary_edge_count
            )));
        }
        let mut on_boundary = vec![false; nv];
        for (j, &v) in boundary_loop.iter().enumerate() {
            let w = boundary_loop[(j + 1) % boundary_loop.len()];
            if v >= nv || next_on_boundary[v] != w {
                return Err(Error::InvalidMesh(format!(
                    "boundary loop step {v} -> {w} is not a counter-clockwise boundary edge"
                )));
            }
            if on_boundary[v] {
                return Err(Error::InvalidMesh(format!(
                    "boundary loop visits {v} twice"
                )));
            }
            on_boundary[v] = true;
        }

        let tol = BOUNDARY_TOLERANCE * domain.scale();
        for &v in &boundary_loop {
            let dist = domain.distance_to_boundary(vertices[v]).abs();
            if dist > tol {
                return Err(Error::InvalidMesh(format!(
                    "boundary vertex {v} is {dist:e} away from the boundary curve"
                )));
            }
        }

        let lookup = edge_lookup(&edges);
        let boundary_edges: Vec<usize> = (0..boundary_loop.len())
            .map(|j| {
                let a = boundary_loop[j];
                let b = boundary_loop[(j + 1) % boundary_loop.len()];
                find_edge(&lookup, a, b).expect("boundary edge exists")
            })
            .collect();
        let mut node_on_boundary = on_boundary.clone();
        node_on_boundary.resize(nv + edges.len(), false);
        for &e in &boundary_edges {
            node_on_boundary[nv + e] = true;
        }

        // unwrap the curve parameter into a cumulative, increasing arclength
        let perimeter = domain.perimeter();
        let mut boundary_arclength = Vec::with_capacity(boundary_loop.len());
        let mut prev = domain.arclength_of(vertices[boundary_loop[0]]);
        let mut acc = prev;
        boundary_arclength.push(acc);
        for &v in &boundary_loop[1..] {
            let s = domain.arclength_of(vertices[v]);
            acc += crate::wrap(s - prev, perimeter);
            prev = s;
            boundary_arclength.push(acc);
        }
        let wrap = boundary_arclength[0] + perimeter - acc;
        if !(wrap > 0.0) || acc - boundary_arclength[0] > perimeter {
            return Err(Error::InvalidMesh(
                "boundary loop does not wind once counter-clockwise".into(),
            ));
        }

        let h_max = edges
            .iter()
            .map(|&[a, b]| dist(vertices[a], vertices[b]))
            .fold(0.0, f64::max);
        let grid = TriangleGrid::new(&vertices, &triangles, h_max);

        Ok(TriMesh {
            domain,
            vertices,
            triangles,
            boundary_loop,
            boundary_arclength,
            edges,
            triangle_edges,
            boundary_edges,
            on_boundary,
            node_on_boundary,
            h_max,
            grid,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_loop(&self) -> &[usize] {
        &self.boundary_loop
    }

    /// Cumulative arclength of each boundary loop vertex.
    pub fn boundary_arclength(&self) -> &[f64] {
        &self.boundary_arclength
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Number of P2 nodes (vertices plus edge midpoints).
    pub fn node_count(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn node_point(&self, node: usize) -> Point {
        let nv = self.vertices.len();
        if node < nv {
            self.vertices[node]
        } else {
            let [a, b] = self.edges[node - nv];
            midpoint(self.vertices[a], self.vertices[b])
        }
    }

    /// P2 nodes of triangle `t`: three vertices then the midpoints of edges
    /// `(0,1)`, `(1,2)`, `(2,0)`.
    pub fn element_nodes(&self, t: usize) -> [usize; 6] {
        let [a, b, c] = self.triangles[t];
        let nv = self.vertices.len();
        let [e0, e1, e2] = self.triangle_edges[t];
        [a, b, c, nv + e0, nv + e1, nv + e2]
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        self.node_on_boundary[node]
    }

    /// Boundary P2 nodes in loop order, alternating vertex and edge midpoint,
    /// with the curve parameter attached to each: the vertex arclength, and
    /// the mean of its neighbours for a midpoint.
    pub fn boundary_nodes(&self) -> Vec<(usize, f64)> {
        let nb = self.boundary_loop.len();
        let nv = self.vertices.len();
        let perimeter = self.domain.perimeter();
        let mut out = Vec::with_capacity(2 * nb);
        for j in 0..nb {
            let s = self.boundary_arclength[j];
            let s_next = if j + 1 < nb {
                self.boundary_arclength[j + 1]
            } else {
                self.boundary_arclength[0] + perimeter
            };
            out.push((self.boundary_loop[j], s));
            out.push((nv + self.boundary_edges[j], 0.5 * (s + s_next)));
        }
        out
    }

    /// Flags of P2 nodes lying on the boundary.
    pub fn boundary_node_flags(&self) -> &[bool] {
        &self.node_on_boundary
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_degrees(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for k in 0..3 {
                let a = p[k];
                let b = p[(k + 1) % 3];
                let c = p[(k + 2) % 3];
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                min = min.min(cos.clamp(-1.0, 1.0).acos());
            }
        }
        min * 180.0 / PI
    }

    /// Triangles whose bounding boxes meet the axis-aligned box
    /// `[x0, x1] × [y0, y1]`, sorted and without duplicates.
    pub fn triangles_near(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<usize> {
        self.grid.query(x0, x1, y0, y1)
    }

    /// Triangle containing `p` together with its barycentric coordinates.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let eps = 1e-12;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for t in self.grid.query(p[0], p[0], p[1], p[1]) {
            let bary = barycentric(self.triangle_points(t), p);
            let worst = bary.iter().copied().fold(f64::INFINITY, f64::min);
            if worst >= -eps {
                return Some((t, bary));
            }
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((t, bary, worst));
            }
        }
        best.filter(|b| b.2 > -1e-9).map(|(t, bary, _)| (t, bary))
    }
}

/// Builds the ring triangulation of `spec` with longest edge close to
/// `h_target`.
///
/// Ring `k` of `N` is the boundary curve scaled by `k/N` and carries `6k`
/// nodes equally spaced in the curve's arclength; consecutive rings are
/// zipped together by parameter order. The outer ring is the boundary loop.
pub fn build_mesh(spec: DomainSpec, h_target: f64) -> Result<TriMesh> {
    let domain = Domain::new(spec)?;
    if !(h_target > 0.0 && h_target < spec.scale / 4.0) {
        return Err(Error::InvalidInput(format!(
            "mesh size must lie in (0, scale/4), got {h_target}"
        )));
    }
    let mut rings = (domain.max_extent() / h_target).ceil().max(2.0) as usize;
    loop {
        let mesh = ring_mesh(domain.clone(), rings)?;
        if mesh.h_max() <= 1.5 * h_target {
            return Ok(mesh);
        }
        rings += 1;
    }
}

fn ring_mesh(domain: Domain, rings: usize) -> Result<TriMesh> {
    let perimeter = domain.perimeter();
    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    let mut ring_start = vec![0usize];
    let mut boundary_points = Vec::new();
    for k in 1..=rings {
        ring_start.push(vertices.len());
        let n = 6 * k;
        let factor = k as f64 / rings as f64;
        for j in 0..n {
            let s = perimeter * j as f64 / n as f64;
            let p = domain.point_at(s);
            if k == rings {
                boundary_points.push(p);
            }
            vertices.push([factor * p[0], factor * p[1]]);
        }
    }
    // keep the outer ring exactly on the curve
    let outer = ring_start[rings];
    for (j, p) in boundary_points.into_iter().enumerate() {
        vertices[outer + j] = p;
    }

    let mut triangles = Vec::with_capacity(6 * rings * rings);
    let mut push = |tri: [usize; 3], vertices: &[Point]| {
        if signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]) > 0.0 {
            triangles.push(tri);
        } else {
            triangles.push([tri[0], tri[2], tri[1]]);
        }
    };
    for j in 0..6 {
        push([0, 1 + j, 1 + (j + 1) % 6], &vertices);
    }
    for k in 2..=rings {
        let inner_n = 6 * (k - 1);
        let outer_n = 6 * k;
        let inner = |i: usize| ring_start[k - 1] + i % inner_n;
        let outer = |j: usize| ring_start[k] + j % outer_n;
        let (mut i, mut j) = (0usize, 0usize);
        while i < inner_n || j < outer_n {
            // advance whichever ring has the smaller next parameter
            let advance_outer =
                i == inner_n || (j < outer_n && (j + 1) * inner_n <= (i + 1) * outer_n);
            if advance_outer {
                push([inner(i), outer(j), outer(j + 1)], &vertices);
                j += 1;
            } else {
                push([inner(i), outer(j), inner(i + 1)], &vertices);
                i += 1;
            }
        }
    }
    let boundary_loop = (0..6 * rings).map(|j| ring_start[rings] + j).collect();
    TriMesh::from_parts(domain, vertices, triangles, boundary_loop)
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

/// Barycentric coordinates of `p` in the triangle `tri`.
pub fn barycentric(tri: [Point; 3], p: Point) -> [f64; 3] {
    let area = signed_area(tri[0], tri[1], tri[2]);
    let l0 = signed_area(p, tri[1], tri[2]) / area;
    let l1 = signed_area(tri[0], p, tri[2]) / area;
    [l0, l1, 1.0 - l0 - l1]
}

/// Cartesian point of barycentric coordinates `bary` in `tri`.
pub fn from_barycentric(tri: [Point; 3], bary: [f64; 3]) -> Point {
    [
        bary[0] * tri[0][0] + bary[1] * tri[1][0] + bary[2] * tri[2][0],
        bary[0] * tri[0][1] + bary[1] * tri[1][1] + bary[2] * tri[2][1],
    ]
}

enum EdgeUse {
    // directed use (from vertex) by one triangle
    Single(usize),
    Double,
}

type EdgeTables = (Vec<[usize; 2]>, Vec<[usize; 3]>, Vec<EdgeUse>);

fn build_edges(triangles: &[[usize; 3]]) -> Result<EdgeTables> {
    // (lo, hi, from, triangle, local edge)
    let mut half: Vec<(usize, usize, usize, usize, usize)> =
        Vec::with_capacity(3 * triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let a = tri[k];
            let b = tri[(k + 1) % 3];
            half.push((a.min(b), a.max(b), a, t, k));
        }
    }
    half.sort_unstable();
    let mut edges = Vec::new();
    let mut uses = Vec::new();
    let mut triangle_edges = vec![[0usize; 3]; triangles.len()];
    let mut k = 0;
    while k < half.len() {
        let (lo, hi, from, t, local) = half[k];
        let id = edges.len();
        edges.push([lo, hi]);
        triangle_edges[t][local] = id;
        if k + 1 < half.len() && half[k + 1].0 == lo && half[k + 1].1 == hi {
            let (_, _, from2, t2, local2) = half[k + 1];
            if from2 == from {
                return Err(Error::InvalidMesh(format!(
                    "edge ({lo}, {hi}) is used twice in the same direction"
                )));
            }
            if k + 2 < half.len() && half[k + 2].0 == lo && half[k + 2].1 == hi {
                return Err(Error::InvalidMesh(format!(
                    "edge ({lo}, {hi}) is shared by more than two triangles"
                )));
            }
            triangle_edges[t2][local2] = id;
            uses.push(EdgeUse::Double);
            k += 2;
        } else {
            uses.push(EdgeUse::Single(from));
            k += 1;
        }
    }
    Ok((edges, triangle_edges, uses))
}

fn edge_lookup(edges: &[[usize; 2]]) -> Vec<([usize; 2], usize)> {
    let mut lookup: Vec<([usize; 2], usize)> = edges.iter().copied().zip(0..).collect();
    lookup.sort_unstable();
    lookup
}

fn find_edge(lookup: &[([usize; 2], usize)], a: usize, b: usize) -> Option<usize> {
    let key = [a.min(b), a.max(b)];
    lookup
        .binary_search_by(|probe| probe.0.cmp(&key))
        .ok()
        .map(|i| lookup[i].1)
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Debug, Clone)]
struct TriangleGrid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl TriangleGrid {
    fn new(vertices: &[Point], triangles: &[[usize; 3]], h_max: f64) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in vertices {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let cell = (2.0 * h_max).max(1e-300);
        let nx = (((x1 - x0) / cell).floor() as usize + 1).max(1);
        let ny = (((y1 - y0) / cell).floor() as usize + 1).max(1);
        let mut grid = TriangleGrid {
            origin: [x0, y0],
            cell,
            nx,
            ny,
            offsets: vec![0; nx * ny + 1],
            items: Vec::new(),
        };
        let ranges: Vec<_> = triangles
            .iter()
            .map(|tri| {
                let xs = tri.map(|v| vertices[v][0]);
                let ys = tri.map(|v| vertices[v][1]);
                let bx0 = xs.iter().copied().fold(f64::INFINITY, f64::min);
                let bx1 = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let by0 = ys.iter().copied().fold(f64::INFINITY, f64::min);
                let by1 = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                grid.cell_range(bx0, bx1, by0, by1)
            })
            .collect();
        for &(i0, i1, j0, j1) in &ranges {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    grid.offsets[j * nx + i + 1] += 1;
                }
            }
        }
        for c in 0..nx * ny {
            grid.offsets[c + 1] += grid.offsets[c];
        }
        let mut fill = grid.offsets.clone();
        grid.items = vec![0; grid.offsets[nx * ny]];
        for (t, &(i0, i1, j0, j1)) in ranges.iter().enumerate() {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let c = j * nx + i;
                    grid.items[fill[c]] = t;
                    fill[c] += 1;
                }
            }
        }
        grid
    }

    fn cell_range(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> (usize, usize, usize, usize) {
        let clamp_x = |x: f64| {
            (((x - self.origin[0]) / self.cell).floor().max(0.0) as usize).min(self.nx - 1)
        };
        let clamp_y = |y: f64| {
            (((y - self.origin[1]) / self.cell).floor().max(0.0) as usize).min(self.ny - 1)
        };
        (clamp_x(x0), clamp_x(x1), clamp_y(y0), clamp_y(y1))
    }

    fn query(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<usize> {
        let (i0, i1, j0, j1) = self.cell_range(x0, x1, y0, y1);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = j * self.nx + i;
                out.extend_from_slice(&self.items[self.offsets[c]..self.offsets[c + 1]]);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainKind;

    #[test]
    fn unit_disk_coarse_mesh() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.2).unwrap();
        assert!(mesh.h_max() <= 0.3);
        for p in mesh.vertices() {
            assert!(p[0].hypot(p[1]) <= 1.0 + 1e-12);
        }
        for &v in mesh.boundary_loop() {
            let p = mesh.vertices()[v];
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-10);
        }
        // Euler characteristic of a disk
        let chi = mesh.vertex_count() as isize - mesh.edges().len() as isize
            + mesh.triangle_count() as isize;
        assert_eq!(chi, 1);
    }

    #[test]
    fn rejects_bad_h() {
        assert!(build_mesh(DomainSpec::unit_disk(), 0.3).is_err());
        assert!(build_mesh(DomainSpec::unit_disk(), 0.0).is_err());
    }

    #[test]
    fn min_angle_at_least_twenty_degrees() {
        for kind in [
            DomainKind::UnitDisk,
            DomainKind::Ellipse { a: 1.5, b: 1.0 },
            DomainKind::SmoothedSquare { corner_radius: 0.3 },
        ] {
            let mesh = build_mesh(DomainSpec { kind, scale: 1.0 }, 0.08).unwrap();
            let angle = mesh.min_angle_degrees();
            assert!(angle >= 20.0, "{kind:?}: min angle {angle}");
        }
    }

    #[test]
    fn from_parts_rejects_flipped_triangle() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.2).unwrap();
        let mut tris = mesh.triangles().to_vec();
        tris[3].swap(0, 1);
        let err = TriMesh::from_parts(
            mesh.domain().clone(),
            mesh.vertices().to_vec(),
            tris,
            mesh.boundary_loop().to_vec(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)));
    }

    #[test]
    fn from_parts_rejects_broken_loop() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.2).unwrap();
        let mut lp = mesh.boundary_loop().to_vec();
        lp.swap(1, 2);
        assert!(TriMesh::from_parts(
            mesh.domain().clone(),
            mesh.vertices().to_vec(),
            mesh.triangles().to_vec(),
            lp
        )
        .is_err());
        let mut short = mesh.boundary_loop().to_vec();
        short.pop();
        assert!(TriMesh::from_parts(
            mesh.domain().clone(),
            mesh.vertices().to_vec(),
            mesh.triangles().to_vec(),
            short
        )
        .is_err());
    }

    #[test]
    fn from_parts_rejects_off_curve_boundary_vertex() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.2).unwrap();
        let mut verts = mesh.vertices().to_vec();
        let v = mesh.boundary_loop()[0];
        verts[v][0] *= 1.0 - 1e-6;
        assert!(TriMesh::from_parts(
            mesh.domain().clone(),
            verts,
            mesh.triangles().to_vec(),
            mesh.boundary_loop().to_vec()
        )
        .is_err());
    }

    #[test]
    fn boundary_nodes_alternate_and_are_flagged() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.2).unwrap();
        let nodes = mesh.boundary_nodes();
        assert_eq!(nodes.len(), 2 * mesh.boundary_loop().len());
        let flags = mesh.boundary_node_flags();
        assert_eq!(flags.iter().filter(|&&f| f).count(), nodes.len());
        for w in nodes.windows(2) {
            assert!(w[1].1 > w[0].1);
        }
        for &(n, _) in &nodes {
            assert!(mesh.is_boundary_node(n));
        }
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let mesh = build_mesh(DomainSpec::unit_disk(), 0.1).unwrap();
        for p in [[0.0, 0.0], [0.31, -0.42], [-0.7, 0.1], [0.0, 0.999]] {
            let (t, bary) = mesh.locate(p).unwrap();
            let q = from_barycentric(mesh.triangle_points(t), bary);
            assert!(dist(p, q) < 1e-12);
        }
        assert!(mesh.locate([2.0, 0.0]).is_none());
    }
}
