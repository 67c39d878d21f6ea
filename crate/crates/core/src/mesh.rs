//! Uniform triangulations of rectangles with an oriented edge table.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::Point;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MeshError {
    #[error("number of cells per side must be at least 1")]
    NoCells,
    #[error("degenerate rectangle: width {width}, height {height}")]
    DegenerateDomain { width: f64, height: f64 },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("triangle {0} has non-positive signed area")]
    InvertedTriangle(usize),
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub min: Point,
    pub max: Point,
}

impl Rectangle {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn unit_square() -> Self {
        Self::new([0.0, 0.0], [1.0, 1.0])
    }

    pub fn square(side: f64) -> Self {
        Self::new([0.0, 0.0], [side, side])
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Interior,
    Boundary,
}

/// A mesh edge with a fixed global orientation from `vertices[0]` to
/// `vertices[1]`.
///
/// The normal is the direction rotated by -90°, and the tangent is the normal
/// rotated by +90° (so it coincides with the edge direction). Boundary edges
/// are oriented so that the normal points out of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub normal: Point,
    pub tangent: Point,
    pub length: f64,
    pub kind: EdgeKind,
    /// Adjacent triangles; the second entry is `None` on the boundary.
    pub triangles: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.kind == EdgeKind::Boundary
    }
}

/// Local edge of a triangle together with the orientation sign: `+1` when the
/// triangle's outward normal equals the stored edge normal, `-1` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalEdge {
    pub edge: usize,
    pub sign: i8,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// Local edge `i` of a triangle joins its vertices `i` and `(i + 1) % 3`.
    pub triangle_edges: Vec<[LocalEdge; 3]>,
    pub domain: Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshMetrics {
    /// Largest element diameter.
    pub h: f64,
    pub min_area: f64,
    /// `h` divided by the smallest element diameter.
    pub quasi_uniformity_ratio: f64,
}

/// Splits an `n_cells × n_cells` grid of `domain` into right triangles, every
/// cell cut along its lower-left to upper-right diagonal.
pub fn build_uniform_mesh(n_cells: usize, domain: Rectangle) -> Result<Mesh, MeshError> {
    if n_cells == 0 {
        return Err(MeshError::NoCells);
    }
    let (width, height) = (domain.width(), domain.height());
    if !(width > 0.0 && height > 0.0) || !width.is_finite() || !height.is_finite() {
        return Err(MeshError::DegenerateDomain { width, height });
    }
    let n = n_cells;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // exact end coordinates so boundary detection is robust
            let x = if i == n { domain.max[0] } else { domain.min[0] + width * i as f64 / n as f64 };
            let y = if j == n { domain.max[1] } else { domain.min[1] + height * j as f64 / n as f64 };
            vertices.push([x, y]);
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    classify_and_orient(vertices, triangles, domain)
}

/// Builds the edge table from raw triangles: classifies edges, fixes their
/// orientation and records per-triangle local signs.
pub fn classify_and_orient(
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    domain: Rectangle,
) -> Result<Mesh, MeshError> {
    for (t, tri) in triangles.iter().enumerate() {
        if signed_area(&vertices, tri) <= 0.0 {
            return Err(MeshError::InvertedTriangle(t));
        }
    }

    // (min, max) vertex pair -> (edge index, adjacent triangles with local slot)
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    let mut adjacency: Vec<((usize, usize), Vec<(usize, usize)>)> = Vec::new();
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let idx = *lookup.entry(key).or_insert_with(|| {
                adjacency.push((key, Vec::with_capacity(2)));
                adjacency.len() - 1
            });
            let adj = &mut adjacency[idx].1;
            let same_direction = adj.first().is_some_and(|&(t0, i0)| triangles[t0][i0] == a);
            if adj.len() == 2 || same_direction {
                return Err(MeshError::NonManifoldEdge(key.0, key.1));
            }
            adj.push((t, i));
        }
    }

    let mut edges = Vec::with_capacity(adjacency.len());
    let mut triangle_edges = vec![[LocalEdge { edge: usize::MAX, sign: 0 }; 3]; triangles.len()];
    for (e, ((lo, hi), adj)) in adjacency.iter().enumerate() {
        let kind = if adj.len() == 1 { EdgeKind::Boundary } else { EdgeKind::Interior };
        // orientation follows the counterclockwise traversal of the first triangle,
        // which makes boundary normals outward
        let (t0, slot0) = adj[0];
        let tri = triangles[t0];
        let (a, b) = (tri[slot0], tri[(slot0 + 1) % 3]);
        debug_assert!((a.min(b), a.max(b)) == (*lo, *hi));
        let (pa, pb) = (vertices[a], vertices[b]);
        let d = [pb[0] - pa[0], pb[1] - pa[1]];
        let length = d[0].hypot(d[1]);
        let normal = [d[1] / length, -d[0] / length];
        let tangent = [-normal[1], normal[0]];
        let mut adjacent = [None, None];
        for (s, &(t, slot)) in adj.iter().enumerate() {
            adjacent[s] = Some(t);
            let tri = triangles[t];
            let sign = if tri[slot] == a { 1 } else { -1 };
            triangle_edges[t][slot] = LocalEdge { edge: e, sign };
        }
        edges.push(Edge { vertices: [a, b], normal, tangent, length, kind, triangles: adjacent });
    }

    Ok(Mesh { vertices, triangles, edges, triangle_edges, domain })
}

fn signed_area(vertices: &[Point], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = tri.map(|v| vertices[v]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_interior_edges(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[t])
    }

    pub fn edge_endpoints(&self, e: usize) -> [Point; 2] {
        self.edges[e].vertices.map(|v| self.vertices[v])
    }

    /// Outward unit normal of triangle `t` on its local edge `slot`.
    pub fn outward_normal(&self, t: usize, slot: usize) -> Point {
        let le = self.triangle_edges[t][slot];
        let n = self.edges[le.edge].normal;
        let s = f64::from(le.sign);
        [s * n[0], s * n[1]]
    }

    pub fn metrics(&self) -> MeshMetrics {
        mesh_metrics(self)
    }

    /// Plain-text dump: a header line per section followed by one record per
    /// line (`x y`, `i j k`, `a b kind`).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(out, "{:.17e} {:.17e}", v[0], v[1]);
        }
        let _ = writeln!(out, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(out, "edges {}", self.edges.len());
        for e in &self.edges {
            let kind = match e.kind {
                EdgeKind::Interior => "interior",
                EdgeKind::Boundary => "boundary",
            };
            let _ = writeln!(out, "{} {} {}", e.vertices[0], e.vertices[1], kind);
        }
        out
    }
}

pub fn mesh_metrics(mesh: &Mesh) -> MeshMetrics {
    let mut h = 0.0f64;
    let mut min_diam = f64::INFINITY;
    let mut min_area = f64::INFINITY;
    for t in 0..mesh.n_triangles() {
        let [a, b, c] = mesh.triangle_vertices(t);
        let dist = |p: Point, q: Point| (p[0] - q[0]).hypot(p[1] - q[1]);
        let diam = dist(a, b).max(dist(b, c)).max(dist(c, a));
        h = h.max(diam);
        min_diam = min_diam.min(diam);
        min_area = min_area.min(mesh.area(t));
    }
    MeshMetrics { h, min_area, quasi_uniformity_ratio: h / min_diam }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Mesh {
        build_uniform_mesh(n, Rectangle::unit_square()).unwrap()
    }

    #[test]
    fn smallest_mesh() {
        let m = unit(1);
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.n_triangles(), 2);
        assert_eq!(m.n_edges(), 5);
        assert_eq!(m.n_boundary_edges(), 4);
        assert_eq!(m.n_interior_edges(), 1);
    }

    #[test]
    fn counts_match_euler_relation() {
        for n in 1..=9 {
            let m = unit(n);
            let (v, e, t) = (m.vertices.len() as i64, m.n_edges() as i64, m.n_triangles() as i64);
            assert_eq!(v - e + t + 1, 2);
            assert_eq!(m.n_boundary_edges(), 4 * n);
        }
        let m = unit(4);
        assert_eq!((m.vertices.len(), m.n_triangles(), m.n_edges(), m.n_boundary_edges()), (25, 32, 56, 16));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(build_uniform_mesh(0, Rectangle::unit_square()).unwrap_err(), MeshError::NoCells);
        assert!(matches!(
            build_uniform_mesh(2, Rectangle::new([0.0, 0.0], [1.0, 0.0])),
            Err(MeshError::DegenerateDomain { .. })
        ));
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert_eq!(
            classify_and_orient(verts, vec![[0, 2, 1]], Rectangle::unit_square()).unwrap_err(),
            MeshError::InvertedTriangle(0)
        );
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.2, 0.1]];
        let tris = vec![[0, 1, 2], [1, 3, 2], [0, 1, 4]];
        assert_eq!(
            classify_and_orient(verts, tris, Rectangle::unit_square()).unwrap_err(),
            MeshError::NonManifoldEdge(0, 1)
        );
    }

    #[test]
    fn bottom_edge_orientation() {
        let m = unit(1);
        let bottom = m
            .edges
            .iter()
            .find(|e| {
                let [a, b] = e.vertices.map(|v| m.vertices[v]);
                a[1] == 0.0 && b[1] == 0.0
            })
            .unwrap();
        assert_eq!(bottom.normal, [0.0, -1.0]);
        assert_eq!(bottom.tangent, [1.0, 0.0]);
    }

    #[test]
    fn boundary_normals_point_outward() {
        let m = unit(2);
        let boundary: Vec<_> = m.edges.iter().filter(|e| e.is_boundary()).collect();
        assert_eq!(boundary.len(), 8);
        for e in boundary {
            let [a, b] = e.vertices.map(|v| m.vertices[v]);
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let expected = if mid[1] == 0.0 {
                [0.0, -1.0]
            } else if mid[1] == 1.0 {
                [0.0, 1.0]
            } else if mid[0] == 0.0 {
                [-1.0, 0.0]
            } else {
                assert_eq!(mid[0], 1.0);
                [1.0, 0.0]
            };
            assert_eq!(e.normal, expected);
        }
    }

    #[test]
    fn interior_edges_have_opposite_signs() {
        let m = unit(5);
        let mut seen = vec![Vec::new(); m.n_edges()];
        for t in 0..m.n_triangles() {
            for le in m.triangle_edges[t] {
                seen[le.edge].push(le.sign);
            }
        }
        for (e, signs) in seen.iter().enumerate() {
            if m.edges[e].is_boundary() {
                assert_eq!(signs, &vec![1]);
            } else {
                assert_eq!(signs.len(), 2);
                assert_eq!(signs[0] + signs[1], 0);
            }
        }
    }

    #[test]
    fn edge_frames_are_orthonormal() {
        let m = unit(3);
        for e in &m.edges {
            let (n, t) = (e.normal, e.tangent);
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-15);
            assert!((t[0].hypot(t[1]) - 1.0).abs() < 1e-15);
            assert!((n[0] * t[0] + n[1] * t[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn areas_and_closed_boundaries() {
        let domain = Rectangle::new([-0.3, 0.2], [1.1, 0.9]);
        let m = build_uniform_mesh(7, domain).unwrap();
        let total: f64 = (0..m.n_triangles()).map(|t| m.area(t)).sum();
        assert!((total - domain.area()).abs() / domain.area() < 1e-13);
        for t in 0..m.n_triangles() {
            assert!(m.area(t) > 0.0);
            let mut s = [0.0, 0.0];
            for slot in 0..3 {
                let n = m.outward_normal(t, slot);
                let len = m.edges[m.triangle_edges[t][slot].edge].length;
                s[0] += n[0] * len;
                s[1] += n[1] * len;
            }
            assert!(s[0].abs() < 1e-13 && s[1].abs() < 1e-13);
        }
    }

    #[test]
    fn metrics_of_uniform_meshes() {
        let m = unit(4);
        assert!((m.metrics().h - 2f64.sqrt() / 4.0).abs() < 1e-15);
        let m = unit(8);
        let mm = m.metrics();
        assert!((mm.h - 2f64.sqrt() / 8.0).abs() < 1e-15);
        assert!((mm.quasi_uniformity_ratio - 1.0).abs() < 1e-12);
        let m = build_uniform_mesh(64, Rectangle::square(0.125)).unwrap();
        assert!((m.metrics().h - 2f64.sqrt() * 0.125 / 64.0).abs() < 1e-16);
    }

    #[test]
    fn text_dump_layout() {
        let m = unit(1);
        let text = m.to_text();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "vertices 4");
        assert_eq!(lines[5], "triangles 2");
        assert_eq!(lines[8], "edges 5");
        assert_eq!(lines.len(), 3 + 4 + 2 + 5);
        assert!(lines[9..].iter().all(|l| l.ends_with("interior") || l.ends_with("boundary")));
    }
}
