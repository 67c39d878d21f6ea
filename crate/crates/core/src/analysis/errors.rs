//! Error norms and divergence / conformity metrics of discrete solutions.

use super::exact::ExactFields;
use crate::fem::projection::edge_point;
use crate::fem::quadrature::UnsupportedDegree;
use crate::fem::{edge_quadrature, triangle_quadrature, ElementMap, TriangleBasis};
use crate::hdg::{DiscreteSolution, Field};
use crate::mesh::Mesh;
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub y: f64,
    pub flux_y: f64,
    pub p: f64,
    pub u: f64,
    pub z: f64,
    pub flux_z: f64,
    pub q: f64,
    pub div_y: f64,
    pub div_z: f64,
    pub jump_y: f64,
    pub jump_z: f64,
}

impl ErrorReport {
    pub fn is_valid(&self) -> bool {
        self.values().iter().all(|v| v.is_finite() && *v >= 0.0)
    }

    fn values(&self) -> [f64; 11] {
        [
            self.y,
            self.flux_y,
            self.p,
            self.u,
            self.z,
            self.flux_z,
            self.q,
            self.div_y,
            self.div_z,
            self.jump_y,
            self.jump_z,
        ]
    }
}

/// Divergence of a `[P^m(K)]²` field at reference point `xi`.
fn divergence_at(coeffs: &[f64], map: &ElementMap, basis: &TriangleBasis, xi: Point) -> f64 {
    let d = basis.dim();
    basis
        .grad(xi)
        .iter()
        .enumerate()
        .map(|(j, &g)| {
            let g = map.physical_gradient(g);
            coeffs[j] * g[0] + coeffs[d + j] * g[1]
        })
        .sum()
}

/// `max_K |K|⁻¹ ∫_K |∇·v|` over the elements, for component-major
/// `[P^m(K)]²` coefficients `coeffs(t)`.
pub fn divergence_metric<'a>(
    mesh: &Mesh,
    basis: &TriangleBasis,
    coeffs: impl Fn(usize) -> &'a [f64],
) -> Result<f64, UnsupportedDegree> {
    let rule = triangle_quadrature(2 * basis.degree() + 2)?;
    let mut worst = 0.0f64;
    for t in 0..mesh.n_triangles() {
        let map = ElementMap::new(mesh.triangle_vertices(t));
        let c = coeffs(t);
        let mean = rule.iter().map(|(xi, w)| 2.0 * w * divergence_at(c, &map, basis, xi).abs()).sum::<f64>();
        worst = worst.max(mean);
    }
    Ok(worst)
}

/// `max_e ‖[v·n]‖_{L²(e)}` over interior edges.
pub fn hdiv_conformity_metric(
    mesh: &Mesh,
    eval: impl Fn(usize, &ElementMap, Point) -> [f64; 2],
    quad_degree: usize,
) -> Result<f64, UnsupportedDegree> {
    let rule = edge_quadrature(quad_degree)?;
    let mut worst = 0.0f64;
    for (e, edge) in mesh.edges.iter().enumerate() {
        let [Some(t0), Some(t1)] = edge.triangles else { continue };
        let (m0, m1) = (ElementMap::new(mesh.triangle_vertices(t0)), ElementMap::new(mesh.triangle_vertices(t1)));
        let ends = mesh.edge_endpoints(e);
        let n = edge.normal;
        let mut sq = 0.0;
        for (s, w) in rule.iter() {
            let x = edge_point(ends, s);
            let (a, b) = (eval(t0, &m0, x), eval(t1, &m1, x));
            let j = (a[0] - b[0]) * n[0] + (a[1] - b[1]) * n[1];
            sq += w * edge.length * j * j;
        }
        worst = worst.max(sq.sqrt());
    }
    Ok(worst)
}

/// L² errors of every field against `exact`, with element and boundary rules
/// of exactness `quad_degree`.
pub fn compute_errors(
    mesh: &Mesh,
    sol: &DiscreteSolution,
    exact: &dyn ExactFields,
    quad_degree: usize,
) -> Result<ErrorReport, UnsupportedDegree> {
    let rule = triangle_quadrature(quad_degree)?;
    let erule = edge_quadrature(quad_degree)?;
    let mut sq = [0.0f64; 7];
    for t in 0..mesh.n_triangles() {
        let map = ElementMap::new(mesh.triangle_vertices(t));
        for (xi, w) in rule.iter() {
            let w = w * map.det;
            let x = map.to_physical(xi);
            let d2 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
            sq[0] += w * d2(&exact.y(x), &sol.eval_vector(Field::State, &map, t, x));
            sq[1] += w * d2(&exact.grad_y(x), &sol.eval_matrix(Field::Flux, &map, t, x));
            sq[2] += w * (exact.p(x) - sol.eval_scalar(Field::Pressure, &map, t, x)).powi(2);
            sq[4] += w * d2(&exact.z(x), &sol.eval_vector(Field::DualState, &map, t, x));
            sq[5] += w * d2(&exact.grad_z(x), &sol.eval_matrix(Field::DualFlux, &map, t, x));
            sq[6] += w * (exact.q(x) - sol.eval_scalar(Field::DualPressure, &map, t, x)).powi(2);
        }
    }
    for (e, edge) in mesh.edges.iter().enumerate() {
        if !edge.is_boundary() {
            continue;
        }
        let ends = mesh.edge_endpoints(e);
        for (s, w) in erule.iter() {
            let x = edge_point(ends, s);
            let d = exact.u(x, edge.tangent) - sol.eval_edge_scalar(Field::Control, e, s);
            sq[3] += w * edge.length * d * d;
        }
    }

    let basis = TriangleBasis::new(sol.degree() + 1);
    let jump_degree = 2 * (sol.degree() + 1);
    let div_y = divergence_metric(mesh, &basis, |t| sol.coeffs(Field::State, t))?;
    let div_z = divergence_metric(mesh, &basis, |t| sol.coeffs(Field::DualState, t))?;
    let jump_y = hdiv_conformity_metric(mesh, |t, m, x| sol.eval_vector(Field::State, m, t, x), jump_degree)?;
    let jump_z = hdiv_conformity_metric(mesh, |t, m, x| sol.eval_vector(Field::DualState, m, t, x), jump_degree)?;
    let [y, flux_y, p, u, z, flux_z, q] = sq.map(f64::sqrt);
    Ok(ErrorReport { y, flux_y, p, u, z, flux_z, q, div_y, div_z, jump_y, jump_z })
}
