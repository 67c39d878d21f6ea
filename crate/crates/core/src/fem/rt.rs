//! Raviart–Thomas interpolation into `RT_{k+1}(K) = [P^{k+1}(K)]² + x P^{k+1}(K)`.
//!
//! Used as an oracle only: the interpolant is fixed by normal moments on each
//! edge against `P^{k+1}(e)` and interior moments against `[P^k(K)]²`.

use nalgebra::{DMatrix, DVector};

use super::basis::{monomial_exponents, EdgeBasis};
use super::element::ElementMap;
use super::projection::edge_point;
use super::quadrature::{edge_quadrature, triangle_quadrature, UnsupportedDegree};
use crate::Point;

/// A field in `RT_{k+1}(K)` expressed in scaled local monomials
/// `x̃ = (x - center) / scale`.
#[derive(Debug, Clone)]
pub struct RtField {
    center: Point,
    scale: f64,
    /// Monomials of degree `≤ k + 1`.
    exponents: Vec<(usize, usize)>,
    /// Exponents of the degree-`k+1`-homogeneous monomials multiplied by `x̃`.
    top: Vec<(usize, usize)>,
    coeffs: Vec<f64>,
}

fn mono(x: Point, (a, b): (usize, usize)) -> f64 {
    x[0].powi(a as i32) * x[1].powi(b as i32)
}

fn mono_grad(x: Point, (a, b): (usize, usize)) -> Point {
    let dx = if a == 0 { 0.0 } else { a as f64 * x[0].powi(a as i32 - 1) * x[1].powi(b as i32) };
    let dy = if b == 0 { 0.0 } else { b as f64 * x[0].powi(a as i32) * x[1].powi(b as i32 - 1) };
    [dx, dy]
}

impl RtField {
    fn local(&self, x: Point) -> Point {
        [(x[0] - self.center[0]) / self.scale, (x[1] - self.center[1]) / self.scale]
    }

    fn n_basis(&self) -> usize {
        2 * self.exponents.len() + self.top.len()
    }

    /// Values of every RT basis field at physical `x`.
    fn basis_values(&self, x: Point) -> Vec<Point> {
        let xl = self.local(x);
        let mut out = Vec::with_capacity(self.n_basis());
        for &e in &self.exponents {
            out.push([mono(xl, e), 0.0]);
        }
        for &e in &self.exponents {
            out.push([0.0, mono(xl, e)]);
        }
        for &e in &self.top {
            let m = mono(xl, e);
            out.push([xl[0] * m, xl[1] * m]);
        }
        out
    }

    /// Physical divergences of every basis field at `x`.
    fn basis_divergences(&self, x: Point) -> Vec<f64> {
        let xl = self.local(x);
        let s = self.scale;
        let mut out = Vec::with_capacity(self.n_basis());
        for &e in &self.exponents {
            out.push(mono_grad(xl, e)[0] / s);
        }
        for &e in &self.exponents {
            out.push(mono_grad(xl, e)[1] / s);
        }
        for &e in &self.top {
            let m = mono(xl, e);
            let g = mono_grad(xl, e);
            out.push((2.0 * m + xl[0] * g[0] + xl[1] * g[1]) / s);
        }
        out
    }

    pub fn eval(&self, x: Point) -> Point {
        self.basis_values(x)
            .iter()
            .zip(&self.coeffs)
            .fold([0.0, 0.0], |acc, (b, c)| [acc[0] + c * b[0], acc[1] + c * b[1]])
    }

    pub fn divergence(&self, x: Point) -> f64 {
        self.basis_divergences(x).iter().zip(&self.coeffs).map(|(d, c)| d * c).sum()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }
}

/// RT interpolant of `v` on the triangle `vertices` (counterclockwise), with
/// moments integrated exactly up to degree `quad_degree`.
pub fn rt_project(
    v: impl Fn(Point) -> Point,
    vertices: [Point; 3],
    k: usize,
    quad_degree: usize,
) -> Result<RtField, UnsupportedDegree> {
    let map = ElementMap::new(vertices);
    let center = [
        (vertices[0][0] + vertices[1][0] + vertices[2][0]) / 3.0,
        (vertices[0][1] + vertices[1][1] + vertices[2][1]) / 3.0,
    ];
    let dist = |p: Point, q: Point| (p[0] - q[0]).hypot(p[1] - q[1]);
    let scale = dist(vertices[0], vertices[1]).max(dist(vertices[1], vertices[2])).max(dist(vertices[2], vertices[0]));
    let exponents = monomial_exponents(k + 1);
    let top = exponents.iter().copied().filter(|&(a, b)| a + b == k + 1).collect();
    let mut field = RtField { center, scale, exponents, top, coeffs: Vec::new() };
    let n = field.n_basis();

    let edge_rule = edge_quadrature(quad_degree)?;
    let tri_rule = triangle_quadrature(quad_degree)?;
    let edge_basis = EdgeBasis::new(k + 1);
    let interior_exponents = monomial_exponents(k);
    let n_dof = 3 * edge_basis.dim() + 2 * interior_exponents.len();
    debug_assert_eq!(n_dof, n);

    let mut dofs = DMatrix::zeros(n_dof, n);
    let mut target = DVector::zeros(n_dof);
    for e in 0..3 {
        let ends = [vertices[e], vertices[(e + 1) % 3]];
        let d = [ends[1][0] - ends[0][0], ends[1][1] - ends[0][1]];
        let len = d[0].hypot(d[1]);
        let normal = [d[1] / len, -d[0] / len];
        for (s, w) in edge_rule.iter() {
            let x = edge_point(ends, s);
            let psi = edge_basis.eval(s);
            let vals = field.basis_values(x);
            let vn = {
                let f = v(x);
                f[0] * normal[0] + f[1] * normal[1]
            };
            for (m, &p) in psi.iter().enumerate() {
                let row = e * edge_basis.dim() + m;
                for (j, b) in vals.iter().enumerate() {
                    dofs[(row, j)] += w * len * p * (b[0] * normal[0] + b[1] * normal[1]);
                }
                target[row] += w * len * p * vn;
            }
        }
    }
    let offset = 3 * edge_basis.dim();
    for (xi, w) in tri_rule.iter() {
        let x = map.to_physical(xi);
        let xl = field.local(x);
        let vals = field.basis_values(x);
        let f = v(x);
        let wq = w * map.det;
        for (i, &e) in interior_exponents.iter().enumerate() {
            let q = mono(xl, e);
            for comp in 0..2 {
                let row = offset + comp * interior_exponents.len() + i;
                for (j, b) in vals.iter().enumerate() {
                    dofs[(row, j)] += wq * q * b[comp];
                }
                target[row] += wq * q * f[comp];
            }
        }
    }
    let lu = dofs.lu();
    let coeffs = lu.solve(&target).expect("RT degrees of freedom are unisolvent");
    field.coeffs = coeffs.iter().copied().collect();
    Ok(field)
}
