//! Element and element-side integrals shared by every block of the system.
//!
//! Ordering conventions inside an element block: flux entry `(a, b)` with
//! basis function `i` sits at `(2a + b)·d_k + i`; state component `a` with
//! basis function `j` at `a·d_{k+1} + j`. Edge traces are parametrized along
//! the global edge orientation.

use nalgebra::DMatrix;

use crate::fem::projection::edge_point;
use crate::fem::quadrature::UnsupportedDegree;
use crate::fem::{edge_quadrature, triangle_quadrature, EdgeBasis, EdgeRule, ElementMap, TriangleBasis, TriangleRule};
use crate::mesh::Mesh;
use crate::Point;

/// Bases, rules and reference tabulations for one polynomial degree `k`.
#[derive(Debug, Clone)]
pub struct Kernels {
    pub k: usize,
    /// `P^k(K)`: fluxes and pressures.
    pub basis_k: TriangleBasis,
    /// `P^{k+1}(K)`: states.
    pub basis_k1: TriangleBasis,
    /// `P^k(e)`: state traces and controls.
    pub edge_k: EdgeBasis,
    /// `P^{k+1}(e)`: pressure traces.
    pub edge_k1: EdgeBasis,
    pub tri_rule: TriangleRule,
    pub edge_rule: EdgeRule,
    pub data_rule: TriangleRule,
    tab_k: Vec<Vec<f64>>,
    tab_k1: Vec<Vec<f64>>,
    grad_k: Vec<Vec<Point>>,
    grad_k1: Vec<Vec<Point>>,
}

/// Integrals over one element.
#[derive(Debug, Clone)]
pub struct ElementMatrices {
    /// `(L, T)_K`, `4d_k × 4d_k`.
    pub flux_mass: DMatrix<f64>,
    /// `(y, ∇·T)_K`: rows flux tests, columns states.
    pub flux_state: DMatrix<f64>,
    /// `-(p, ∇·v)_K`: rows state tests, columns pressures.
    pub state_pressure: DMatrix<f64>,
    /// `(y, v)_K`, `2d_{k+1} × 2d_{k+1}`.
    pub state_mass: DMatrix<f64>,
    /// `(1, w)_K` for each pressure basis function.
    pub pressure_mean: Vec<f64>,
}

/// Trace integrals on one side `(K, e)`.
#[derive(Debug, Clone)]
pub struct SideMatrices {
    /// `∫_e ψ^k_m φ^{k+1}_j`.
    pub trace_state: DMatrix<f64>,
    /// `∫_e ψ^k_m φ^k_i`.
    pub trace_flux: DMatrix<f64>,
    /// `∫_e ψ^{k+1}_m φ^{k+1}_j`.
    pub trace_pressure: DMatrix<f64>,
    /// Outward normal of `K` on `e`.
    pub normal: Point,
    pub tangent: Point,
    pub length: f64,
}

fn tabulate(basis: &TriangleBasis, rule: &TriangleRule) -> (Vec<Vec<f64>>, Vec<Vec<Point>>) {
    rule.points.iter().map(|&xi| (basis.eval(xi), basis.grad(xi))).unzip()
}

impl Kernels {
    pub fn new(k: usize, assembly_degree: usize, data_degree: usize) -> Result<Self, UnsupportedDegree> {
        let basis_k = TriangleBasis::new(k);
        let basis_k1 = TriangleBasis::new(k + 1);
        let tri_rule = triangle_quadrature(assembly_degree)?;
        let edge_rule = edge_quadrature(assembly_degree)?;
        let data_rule = triangle_quadrature(data_degree)?;
        let (tab_k, grad_k) = tabulate(&basis_k, &tri_rule);
        let (tab_k1, grad_k1) = tabulate(&basis_k1, &tri_rule);
        Ok(Self {
            k,
            basis_k,
            basis_k1,
            edge_k: EdgeBasis::new(k),
            edge_k1: EdgeBasis::new(k + 1),
            tri_rule,
            edge_rule,
            data_rule,
            tab_k,
            tab_k1,
            grad_k,
            grad_k1,
        })
    }

    pub fn dk(&self) -> usize {
        self.basis_k.dim()
    }

    pub fn dk1(&self) -> usize {
        self.basis_k1.dim()
    }

    pub fn element_matrices(&self, map: &ElementMap) -> ElementMatrices {
        let (dk, dk1) = (self.dk(), self.dk1());
        let mut flux_mass = DMatrix::zeros(4 * dk, 4 * dk);
        let mut flux_state = DMatrix::zeros(4 * dk, 2 * dk1);
        let mut state_pressure = DMatrix::zeros(2 * dk1, dk);
        let mut state_mass = DMatrix::zeros(2 * dk1, 2 * dk1);
        let mut pressure_mean = vec![0.0; dk];
        for q in 0..self.tri_rule.len() {
            let w = self.tri_rule.weights[q] * map.det;
            let (phi, phi1) = (&self.tab_k[q], &self.tab_k1[q]);
            let gk: Vec<Point> = self.grad_k[q].iter().map(|&g| map.physical_gradient(g)).collect();
            let gk1: Vec<Point> = self.grad_k1[q].iter().map(|&g| map.physical_gradient(g)).collect();
            for i in 0..dk {
                pressure_mean[i] += w * phi[i];
                for i2 in 0..dk {
                    let m = w * phi[i] * phi[i2];
                    for c in 0..4 {
                        flux_mass[(c * dk + i, c * dk + i2)] += m;
                    }
                }
            }
            for a in 0..2 {
                for b in 0..2 {
                    for i in 0..dk {
                        for j in 0..dk1 {
                            flux_state[((2 * a + b) * dk + i, a * dk1 + j)] += w * phi1[j] * gk[i][b];
                        }
                    }
                }
                for j in 0..dk1 {
                    for i in 0..dk {
                        state_pressure[(a * dk1 + j, i)] -= w * phi[i] * gk1[j][a];
                    }
                    for j2 in 0..dk1 {
                        state_mass[(a * dk1 + j, a * dk1 + j2)] += w * phi1[j] * phi1[j2];
                    }
                }
            }
        }
        ElementMatrices { flux_mass, flux_state, state_pressure, state_mass, pressure_mean }
    }

    /// Trace matrices of element `t` on its local edge `slot`.
    pub fn side_matrices(&self, mesh: &Mesh, map: &ElementMap, t: usize, slot: usize) -> SideMatrices {
        let le = mesh.triangle_edges[t][slot];
        let edge = &mesh.edges[le.edge];
        let ends = mesh.edge_endpoints(le.edge);
        let (dk, dk1) = (self.dk(), self.dk1());
        let (mk, mq) = (self.edge_k.dim(), self.edge_k1.dim());
        let mut trace_state = DMatrix::zeros(mk, dk1);
        let mut trace_flux = DMatrix::zeros(mk, dk);
        let mut trace_pressure = DMatrix::zeros(mq, dk1);
        let mut phi = vec![0.0; dk];
        let mut phi1 = vec![0.0; dk1];
        let mut psi = vec![0.0; mk];
        let mut psi1 = vec![0.0; mq];
        for (s, w) in self.edge_rule.iter() {
            let w = w * edge.length;
            let xi = map.to_reference(edge_point(ends, s));
            self.basis_k.eval_into(xi, &mut phi);
            self.basis_k1.eval_into(xi, &mut phi1);
            self.edge_k.eval_into(s, &mut psi);
            self.edge_k1.eval_into(s, &mut psi1);
            for m in 0..mk {
                for j in 0..dk1 {
                    trace_state[(m, j)] += w * psi[m] * phi1[j];
                }
                for i in 0..dk {
                    trace_flux[(m, i)] += w * psi[m] * phi[i];
                }
            }
            for m in 0..mq {
                for j in 0..dk1 {
                    trace_pressure[(m, j)] += w * psi1[m] * phi1[j];
                }
            }
        }
        let sgn = f64::from(le.sign);
        SideMatrices {
            trace_state,
            trace_flux,
            trace_pressure,
            normal: [sgn * edge.normal[0], sgn * edge.normal[1]],
            tangent: edge.tangent,
            length: edge.length,
        }
    }

    /// `(f, v)_K` for a vector field `f`, using the data rule.
    pub fn load_vector(&self, map: &ElementMap, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let dk1 = self.dk1();
        let mut out = vec![0.0; 2 * dk1];
        let mut phi1 = vec![0.0; dk1];
        for (xi, w) in self.data_rule.iter() {
            let w = w * map.det;
            self.basis_k1.eval_into(xi, &mut phi1);
            let v = f(map.to_physical(xi));
            for a in 0..2 {
                for j in 0..dk1 {
                    out[a * dk1 + j] += w * v[a] * phi1[j];
                }
            }
        }
        out
    }
}
