//! Property suites checked on assembled operators and solved systems.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::exact::Example1;
use crate::fem::{
    edge_quadrature, eval_edge, eval_element, l2_project_edge, l2_project_element, rt_project, triangle_quadrature,
    EdgeBasis, ElementMap, TriangleBasis,
};
use crate::hdg::{primal_operator, solve_problem, DiscreteSolution, DofLayout, Field, ProblemConfig, ProblemData};
use crate::mesh::{build_uniform_mesh, Mesh, Rectangle};
use crate::solver::CscMatrix;
use crate::Point;

/// Worst observed deviation of one suite against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }

    pub fn summary(&self) -> String {
        format!(
            "{:<20} {} worst={:.3e} tol={:.0e} cases={}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.worst,
            self.tolerance,
            self.cases
        )
    }
}

/// `wᵀ B x`.
fn bilinear(b: &CscMatrix, w: &[f64], x: &[f64]) -> f64 {
    b.iter().map(|(i, j, v)| w[i] * v * x[j]).sum()
}

/// `‖L‖² + Σ τ_e ‖P_M y − ŷ‖²_e` over element sides, with `ŷ = 0` on the
/// boundary, computed by quadrature from the coefficients in `sol`.
fn coercivity_oracle(mesh: &Mesh, sol: &DiscreteSolution) -> f64 {
    let k = sol.degree();
    let rule = triangle_quadrature(2 * k + 2).unwrap();
    let erule = edge_quadrature(2 * k + 4).unwrap();
    let edge_k = EdgeBasis::new(k);
    let h = mesh.metrics().h;
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let map = ElementMap::new(mesh.triangle_vertices(t));
        for (xi, w) in rule.iter() {
            let x = map.to_physical(xi);
            let l = sol.eval_matrix(Field::Flux, &map, t, x);
            total += w * map.det * l.iter().map(|v| v * v).sum::<f64>();
        }
        for le in mesh.triangle_edges[t] {
            let edge = &mesh.edges[le.edge];
            let ends = mesh.edge_endpoints(le.edge);
            let trace = |x: Point| sol.eval_vector(Field::State, &map, t, x);
            let pm = l2_project_edge::<2>(trace, ends, &edge_k, &erule);
            let tau = sol.config.stabilization.value(edge.length, h);
            for (s, w) in erule.iter() {
                let p = eval_edge::<2>(&pm, &edge_k, s);
                let hat =
                    if edge.is_boundary() { [0.0; 2] } else { sol.eval_edge_vector(Field::StateTrace, le.edge, s) };
                total += tau * w * edge.length * ((p[0] - hat[0]).powi(2) + (p[1] - hat[1]).powi(2));
            }
        }
    }
    total
}

/// Random coefficient vectors on the primal operator fields against the
/// energy identity of the HDG operator.
pub fn coercivity_suite(samples: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mesh = build_uniform_mesh(3, Rectangle::new([0.0, 0.0], [1.0, 0.75])).unwrap();
    let degrees = [0, 1, 2];
    let operators: Vec<_> = degrees
        .iter()
        .map(|&k| {
            let config = ProblemConfig::new(k);
            (config, DofLayout::new(&mesh, k), primal_operator(&mesh, &config).unwrap())
        })
        .collect();
    for i in 0..samples {
        let (config, layout, b) = &operators[i % degrees.len()];
        let n = layout.operator_len();
        let mut full = vec![0.0; layout.total()];
        for v in &mut full[..n] {
            *v = rng.random_range(-1.0..1.0);
        }
        let x = &full[..n];
        let form = bilinear(b, x, x);
        let sol = DiscreteSolution::new(layout.clone(), full.clone(), *config);
        let oracle = coercivity_oracle(&mesh, &sol);
        worst = worst.max((form - oracle).abs() / oracle);
    }
    SuiteOutcome { name: "coercivity", worst, tolerance: 1e-10, cases: samples }
}

/// Adjoint identity `B(x; w') = B(x'; w)` at the solved primal and dual
/// fields, with `w' = (−G, z, q, q̂, ẑ)`, `x' = (G, z, −q, −q̂, ẑ)` and
/// `w = (−L, y, p, p̂, ŷ)`.
pub fn adjoint_symmetry_residual(mesh: &Mesh, sol: &DiscreteSolution) -> f64 {
    let b = primal_operator(mesh, &sol.config).unwrap();
    let layout = &sol.layout;
    let n = layout.operator_len();
    let primal = &sol.values[..n];
    let dual = &sol.values[n..2 * n];
    let flip = |v: &[f64], fields: &[Field]| {
        let mut out = v.to_vec();
        for &f in fields {
            for i in layout.operator_range(f) {
                out[i] = -out[i];
            }
        }
        out
    };
    let w1 = flip(dual, &[Field::Flux]);
    let x2 = flip(dual, &[Field::Pressure, Field::PressureTrace]);
    let w2 = flip(primal, &[Field::Flux]);
    let (lhs, rhs) = (bilinear(&b, &w1, primal), bilinear(&b, &w2, &x2));
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
}

pub fn adjoint_symmetry_suite() -> SuiteOutcome {
    let mut worst = 0.0f64;
    let cases = [(0, 2, 4), (1, 2, 4), (0, 6, 8), (2, 4, 2)];
    for (k, n, cells) in cases {
        let mesh = build_uniform_mesh(cells, Rectangle::unit_square()).unwrap();
        let (_, sol) = solve_problem(&mesh, &ProblemConfig::new(k), &Example1::new(n)).unwrap();
        worst = worst.max(adjoint_symmetry_residual(&mesh, &sol));
    }
    SuiteOutcome { name: "adjoint-symmetry", worst, tolerance: 1e-9, cases: cases.len() }
}

struct Homogeneous;

impl ProblemData for Homogeneous {
    fn source(&self, _: Point) -> [f64; 2] {
        [0.0; 2]
    }

    fn target(&self, _: Point) -> [f64; 2] {
        [0.0; 2]
    }
}

/// `max |x|` of the solution with zero source and target.
pub fn homogeneous_solution_norm(n_cells: usize, k: usize) -> f64 {
    let mesh = build_uniform_mesh(n_cells, Rectangle::unit_square()).unwrap();
    let (_, sol) = solve_problem(&mesh, &ProblemConfig::new(k), &Homogeneous).unwrap();
    sol.values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn uniqueness_suite() -> SuiteOutcome {
    let cases = [(4, 0), (4, 1), (2, 2)];
    let worst = cases.iter().map(|&(c, k)| homogeneous_solution_norm(c, k)).fold(0.0, f64::max);
    SuiteOutcome { name: "uniqueness", worst, tolerance: 1e-10, cases: cases.len() }
}

/// Idempotence and residual orthogonality of the element L² projection.
pub fn projection_suite() -> SuiteOutcome {
    let mesh = build_uniform_mesh(2, Rectangle::new([0.0, 0.0], [1.5, 1.0])).unwrap();
    let f = |x: Point| [(PI * x[0]).sin() * (2.0 * x[1]).exp(), x[0] * x[1].cos()];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for m in 0..=3 {
        let basis = TriangleBasis::new(m);
        let rule = triangle_quadrature(2 * m + 12).unwrap();
        for t in 0..mesh.n_triangles() {
            let map = ElementMap::new(mesh.triangle_vertices(t));
            let c = l2_project_element::<2>(f, &map, &basis, &rule);
            let pf = |x: Point| eval_element::<2>(&c, &map, &basis, x);
            let again = l2_project_element::<2>(pf, &map, &basis, &rule);
            let scale = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let idem = c.iter().zip(&again).fold(0.0f64, |a, (u, v)| a.max((u - v).abs())) / scale;
            worst = worst.max(idem);
            // (f − P f, φ_i) relative to ‖f‖·‖φ_i‖
            let f_norm = rule
                .iter()
                .map(|(xi, w)| {
                    let v = f(map.to_physical(xi));
                    w * map.det * (v[0] * v[0] + v[1] * v[1])
                })
                .sum::<f64>()
                .sqrt();
            let phi_norm = map.area().sqrt();
            for i in 0..basis.dim() {
                for comp in 0..2 {
                    let inner: f64 = rule
                        .iter()
                        .map(|(xi, w)| {
                            let x = map.to_physical(xi);
                            let r = f(x)[comp] - pf(x)[comp];
                            w * map.det * r * basis.eval(xi)[i]
                        })
                        .sum();
                    worst = worst.max(inner.abs() / (f_norm * phi_norm));
                }
            }
            cases += 1;
        }
    }
    SuiteOutcome { name: "projection", worst, tolerance: 1e-11, cases }
}

/// Random cubic vector field as monomial coefficients of `x^a y^b`, `a + b ≤ 3`.
fn random_cubic(rng: &mut ChaCha8Rng) -> [[f64; 10]; 2] {
    let mut c = [[0.0; 10]; 2];
    for v in c.iter_mut().flatten() {
        *v = rng.random_range(-1.0..1.0);
    }
    c
}

const CUBIC_POWERS: [(i32, i32); 10] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];

fn cubic_value(c: &[f64; 10], x: Point) -> f64 {
    CUBIC_POWERS.iter().zip(c).map(|(&(a, b), v)| v * x[0].powi(a) * x[1].powi(b)).sum()
}

fn cubic_divergence(c: &[[f64; 10]; 2], x: Point) -> f64 {
    let mut d = 0.0;
    for (&(a, b), (u, v)) in CUBIC_POWERS.iter().zip(c[0].iter().zip(&c[1])) {
        if a > 0 {
            d += u * f64::from(a) * x[0].powi(a - 1) * x[1].powi(b);
        }
        if b > 0 {
            d += v * f64::from(b) * x[0].powi(a) * x[1].powi(b - 1);
        }
    }
    d
}

/// `∇·Π_RT v = P_{k+1} ∇·v` elementwise for random cubic fields.
pub fn rt_commutation_suite(samples: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mesh = build_uniform_mesh(2, Rectangle::unit_square()).unwrap();
    let rule = triangle_quadrature(12).unwrap();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for sample in 0..samples {
        let c = random_cubic(&mut rng);
        let v = |x: Point| [cubic_value(&c[0], x), cubic_value(&c[1], x)];
        let div = |x: Point| [cubic_divergence(&c, x)];
        let k = sample % 3;
        let basis = TriangleBasis::new(k + 1);
        for t in 0..mesh.n_triangles() {
            let verts = mesh.triangle_vertices(t);
            let map = ElementMap::new(verts);
            let rt = rt_project(v, verts, k, 12).unwrap();
            let proj = l2_project_element::<1>(div, &map, &basis, &rule);
            let scale = rule.iter().fold(0.0f64, |m, (xi, _)| m.max(div(map.to_physical(xi))[0].abs()));
            for (xi, _) in rule.iter() {
                let x = map.to_physical(xi);
                let d = (rt.divergence(x) - eval_element::<1>(&proj, &map, &basis, x)[0]).abs() / scale;
                worst = worst.max(d);
            }
            cases += 1;
        }
    }
    SuiteOutcome { name: "rt-commutation", worst, tolerance: 1e-10, cases }
}

/// All suites in a fixed order.
pub fn run_all() -> Vec<SuiteOutcome> {
    vec![
        coercivity_suite(200, 2024),
        adjoint_symmetry_suite(),
        uniqueness_suite(),
        projection_suite(),
        rt_commutation_suite(30, 7),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coercivity_identity_holds() {
        let out = coercivity_suite(30, 5);
        assert!(out.passed(), "{}", out.summary());
    }

    #[test]
    fn homogeneous_problem_has_zero_solution() {
        assert!(homogeneous_solution_norm(2, 1) <= 1e-10);
    }

    #[test]
    fn projection_and_rt_suites_pass() {
        for out in [projection_suite(), rt_commutation_suite(30, 7)] {
            assert!(out.passed(), "{}", out.summary());
        }
    }

    #[test]
    fn adjoint_identity_at_a_solution() {
        let mesh = build_uniform_mesh(2, Rectangle::unit_square()).unwrap();
        let (_, sol) = solve_problem(&mesh, &ProblemConfig::new(1), &Example1::new(2)).unwrap();
        let r = adjoint_symmetry_residual(&mesh, &sol);
        assert!(r <= 1e-9, "{r:e}");
    }
}
