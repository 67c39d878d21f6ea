//! Element and edge L² projections of scalar, vector and matrix fields.
//!
//! Coefficients are stored component-major: entry `c · dim + i` multiplies
//! basis function `i` in component `c`. Matrix fields use `c = 2a + b` for
//! entry `(a, b)`.

use nalgebra::DMatrix;

use super::basis::{EdgeBasis, TriangleBasis};
use super::element::ElementMap;
use super::quadrature::{EdgeRule, TriangleRule};
use crate::Point;

fn solve_mass(mass: DMatrix<f64>, rhs: DMatrix<f64>) -> DMatrix<f64> {
    let chol = mass.cholesky().expect("local mass matrix must be positive definite");
    chol.solve(&rhs)
}

fn flatten<const C: usize>(coeffs: DMatrix<f64>) -> Vec<f64> {
    let dim = coeffs.nrows();
    let mut out = vec![0.0; C * dim];
    for c in 0..C {
        for i in 0..dim {
            out[c * dim + i] = coeffs[(i, c)];
        }
    }
    out
}

/// L² projection of `field` onto `[P^m(K)]^C`, `m = basis.degree()`.
pub fn l2_project_element<const C: usize>(
    field: impl Fn(Point) -> [f64; C],
    map: &ElementMap,
    basis: &TriangleBasis,
    rule: &TriangleRule,
) -> Vec<f64> {
    let dim = basis.dim();
    let mut mass = DMatrix::zeros(dim, dim);
    let mut rhs = DMatrix::zeros(dim, C);
    let mut phi = vec![0.0; dim];
    for (xi, w) in rule.iter() {
        let wq = w * map.det;
        basis.eval_into(xi, &mut phi);
        let f = field(map.to_physical(xi));
        for i in 0..dim {
            for j in 0..dim {
                mass[(i, j)] += wq * phi[i] * phi[j];
            }
            for c in 0..C {
                rhs[(i, c)] += wq * phi[i] * f[c];
            }
        }
    }
    flatten::<C>(solve_mass(mass, rhs))
}

/// Evaluates component-major coefficients on element `map` at physical `x`.
pub fn eval_element<const C: usize>(coeffs: &[f64], map: &ElementMap, basis: &TriangleBasis, x: Point) -> [f64; C] {
    let dim = basis.dim();
    debug_assert_eq!(coeffs.len(), C * dim);
    let phi = basis.eval(map.to_reference(x));
    std::array::from_fn(|c| (0..dim).map(|i| coeffs[c * dim + i] * phi[i]).sum())
}

/// Point on the segment `endpoints` at parameter `s ∈ [0, 1]`.
pub fn edge_point(endpoints: [Point; 2], s: f64) -> Point {
    let [a, b] = endpoints;
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// L² projection of `field` onto `[P^m(e)]^C` on the segment `endpoints`,
/// parametrized from the first endpoint to the second.
pub fn l2_project_edge<const C: usize>(
    field: impl Fn(Point) -> [f64; C],
    endpoints: [Point; 2],
    basis: &EdgeBasis,
    rule: &EdgeRule,
) -> Vec<f64> {
    let dim = basis.dim();
    let [a, b] = endpoints;
    let length = (b[0] - a[0]).hypot(b[1] - a[1]);
    let mut mass = DMatrix::zeros(dim, dim);
    let mut rhs = DMatrix::zeros(dim, C);
    let mut psi = vec![0.0; dim];
    for (s, w) in rule.iter() {
        let wq = w * length;
        basis.eval_into(s, &mut psi);
        let f = field(edge_point(endpoints, s));
        for i in 0..dim {
            for j in 0..dim {
                mass[(i, j)] += wq * psi[i] * psi[j];
            }
            for c in 0..C {
                rhs[(i, c)] += wq * psi[i] * f[c];
            }
        }
    }
    flatten::<C>(solve_mass(mass, rhs))
}

pub fn eval_edge<const C: usize>(coeffs: &[f64], basis: &EdgeBasis, s: f64) -> [f64; C] {
    let dim = basis.dim();
    let psi = basis.eval(s);
    std::array::from_fn(|c| (0..dim).map(|i| coeffs[c * dim + i] * psi[i]).sum())
}

/// Element mass matrix of `basis` on `map`, computed by quadrature.
pub fn element_mass(map: &ElementMap, basis: &TriangleBasis, rule: &TriangleRule) -> DMatrix<f64> {
    let dim = basis.dim();
    let mut mass = DMatrix::zeros(dim, dim);
    for (xi, w) in rule.iter() {
        let phi = basis.eval(xi);
        for i in 0..dim {
            for j in 0..dim {
                mass[(i, j)] += w * map.det * phi[i] * phi[j];
            }
        }
    }
    mass
}

/// `∫_K f · g` for `C`-component fields given as closures.
pub fn element_inner<const C: usize>(
    f: impl Fn(Point) -> [f64; C],
    g: impl Fn(Point) -> [f64; C],
    map: &ElementMap,
    rule: &TriangleRule,
) -> f64 {
    rule.iter()
        .map(|(xi, w)| {
            let x = map.to_physical(xi);
            let (a, b) = (f(x), g(x));
            w * map.det * (0..C).map(|c| a[c] * b[c]).sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::quadrature::{edge_quadrature, triangle_quadrature};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn reference() -> ElementMap {
        ElementMap::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    }

    fn skewed() -> ElementMap {
        ElementMap::new([[0.1, -0.2], [0.9, 0.3], [0.2, 0.8]])
    }

    #[test]
    fn polynomial_fields_are_reproduced() {
        let map = skewed();
        let basis = TriangleBasis::new(2);
        let rule = triangle_quadrature(8).unwrap();
        let f = |x: Point| [1.0 + 2.0 * x[0] - x[1] * x[1], x[0] * x[1] - 0.5];
        let c = l2_project_element(f, &map, &basis, &rule);
        let again = l2_project_element(|x| eval_element::<2>(&c, &map, &basis, x), &map, &basis, &rule);
        for (a, b) in c.iter().zip(&again) {
            assert!((a - b).abs() < 1e-12);
        }
        let x = map.to_physical([0.3, 0.2]);
        let v = eval_element::<2>(&c, &map, &basis, x);
        assert!((v[0] - f(x)[0]).abs() < 1e-12 && (v[1] - f(x)[1]).abs() < 1e-12);
    }

    #[test]
    fn constant_projection_is_the_mean() {
        let map = reference();
        let basis = TriangleBasis::new(0);
        let fine = triangle_quadrature(30).unwrap();
        let c = l2_project_element(|x| [(PI * x[0]).sin()], &map, &basis, &fine);
        // independent: ∫_0^1 (1 - x) sin(πx) dx = 1/π, |K| = 1/2
        let mean = (1.0 / PI) / 0.5;
        assert!((c[0] - mean).abs() < 1e-13);
    }

    #[test]
    fn matrix_fields_project_componentwise() {
        let map = skewed();
        let basis = TriangleBasis::new(1);
        let rule = triangle_quadrature(12).unwrap();
        let f = |x: Point| [x[0].exp(), x[1].sin(), x[0] * x[1], 3.0];
        let all = l2_project_element(f, &map, &basis, &rule);
        let dim = basis.dim();
        for c in 0..4 {
            let single = l2_project_element(|x| [f(x)[c]], &map, &basis, &rule);
            assert_eq!(&all[c * dim..(c + 1) * dim], &single[..]);
        }
    }

    #[test]
    fn edge_projection_examples() {
        let basis = EdgeBasis::new(1);
        let rule = edge_quadrature(6).unwrap();
        let ends = [[0.2, 0.1], [0.7, 0.9]];
        let lin = |x: Point| [3.0 * x[0] - x[1] + 0.25];
        let c = l2_project_edge(lin, ends, &basis, &rule);
        for s in [0.0, 0.3, 1.0] {
            let x = edge_point(ends, s);
            assert!((eval_edge::<1>(&c, &basis, s)[0] - lin(x)[0]).abs() < 1e-13);
        }
        let c = l2_project_edge(|x| [x[0] * x[0]], [[0.0, 0.0], [1.0, 0.0]], &EdgeBasis::new(0), &rule);
        assert!((c[0] - 1.0 / 3.0).abs() < 1e-14);
        let v = l2_project_edge(|x| [x[0], x[0] * x[0]], [[0.0, 0.0], [1.0, 0.0]], &EdgeBasis::new(0), &rule);
        assert!((v[0] - 0.5).abs() < 1e-14 && (v[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn projection_residual_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let map = skewed();
        for m in 0..=3 {
            let basis = TriangleBasis::new(m);
            let rule = triangle_quadrature(2 * (m + 3)).unwrap();
            for _ in 0..50 {
                let c: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                let v = move |x: Point| {
                    [c[0]
                        + c[1] * x[0]
                        + c[2] * x[1] * x[1]
                        + c[3] * x[0].powi(3)
                        + c[4] * x[0] * x[1] * x[1]
                        + c[5] * x[1].powi(m as i32 + 2)]
                };
                let proj = l2_project_element(v, &map, &basis, &rule);
                let d: Vec<f64> = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let w = |x: Point| eval_element::<1>(&d, &map, &basis, x);
                let r = |x: Point| [v(x)[0] - eval_element::<1>(&proj, &map, &basis, x)[0]];
                assert!(element_inner(r, w, &map, &rule).abs() < 1e-11);
            }
        }
    }
}
