//! Gauss rules on the reference interval `[0, 1]` and collapsed (Duffy) Gauss
//! rules on the reference triangle `(0,0), (1,0), (0,1)`.

use crate::Point;

/// Highest polynomial degree a rule can be requested for.
pub const MAX_EXACTNESS: usize = 60;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("quadrature of exactness {requested} is not available (maximum {MAX_EXACTNESS})")]
pub struct UnsupportedDegree {
    pub requested: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

pub type TriangleRule = QuadratureRule<Point>;
pub type EdgeRule = QuadratureRule<f64>;

impl<P: Copy> QuadratureRule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (P, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(P) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule on `[0, 1]` exact for polynomials of degree `exactness`.
pub fn edge_quadrature(exactness: usize) -> Result<EdgeRule, UnsupportedDegree> {
    if exactness > MAX_EXACTNESS {
        return Err(UnsupportedDegree { requested: exactness });
    }
    let n = exactness / 2 + 1;
    let (x, w) = gauss_legendre(n);
    Ok(QuadratureRule {
        points: x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
        weights: w.iter().map(|&w| 0.5 * w).collect(),
        exactness,
    })
}

/// Rule on the reference triangle exact for polynomials of total degree
/// `exactness`. Degrees 0 and 1 use the centroid.
pub fn triangle_quadrature(exactness: usize) -> Result<TriangleRule, UnsupportedDegree> {
    if exactness > MAX_EXACTNESS {
        return Err(UnsupportedDegree { requested: exactness });
    }
    if exactness <= 1 {
        return Ok(QuadratureRule { points: vec![[1.0 / 3.0, 1.0 / 3.0]], weights: vec![0.5], exactness });
    }
    // u carries the (1 - u) Jacobian, one degree more than v
    let nu = exactness.div_ceil(2) + 1;
    let nv = exactness / 2 + 1;
    let (xu, wu) = gauss_legendre(nu);
    let (xv, wv) = gauss_legendre(nv);
    let mut points = Vec::with_capacity(nu * nv);
    let mut weights = Vec::with_capacity(nu * nv);
    for (&a, &wa) in xu.iter().zip(&wu) {
        let u = 0.5 * (a + 1.0);
        for (&b, &wb) in xv.iter().zip(&wv) {
            let v = 0.5 * (b + 1.0);
            points.push([u, v * (1.0 - u)]);
            weights.push(0.25 * wa * wb * (1.0 - u));
        }
    }
    Ok(QuadratureRule { points, weights, exactness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    /// ∫ x^a y^b over the reference triangle = a! b! / (a + b + 2)!
    fn triangle_monomial(a: usize, b: usize) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn centroid_rule() {
        let r = triangle_quadrature(1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.weights[0], 0.5);
        assert_eq!(r.points[0], [1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn triangle_examples() {
        let r = triangle_quadrature(4).unwrap();
        assert!((r.integrate(|p| p[0] * p[0] * p[1] * p[1]) - 1.0 / 180.0).abs() < 1e-14);
        let r = triangle_quadrature(10).unwrap();
        assert!((r.integrate(|_| 1.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn triangle_exactness_table() {
        for d in 0..=24 {
            let r = triangle_quadrature(d).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
            for a in 0..=d {
                for b in 0..=d - a {
                    let exact = triangle_monomial(a, b);
                    let q = r.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    assert!((q - exact).abs() < 1e-13 * exact.max(1e-3), "d={d} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn edge_examples() {
        let r = edge_quadrature(3).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r.integrate(|x| x * x * x) - 0.25).abs() < 1e-14);
        let r = edge_quadrature(0).unwrap();
        assert_eq!((r.points.clone(), r.weights.clone()), (vec![0.5], vec![1.0]));
        let r = edge_quadrature(9).unwrap();
        assert_eq!(r.len(), 5);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn edge_exactness_table() {
        for d in 0..=MAX_EXACTNESS {
            let r = edge_quadrature(d).unwrap();
            for a in 0..=d {
                let q = r.integrate(|x| x.powi(a as i32));
                assert!((q - 1.0 / (a as f64 + 1.0)).abs() < 1e-13, "d={d} a={a}");
            }
        }
    }

    #[test]
    fn unsupported_degree() {
        assert_eq!(triangle_quadrature(MAX_EXACTNESS + 1).unwrap_err().requested, MAX_EXACTNESS + 1);
        assert!(edge_quadrature(1000).is_err());
    }
}
