//! Orthonormal polynomial bases on the reference triangle and interval.
//!
//! Both bases are orthonormal for the *averaged* inner product
//! `(u, v) = |D|⁻¹ ∫_D u v`, so the first function is the constant 1 and the
//! mass matrix on a physical cell `D` is `|D| · I`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::Point;

/// Number of polynomials of total degree `≤ m` in two variables.
pub const fn triangle_dim(m: usize) -> usize {
    (m + 1) * (m + 2) / 2
}

/// Monomial exponents `(a, b)` for `x^a y^b`, ordered by total degree and then
/// by the power of `y`.
pub fn monomial_exponents(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(triangle_dim(m));
    for d in 0..=m {
        for b in 0..=d {
            out.push((d - b, b));
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Orthonormalized monomials on the reference triangle.
#[derive(Debug, Clone)]
pub struct TriangleBasis {
    degree: usize,
    exponents: Vec<(usize, usize)>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coeffs: DMatrix<f64>,
    gram_condition: f64,
}

impl TriangleBasis {
    pub fn new(degree: usize) -> Self {
        let exponents = monomial_exponents(degree);
        let n = exponents.len();
        // exact averaged Gram matrix: 2 · a! b! / (a + b + 2)!
        let gram = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (exponents[i].0 + exponents[j].0, exponents[i].1 + exponents[j].1);
            2.0 * factorial(a) * factorial(b) / factorial(a + b + 2)
        });
        let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
        let gram_condition = eig.max() / eig.min();
        let chol = gram.cholesky().expect("monomial Gram matrix is positive definite");
        let l = chol.l();
        let coeffs = l.solve_lower_triangular(&DMatrix::identity(n, n)).expect("Cholesky factor is nonsingular");
        Self { degree, exponents, coeffs, gram_condition }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Condition number of the monomial Gram matrix the basis was built from.
    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }

    fn monomials(&self, xi: Point) -> Vec<f64> {
        self.exponents.iter().map(|&(a, b)| xi[0].powi(a as i32) * xi[1].powi(b as i32)).collect()
    }

    pub fn eval(&self, xi: Point) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(xi, &mut out);
        out
    }

    pub fn eval_into(&self, xi: Point, out: &mut [f64]) {
        let m = self.monomials(xi);
        for (i, o) in out.iter_mut().enumerate() {
            // coefficients are lower triangular
            *o = (0..=i).map(|j| self.coeffs[(i, j)] * m[j]).sum();
        }
    }

    /// Reference gradients `∇_ξ φ_i`.
    pub fn grad(&self, xi: Point) -> Vec<Point> {
        let dm: Vec<Point> = self
            .exponents
            .iter()
            .map(|&(a, b)| {
                let dx = if a == 0 { 0.0 } else { a as f64 * xi[0].powi(a as i32 - 1) * xi[1].powi(b as i32) };
                let dy = if b == 0 { 0.0 } else { b as f64 * xi[0].powi(a as i32) * xi[1].powi(b as i32 - 1) };
                [dx, dy]
            })
            .collect();
        (0..self.dim())
            .map(|i| {
                (0..=i).fold([0.0, 0.0], |acc, j| {
                    let c = self.coeffs[(i, j)];
                    [acc[0] + c * dm[j][0], acc[1] + c * dm[j][1]]
                })
            })
            .collect()
    }
}

/// Shifted Legendre polynomials `√(2m+1) P_m(2s − 1)` on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct EdgeBasis {
    degree: usize,
}

impl EdgeBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(s, &mut out);
        out
    }

    pub fn eval_into(&self, s: f64, out: &mut [f64]) {
        let t = 2.0 * s - 1.0;
        let (mut p0, mut p1) = (1.0, t);
        for (m, o) in out.iter_mut().enumerate() {
            let pm = match m {
                0 => 1.0,
                1 => t,
                _ => {
                    let mf = m as f64;
                    let p2 = ((2.0 * mf - 1.0) * t * p1 - (mf - 1.0) * p0) / mf;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            *o = (2.0 * m as f64 + 1.0).sqrt() * pm;
        }
    }
}
