//! Manufactured solutions and problem data for the two test problems.

use std::f64::consts::PI;

use crate::hdg::ProblemData;
use crate::mesh::Rectangle;
use crate::Point;

/// Analytic optimality-system solution. Gradients are row-major,
/// `[∂₁y₁, ∂₂y₁, ∂₁y₂, ∂₂y₂]`.
pub trait ExactFields: ProblemData {
    fn y(&self, x: Point) -> [f64; 2];
    fn grad_y(&self, x: Point) -> [f64; 4];
    fn p(&self, x: Point) -> f64;
    fn z(&self, x: Point) -> [f64; 2];
    fn grad_z(&self, x: Point) -> [f64; 4];
    fn q(&self, x: Point) -> f64;
    fn gamma(&self) -> f64;
    fn domain(&self) -> Rectangle;

    /// Boundary control `u = y·τ`.
    fn u(&self, x: Point, tangent: Point) -> f64 {
        let y = self.y(x);
        y[0] * tangent[0] + y[1] * tangent[1]
    }
}

/// Trigonometric solution on the unit square with pressures `10ⁿ cos(πx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1 {
    pub n: i32,
    scale: f64,
}

impl Example1 {
    pub fn new(n: i32) -> Self {
        Self { n, scale: 10f64.powi(n) }
    }

    fn laplace_y(&self, [x, y]: Point) -> [f64; 2] {
        let (sx, cx, sy, cy) = ((PI * x).sin(), (PI * x).cos(), (PI * y).sin(), (PI * y).cos());
        let (s2x, c2x, s2y, c2y) =
            ((2.0 * PI * x).sin(), (2.0 * PI * x).cos(), (2.0 * PI * y).sin(), (2.0 * PI * y).cos());
        let p4 = PI.powi(4);
        [
            -2.0 * p4 * (2.0 * c2x * cy - sx * sx * cy - 5.0 * sx * s2y),
            2.0 * p4 * (-cx * sy * sy + 2.0 * cx * c2y - 5.0 * sy * s2x),
        ]
    }

    fn laplace_z(&self, [x, y]: Point) -> [f64; 2] {
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        let (s2x, c2x, s2y, c2y) =
            ((2.0 * PI * x).sin(), (2.0 * PI * x).cos(), (2.0 * PI * y).sin(), (2.0 * PI * y).cos());
        let p3 = PI.powi(3);
        [p3 * (2.0 * c2x * s2y - 4.0 * sx * sx * s2y), -p3 * (2.0 * c2y * s2x - 4.0 * sy * sy * s2x)]
    }

    fn grad_pressure(&self, [x, _]: Point) -> [f64; 2] {
        [-PI * self.scale * (PI * x).sin(), 0.0]
    }
}

impl ProblemData for Example1 {
    /// `f = −Δy + ∇p`.
    fn source(&self, x: Point) -> [f64; 2] {
        let (l, g) = (self.laplace_y(x), self.grad_pressure(x));
        [-l[0] + g[0], -l[1] + g[1]]
    }

    /// `y_d = y + Δz + ∇q`.
    fn target(&self, x: Point) -> [f64; 2] {
        let (y, l, g) = (self.y(x), self.laplace_z(x), self.grad_pressure(x));
        [y[0] + l[0] + g[0], y[1] + l[1] + g[1]]
    }
}

impl ExactFields for Example1 {
    fn y(&self, [x, y]: Point) -> [f64; 2] {
        let (sx, cx, sy, cy) = ((PI * x).sin(), (PI * x).cos(), (PI * y).sin(), (PI * y).cos());
        let (s2x, s2y) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin());
        let p2 = PI * PI;
        [-2.0 * p2 * (sx * sx * cy + sx * s2y), 2.0 * p2 * (cx * sy * sy + sy * s2x)]
    }

    fn grad_y(&self, [x, y]: Point) -> [f64; 4] {
        let (sx, cx, sy, cy) = ((PI * x).sin(), (PI * x).cos(), (PI * y).sin(), (PI * y).cos());
        let (c2x, c2y) = ((2.0 * PI * x).cos(), (2.0 * PI * y).cos());
        let p3 = PI.powi(3);
        let d = 4.0 * p3 * (sx + sy) * cx * cy;
        [-d, 2.0 * p3 * sx * (sx * sy - 2.0 * c2y), 2.0 * p3 * sy * (2.0 * c2x - sx * sy), d]
    }

    fn p(&self, [x, _]: Point) -> f64 {
        self.scale * (PI * x).cos()
    }

    fn z(&self, [x, y]: Point) -> [f64; 2] {
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        [PI * sx * sx * (2.0 * PI * y).sin(), -PI * sy * sy * (2.0 * PI * x).sin()]
    }

    fn grad_z(&self, [x, y]: Point) -> [f64; 4] {
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        let (s2x, c2x, s2y, c2y) =
            ((2.0 * PI * x).sin(), (2.0 * PI * x).cos(), (2.0 * PI * y).sin(), (2.0 * PI * y).cos());
        let p2 = PI * PI;
        let d = p2 * s2x * s2y;
        [d, 2.0 * p2 * sx * sx * c2y, -2.0 * p2 * sy * sy * c2x, -d]
    }

    fn q(&self, x: Point) -> f64 {
        self.p(x)
    }

    fn gamma(&self) -> f64 {
        1.0
    }

    fn domain(&self) -> Rectangle {
        Rectangle::unit_square()
    }
}

/// Polynomial target on `(0, 1/8)²` with `f = 0`; the perturbed variant adds
/// the gradient field `∇(10⁶(x + y))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example2 {
    pub perturbed: bool,
}

impl Example2 {
    pub const PERTURBATION: f64 = 1e6;

    pub fn new(perturbed: bool) -> Self {
        Self { perturbed }
    }

    pub fn domain(&self) -> Rectangle {
        Rectangle::square(0.125)
    }

    pub fn gamma(&self) -> f64 {
        1.0
    }
}

impl ProblemData for Example2 {
    fn source(&self, _: Point) -> [f64; 2] {
        [0.0; 2]
    }

    fn target(&self, [x, y]: Point) -> [f64; 2] {
        let c = 200.0 * 512.0;
        let a = 1.0 - 8.0 * x;
        let b = 1.0 - 8.0 * y;
        let mut t = [
            c * x * x * a * a * y * b * (1.0 - 16.0 * y),
            -c * x * a * (1.0 - 16.0 * x) * y * y * (1.0 - y) * (1.0 - y),
        ];
        if self.perturbed {
            t[0] += Self::PERTURBATION;
            t[1] += Self::PERTURBATION;
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn points(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| [rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)]).collect()
    }

    fn fd_grad(f: impl Fn(Point) -> [f64; 2], x: Point, h: f64) -> [f64; 4] {
        let d = |c: usize, dir: usize| {
            let mut a = x;
            let mut b = x;
            a[dir] += h;
            b[dir] -= h;
            (f(a)[c] - f(b)[c]) / (2.0 * h)
        };
        [d(0, 0), d(0, 1), d(1, 0), d(1, 1)]
    }

    fn five_point(f: &impl Fn(Point) -> [f64; 2], x: Point, h: f64) -> [f64; 2] {
        let c = f(x);
        let s = [[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]]
            .iter()
            .map(|d| f([x[0] + d[0], x[1] + d[1]]))
            .fold([0.0; 2], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
        [(s[0] - 4.0 * c[0]) / (h * h), (s[1] - 4.0 * c[1]) / (h * h)]
    }

    /// Richardson-extrapolated five-point Laplacian, `O(h⁴)`.
    fn fd_laplace(f: impl Fn(Point) -> [f64; 2], x: Point, h: f64) -> [f64; 2] {
        let (a, b) = (five_point(&f, x, h), five_point(&f, x, h / 2.0));
        [(4.0 * b[0] - a[0]) / 3.0, (4.0 * b[1] - a[1]) / 3.0]
    }

    fn rel(a: f64, b: f64, scale: f64) -> f64 {
        (a - b).abs() / scale
    }

    #[test]
    fn derived_data_matches_finite_differences() {
        for n in [2, 4, 6] {
            let ex = Example1::new(n);
            for x in points(100, 7) {
                let g = ex.grad_y(x);
                let gf = fd_grad(|x| ex.y(x), x, 1e-5);
                let gz = ex.grad_z(x);
                let gzf = fd_grad(|x| ex.z(x), x, 1e-5);
                for c in 0..4 {
                    assert!(rel(g[c], gf[c], 1.0 + g[c].abs()) < 1e-6, "grad y {c} at {x:?}");
                    assert!(rel(gz[c], gzf[c], 1.0 + gz[c].abs()) < 1e-6, "grad z {c} at {x:?}");
                }
                let ly = fd_laplace(|x| ex.y(x), x, 1e-2);
                let lz = fd_laplace(|x| ex.z(x), x, 1e-2);
                let h = 1e-5;
                let dp = (ex.p([x[0] + h, x[1]]) - ex.p([x[0] - h, x[1]])) / (2.0 * h);
                let dq = (ex.q([x[0], x[1] + h]) - ex.q([x[0], x[1] - h])) / (2.0 * h);
                let f = ex.source(x);
                let yd = ex.target(x);
                let y = ex.y(x);
                let fo = [-ly[0] + dp, -ly[1]];
                let ydo = [y[0] + lz[0] + dp, y[1] + lz[1] + dq];
                for c in 0..2 {
                    let sf = 1.0 + f[c].abs().max(fo[c].abs());
                    let sy = 1.0 + yd[c].abs().max(ydo[c].abs());
                    assert!(rel(f[c], fo[c], sf) < 1e-6, "f {c} at {x:?}: {} vs {}", f[c], fo[c]);
                    assert!(rel(yd[c], ydo[c], sy) < 1e-6, "y_d {c} at {x:?}: {} vs {}", yd[c], ydo[c]);
                }
            }
        }
    }

    #[test]
    fn fields_are_solenoidal_and_tangential() {
        let ex = Example1::new(2);
        for x in points(50, 11) {
            let g = ex.grad_y(x);
            let gz = ex.grad_z(x);
            assert!((g[0] + g[3]).abs() < 1e-10);
            assert!((gz[0] + gz[3]).abs() < 1e-10);
        }
        for t in [0.1, 0.37, 0.8] {
            assert!(ex.y([0.0, t])[0].abs() < 1e-12);
            assert!(ex.y([1.0, t])[0].abs() < 1e-12);
            assert!(ex.y([t, 0.0])[1].abs() < 1e-12);
            assert!(ex.y([t, 1.0])[1].abs() < 1e-12);
        }
        assert!(ex.p([0.5, 0.3]).abs() < 1e-12);
    }

    #[test]
    fn pressures_have_zero_mean() {
        let ex = Example1::new(4);
        let m = 400;
        let mean: f64 = (0..m).map(|i| ex.p([(i as f64 + 0.5) / m as f64, 0.2])).sum::<f64>() / m as f64;
        assert!(mean.abs() < 1e-9 * 1e4);
    }

    #[test]
    fn example2_data() {
        let plain = Example2::new(false);
        let pert = Example2::new(true);
        assert_eq!(plain.target([0.0, 0.03])[0], 0.0);
        assert_eq!(plain.source([0.01, 0.02]), [0.0, 0.0]);
        let x = [0.03, 0.07];
        let (a, b) = (plain.target(x), pert.target(x));
        assert!((b[0] - a[0] - 1e6).abs() < 1e-9 && (b[1] - a[1] - 1e6).abs() < 1e-9);
    }
}
