use crate::Point;

/// Affine map `x = p0 + J ξ` from the reference triangle onto a physical one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMap {
    pub origin: Point,
    /// Column-major Jacobian `[[J00, J10], [J01, J11]]`, i.e. `jac[c]` is column `c`.
    pub jac: [Point; 2],
    pub det: f64,
    /// `J⁻ᵀ`, stored row-major.
    pub inv_t: [[f64; 2]; 2],
}

impl ElementMap {
    pub fn new(vertices: [Point; 3]) -> Self {
        let [p0, p1, p2] = vertices;
        let c0 = [p1[0] - p0[0], p1[1] - p0[1]];
        let c1 = [p2[0] - p0[0], p2[1] - p0[1]];
        let det = c0[0] * c1[1] - c1[0] * c0[1];
        assert!(det > 0.0, "element map must preserve orientation (det = {det})");
        // J = [[c0x, c1x], [c0y, c1y]]; J⁻¹ = [[c1y, -c1x], [-c0y, c0x]] / det
        let inv = [[c1[1] / det, -c1[0] / det], [-c0[1] / det, c0[0] / det]];
        let inv_t = [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]];
        Self { origin: p0, jac: [c0, c1], det, inv_t }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[1][0] * xi[1],
            self.origin[1] + self.jac[0][1] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J⁻¹ d, with J⁻¹ = (J⁻ᵀ)ᵀ
        [self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1], self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1]]
    }

    /// Maps a reference gradient to the physical one: `J⁻ᵀ ∇_ξ`.
    pub fn physical_gradient(&self, g: Point) -> Point {
        [self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1], self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1]]
    }
}
