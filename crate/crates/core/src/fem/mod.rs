//! Reference-element machinery: quadrature, orthonormal bases, affine maps,
//! L² projections and the Raviart–Thomas interpolant.

pub mod basis;
pub mod element;
pub mod projection;
pub mod quadrature;
pub mod rt;

pub use basis::{triangle_dim, EdgeBasis, TriangleBasis};
pub use element::ElementMap;
pub use projection::{eval_edge, eval_element, l2_project_edge, l2_project_element};
pub use quadrature::{edge_quadrature, triangle_quadrature, EdgeRule, QuadratureRule, TriangleRule, UnsupportedDegree};
pub use rt::{rt_project, RtField};
