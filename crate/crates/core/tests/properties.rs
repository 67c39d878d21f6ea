//! Randomized invariants of the mesh, the DOF layout and the projections.

use divfree_hdg::fem::{
    edge_quadrature, eval_edge, eval_element, l2_project_edge, l2_project_element, triangle_quadrature, EdgeBasis,
    ElementMap, TriangleBasis,
};
use divfree_hdg::hdg::{DofLayout, Field, Support};
use divfree_hdg::mesh::{build_uniform_mesh, Rectangle};
use divfree_hdg::Point;
use proptest::prelude::*;

fn domain() -> impl Strategy<Value = Rectangle> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.1..3.0f64, 0.1..3.0f64)
        .prop_map(|(x, y, w, h)| Rectangle::new([x, y], [x + w, y + h]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mesh_counts_and_orientation(n in 1usize..9, dom in domain()) {
        let mesh = build_uniform_mesh(n, dom).unwrap();
        prop_assert_eq!(mesh.vertices.len(), (n + 1) * (n + 1));
        prop_assert_eq!(mesh.n_triangles(), 2 * n * n);
        prop_assert_eq!(mesh.n_edges(), 3 * n * n + 2 * n);
        prop_assert_eq!(mesh.n_boundary_edges(), 4 * n);
        let total: f64 = (0..mesh.n_triangles()).map(|t| mesh.area(t)).sum();
        prop_assert!((total - dom.area()).abs() <= 1e-12 * dom.area());
        for t in 0..mesh.n_triangles() {
            prop_assert!(mesh.area(t) > 0.0);
            // outward normals of a closed polygon weighted by length sum to zero
            let mut s = [0.0; 2];
            for slot in 0..3 {
                let nrm = mesh.outward_normal(t, slot);
                let len = mesh.edges[mesh.triangle_edges[t][slot].edge].length;
                s[0] += len * nrm[0];
                s[1] += len * nrm[1];
            }
            prop_assert!(s[0].abs() + s[1].abs() <= 1e-12 * (dom.width() + dom.height()));
        }
    }

    #[test]
    fn interior_edges_have_opposite_signs(n in 1usize..8, dom in domain()) {
        let mesh = build_uniform_mesh(n, dom).unwrap();
        let mut signs = vec![Vec::new(); mesh.n_edges()];
        for (t, les) in mesh.triangle_edges.iter().enumerate() {
            for le in les {
                signs[le.edge].push((t, le.sign));
            }
        }
        for (e, edge) in mesh.edges.iter().enumerate() {
            let nrm = edge.normal;
            prop_assert!((nrm[0] * edge.tangent[0] + nrm[1] * edge.tangent[1]).abs() < 1e-14);
            if edge.is_boundary() {
                prop_assert_eq!(signs[e].len(), 1);
                prop_assert_eq!(signs[e][0].1, 1);
                let mid = {
                    let [a, b] = mesh.edge_endpoints(e);
                    [0.5 * (a[0] + b[0]) + 1e-3 * nrm[0], 0.5 * (a[1] + b[1]) + 1e-3 * nrm[1]]
                };
                let outside = mid[0] < dom.min[0] || mid[0] > dom.max[0] || mid[1] < dom.min[1] || mid[1] > dom.max[1];
                prop_assert!(outside);
            } else {
                prop_assert_eq!(signs[e].len(), 2);
                prop_assert_eq!(signs[e][0].1 + signs[e][1].1, 0);
            }
        }
    }

    #[test]
    fn layout_partitions_the_unknowns(n in 1usize..6, k in 0usize..3) {
        let mesh = build_uniform_mesh(n, Rectangle::unit_square()).unwrap();
        let layout = DofLayout::new(&mesh, k);
        let mut owner = vec![None; layout.total()];
        for field in Field::ALL {
            let count = match field.support() {
                Support::Element => mesh.n_triangles(),
                Support::AllEdges => mesh.n_edges(),
                Support::InteriorEdges => mesh.n_interior_edges(),
                Support::BoundaryEdges => mesh.n_boundary_edges(),
                Support::Global => 1,
            };
            prop_assert_eq!(layout.field_range(field).len(), count * layout.block_size(field));
            let entities: Vec<usize> = match field.support() {
                Support::InteriorEdges => (0..mesh.n_edges()).filter(|&e| !mesh.edges[e].is_boundary()).collect(),
                Support::BoundaryEdges => (0..mesh.n_edges()).filter(|&e| mesh.edges[e].is_boundary()).collect(),
                _ => (0..count).collect(),
            };
            for entity in entities {
                for i in layout.range(field, entity) {
                    prop_assert!(owner[i].is_none());
                    owner[i] = Some((field, entity));
                }
            }
        }
        prop_assert!(owner.iter().all(Option::is_some));
    }

    #[test]
    fn element_projection_reproduces_polynomials(
        m in 0usize..4,
        coeffs in prop::collection::vec(-1.0..1.0f64, 10),
        shift in -1.0..1.0f64,
    ) {
        // random polynomial of total degree m
        let powers: Vec<(i32, i32)> = (0..=m as i32).flat_map(|d| (0..=d).map(move |j| (d - j, j))).collect();
        let f = |x: Point| [powers.iter().zip(&coeffs).map(|(&(a, b), c)| c * x[0].powi(a) * x[1].powi(b)).sum::<f64>()];
        let verts = [[shift, 0.0], [shift + 1.3, 0.2], [shift + 0.4, 0.9]];
        let map = ElementMap::new(verts);
        let basis = TriangleBasis::new(m);
        let rule = triangle_quadrature(2 * m + 2).unwrap();
        let c = l2_project_element::<1>(f, &map, &basis, &rule);
        for (xi, _) in rule.iter() {
            let x = map.to_physical(xi);
            prop_assert!((eval_element::<1>(&c, &map, &basis, x)[0] - f(x)[0]).abs() < 1e-11);
        }
    }

    #[test]
    fn edge_projection_is_idempotent(m in 0usize..4, a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let ends = [[a, b], [a + 0.7, b - 0.3]];
        let basis = EdgeBasis::new(m);
        let rule = edge_quadrature(2 * m + 10).unwrap();
        let f = |x: Point| [(3.0 * x[0]).sin() + x[1].exp()];
        let c = l2_project_edge::<1>(f, ends, &basis, &rule);
        let pf = |x: Point| {
            let d = [ends[1][0] - ends[0][0], ends[1][1] - ends[0][1]];
            let s = ((x[0] - ends[0][0]) * d[0] + (x[1] - ends[0][1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
            eval_edge::<1>(&c, &basis, s)
        };
        let again = l2_project_edge::<1>(pf, ends, &basis, &rule);
        for (u, v) in c.iter().zip(&again) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }
}
