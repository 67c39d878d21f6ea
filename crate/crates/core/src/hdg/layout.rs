use std::ops::Range;

use crate::fem::triangle_dim;
use crate::mesh::Mesh;

/// The unknowns of the coupled optimality system, in global ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    /// `L_h ≈ ∇y`, `[P^k(K)]^{2×2}` per element.
    Flux,
    /// `y_h`, `[P^{k+1}(K)]²` per element.
    State,
    /// `p_h`, `P^k(K)` per element.
    Pressure,
    /// `p̂_h`, `P^{k+1}(e)` on every edge.
    PressureTrace,
    /// `ŷ°_h`, `[P^k(e)]²` on interior edges.
    StateTrace,
    DualFlux,
    DualState,
    DualPressure,
    DualPressureTrace,
    DualStateTrace,
    /// `u_h`, `P^k(e)` on boundary edges.
    Control,
    /// Multiplier enforcing `(p_h, 1) = 0`.
    PressureMean,
    /// Multiplier enforcing `(q_h, 1) = 0`.
    DualPressureMean,
}

impl Field {
    pub const ALL: [Field; 13] = [
        Field::Flux,
        Field::State,
        Field::Pressure,
        Field::PressureTrace,
        Field::StateTrace,
        Field::DualFlux,
        Field::DualState,
        Field::DualPressure,
        Field::DualPressureTrace,
        Field::DualStateTrace,
        Field::Control,
        Field::PressureMean,
        Field::DualPressureMean,
    ];

    /// The five fields the HDG operator acts on, primal version.
    pub const PRIMAL: [Field; 5] =
        [Field::Flux, Field::State, Field::Pressure, Field::PressureTrace, Field::StateTrace];
    pub const DUAL: [Field; 5] =
        [Field::DualFlux, Field::DualState, Field::DualPressure, Field::DualPressureTrace, Field::DualStateTrace];

    /// Maps a primal operator field onto its dual counterpart.
    pub fn dual(self) -> Field {
        match self {
            Field::Flux => Field::DualFlux,
            Field::State => Field::DualState,
            Field::Pressure => Field::DualPressure,
            Field::PressureTrace => Field::DualPressureTrace,
            Field::StateTrace => Field::DualStateTrace,
            Field::PressureMean => Field::DualPressureMean,
            other => panic!("{other:?} has no dual counterpart"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::Flux => "L",
            Field::State => "y",
            Field::Pressure => "p",
            Field::PressureTrace => "p_hat",
            Field::StateTrace => "y_hat",
            Field::DualFlux => "G",
            Field::DualState => "z",
            Field::DualPressure => "q",
            Field::DualPressureTrace => "q_hat",
            Field::DualStateTrace => "z_hat",
            Field::Control => "u",
            Field::PressureMean => "lambda_p",
            Field::DualPressureMean => "lambda_q",
        }
    }

    fn index(self) -> usize {
        Field::ALL.iter().position(|&f| f == self).unwrap()
    }
}

/// What a field's blocks are attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Element,
    AllEdges,
    InteriorEdges,
    BoundaryEdges,
    Global,
}

impl Field {
    pub fn support(self) -> Support {
        match self {
            Field::Flux | Field::State | Field::Pressure | Field::DualFlux | Field::DualState | Field::DualPressure => {
                Support::Element
            }
            Field::PressureTrace | Field::DualPressureTrace => Support::AllEdges,
            Field::StateTrace | Field::DualStateTrace => Support::InteriorEdges,
            Field::Control => Support::BoundaryEdges,
            Field::PressureMean | Field::DualPressureMean => Support::Global,
        }
    }
}

/// Contiguous global index ranges for every field.
///
/// Element fields are numbered element-major, edge fields edge-major, with
/// component-major coefficients inside each entity block.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    degree: usize,
    block_sizes: [usize; 13],
    offsets: [usize; 14],
    /// Edge index → position among interior (resp. boundary) edges.
    interior_slot: Vec<Option<usize>>,
    boundary_slot: Vec<Option<usize>>,
}

impl DofLayout {
    pub fn new(mesh: &Mesh, degree: usize) -> Self {
        let k = degree;
        let (dk, dk1) = (triangle_dim(k), triangle_dim(k + 1));
        let mut interior_slot = vec![None; mesh.n_edges()];
        let mut boundary_slot = vec![None; mesh.n_edges()];
        let (mut ni, mut nb) = (0, 0);
        for (e, edge) in mesh.edges.iter().enumerate() {
            if edge.is_boundary() {
                boundary_slot[e] = Some(nb);
                nb += 1;
            } else {
                interior_slot[e] = Some(ni);
                ni += 1;
            }
        }
        let mut block_sizes = [0; 13];
        let mut offsets = [0; 14];
        for (i, field) in Field::ALL.iter().enumerate() {
            let (size, count) = match field {
                Field::Flux | Field::DualFlux => (4 * dk, mesh.n_triangles()),
                Field::State | Field::DualState => (2 * dk1, mesh.n_triangles()),
                Field::Pressure | Field::DualPressure => (dk, mesh.n_triangles()),
                Field::PressureTrace | Field::DualPressureTrace => (k + 2, mesh.n_edges()),
                Field::StateTrace | Field::DualStateTrace => (2 * (k + 1), ni),
                Field::Control => (k + 1, nb),
                Field::PressureMean | Field::DualPressureMean => (1, 1),
            };
            block_sizes[i] = size;
            offsets[i + 1] = offsets[i] + size * count;
        }
        Self { degree, block_sizes, offsets, interior_slot, boundary_slot }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn total(&self) -> usize {
        self.offsets[13]
    }

    pub fn block_size(&self, field: Field) -> usize {
        self.block_sizes[field.index()]
    }

    pub fn field_range(&self, field: Field) -> Range<usize> {
        let i = field.index();
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Global indices of `field` on `entity` (an element index, an edge index,
    /// or 0 for the scalar multipliers).
    pub fn range(&self, field: Field, entity: usize) -> Range<usize> {
        let slot = match field.support() {
            Support::Element | Support::AllEdges => entity,
            Support::InteriorEdges => self.interior_slot[entity]
                .unwrap_or_else(|| panic!("{field:?} lives on interior edges, edge {entity} is on the boundary")),
            Support::BoundaryEdges => self.boundary_slot[entity]
                .unwrap_or_else(|| panic!("{field:?} lives on boundary edges, edge {entity} is interior")),
            Support::Global => {
                assert_eq!(entity, 0);
                0
            }
        };
        let size = self.block_size(field);
        let start = self.offsets[field.index()] + slot * size;
        assert!(start + size <= self.offsets[field.index() + 1], "{field:?} entity {entity} out of range");
        start..start + size
    }

    /// Length of the primal (equivalently, dual) operator block
    /// `(L, y, p, p̂, ŷ°)`.
    pub fn operator_len(&self) -> usize {
        self.offsets[Field::StateTrace.index() + 1]
    }

    /// Range of `field` relative to the start of its operator block.
    pub fn operator_range(&self, field: Field) -> Range<usize> {
        let base = if Field::DUAL.contains(&field) { self.operator_len() } else { 0 };
        let r = self.field_range(field);
        r.start - base..r.end - base
    }
}
