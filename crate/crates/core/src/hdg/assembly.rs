//! Global assembly of the coupled state / adjoint / control system.

use nalgebra::DMatrix;
use thiserror::Error;

use super::layout::{DofLayout, Field};
use super::local::Kernels;
use crate::fem::quadrature::UnsupportedDegree;
use crate::fem::ElementMap;
use crate::mesh::Mesh;
use crate::solver::{CscMatrix, SparseSystem};
use crate::Point;

#[derive(Debug, Error, PartialEq)]
pub enum AssemblyError {
    #[error("polynomial degree {0} is not supported (0, 1 or 2)")]
    UnsupportedPolynomialDegree(usize),
    #[error("regularization parameter must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("stabilization parameter must be positive and finite, got {0}")]
    BadStabilization(f64),
    #[error(transparent)]
    Quadrature(#[from] UnsupportedDegree),
    #[error("block {row:?} x {col:?} has shape {found:?}, expected {expected:?}")]
    BlockShape { row: Field, col: Field, found: (usize, usize), expected: (usize, usize) },
    #[error("edge {0} is interior; controls live on boundary edges")]
    InteriorControlEdge(usize),
}

/// Choice of the `h` in the `h⁻¹` stabilization terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stabilization {
    /// `1/|e|` on each edge.
    EdgeLength,
    /// `1/h` with `h` the largest element diameter.
    MeshSize,
    /// A fixed value on every edge.
    Constant(f64),
}

impl Stabilization {
    /// Value on an edge of length `length` in a mesh of size `h`.
    pub fn value(self, length: f64, h: f64) -> f64 {
        match self {
            Stabilization::EdgeLength => 1.0 / length,
            Stabilization::MeshSize => 1.0 / h,
            Stabilization::Constant(c) => c,
        }
    }
}

/// Discretization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConfig {
    pub degree: usize,
    pub gamma: f64,
    pub stabilization: Stabilization,
    /// Exactness of the rule for the polynomial-only integrals; `None`
    /// selects `2(k + 2)`.
    pub assembly_quad_degree: Option<usize>,
    /// Exactness of the rule for source and target data; `None` selects
    /// `2(k + 2) + 8`.
    pub data_quad_degree: Option<usize>,
}

impl ProblemConfig {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            gamma: 1.0,
            stabilization: Stabilization::EdgeLength,
            assembly_quad_degree: None,
            data_quad_degree: None,
        }
    }

    pub fn assembly_degree(&self) -> usize {
        self.assembly_quad_degree.unwrap_or(2 * (self.degree + 2))
    }

    pub fn data_degree(&self) -> usize {
        self.data_quad_degree.unwrap_or(2 * (self.degree + 2) + 8)
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        if self.degree > 2 {
            return Err(AssemblyError::UnsupportedPolynomialDegree(self.degree));
        }
        if !(self.gamma > 0.0) {
            return Err(AssemblyError::NonPositiveGamma(self.gamma));
        }
        if let Stabilization::Constant(s) = self.stabilization {
            if !(s > 0.0 && s.is_finite()) {
                return Err(AssemblyError::BadStabilization(s));
            }
        }
        Ok(())
    }

    pub fn kernels(&self) -> Result<Kernels, AssemblyError> {
        self.validate()?;
        Ok(Kernels::new(self.degree, self.assembly_degree(), self.data_degree())?)
    }
}

/// Body force of the state equation and observation target.
pub trait ProblemData {
    fn source(&self, x: Point) -> [f64; 2];
    fn target(&self, x: Point) -> [f64; 2];
}

/// The assembled optimality system together with its numbering.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub layout: DofLayout,
    pub system: SparseSystem,
    pub config: ProblemConfig,
    /// Largest element diameter.
    pub h: f64,
}

/// Accumulates dense local blocks as global triplets.
pub(crate) struct TripletSink<'a> {
    layout: &'a DofLayout,
    pub(crate) entries: Vec<(usize, usize, f64)>,
}

impl<'a> TripletSink<'a> {
    pub(crate) fn new(layout: &'a DofLayout) -> Self {
        Self { layout, entries: Vec::new() }
    }

    pub(crate) fn add(
        &mut self,
        (rf, re): (Field, usize),
        (cf, ce): (Field, usize),
        block: &DMatrix<f64>,
        scale: f64,
    ) -> Result<(), AssemblyError> {
        let rows = self.layout.range(rf, re);
        let cols = self.layout.range(cf, ce);
        if block.shape() != (rows.len(), cols.len()) {
            return Err(AssemblyError::BlockShape {
                row: rf,
                col: cf,
                found: block.shape(),
                expected: (rows.len(), cols.len()),
            });
        }
        for (j, c) in cols.enumerate() {
            for (i, r) in rows.clone().enumerate() {
                let v = block[(i, j)];
                if v != 0.0 {
                    self.entries.push((r, c, scale * v));
                }
            }
        }
        Ok(())
    }
}

/// Stabilization block `τ/|e| · CᵀC` for both state components.
fn stabilization_block(c: &DMatrix<f64>, tau: f64, length: f64) -> DMatrix<f64> {
    let ctc = c.transpose() * c * (tau / length);
    let d = ctc.nrows();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(&ctc);
    out.view_mut((d, d), (d, d)).copy_from(&ctc);
    out
}

/// Assembles the HDG operator on one set of operator fields. `fields` lists
/// `(flux, state, pressure, pressure trace, state trace)`; `pressure_sign`
/// multiplies every pressure and pressure-trace column.
pub(crate) fn assemble_operator(
    mesh: &Mesh,
    kern: &Kernels,
    stab: Stabilization,
    fields: [Field; 5],
    pressure_sign: f64,
    sink: &mut TripletSink<'_>,
) -> Result<(), AssemblyError> {
    let [fl, st, pr, pt, tr] = fields;
    let (dk, dk1) = (kern.dk(), kern.dk1());
    let (mk, mq) = (kern.edge_k.dim(), kern.edge_k1.dim());
    let h = mesh.metrics().h;
    for t in 0..mesh.n_triangles() {
        let map = ElementMap::new(mesh.triangle_vertices(t));
        let em = kern.element_matrices(&map);
        sink.add((fl, t), (fl, t), &em.flux_mass, 1.0)?;
        sink.add((fl, t), (st, t), &em.flux_state, 1.0)?;
        sink.add((st, t), (fl, t), &em.flux_state.transpose(), -1.0)?;
        sink.add((st, t), (pr, t), &em.state_pressure, pressure_sign)?;
        sink.add((pr, t), (st, t), &em.state_pressure.transpose(), -1.0)?;

        for slot in 0..3 {
            let e = mesh.triangle_edges[t][slot].edge;
            let side = kern.side_matrices(mesh, &map, t, slot);
            let tau = stab.value(side.length, h);
            let n = side.normal;
            sink.add((st, t), (st, t), &stabilization_block(&side.trace_state, tau, side.length), 1.0)?;

            // ⟨p̂, v·n⟩ and −⟨y·n, ŵ⟩
            let mut v_ph = DMatrix::zeros(2 * dk1, mq);
            for a in 0..2 {
                for j in 0..dk1 {
                    for m in 0..mq {
                        v_ph[(a * dk1 + j, m)] = n[a] * side.trace_pressure[(m, j)];
                    }
                }
            }
            sink.add((st, t), (pt, e), &v_ph, pressure_sign)?;
            sink.add((pt, e), (st, t), &v_ph.transpose(), -1.0)?;

            if mesh.edges[e].is_boundary() {
                continue;
            }
            // −⟨ŷ, T n⟩ and ⟨L n, μ⟩
            let mut t_tr = DMatrix::zeros(4 * dk, 2 * mk);
            // −τ⟨ŷ, v⟩ and −τ⟨y, μ⟩
            let mut v_tr = DMatrix::zeros(2 * dk1, 2 * mk);
            for a in 0..2 {
                for m in 0..mk {
                    for b in 0..2 {
                        for i in 0..dk {
                            t_tr[((2 * a + b) * dk + i, a * mk + m)] = -n[b] * side.trace_flux[(m, i)];
                        }
                    }
                    for j in 0..dk1 {
                        v_tr[(a * dk1 + j, a * mk + m)] = -tau * side.trace_state[(m, j)];
                    }
                }
            }
            sink.add((fl, t), (tr, e), &t_tr, 1.0)?;
            sink.add((tr, e), (fl, t), &t_tr.transpose(), -1.0)?;
            sink.add((st, t), (tr, e), &v_tr, 1.0)?;
            sink.add((tr, e), (st, t), &v_tr.transpose(), 1.0)?;
            let tr_tr = DMatrix::identity(2 * mk, 2 * mk) * (tau * side.length);
            sink.add((tr, e), (tr, e), &tr_tr, 1.0)?;
        }
    }
    Ok(())
}

/// Couplings of the control on boundary edge `e` with the state flux and
/// state equations, and of the adjoint with the control equation.
pub(crate) fn assemble_control_edge(
    mesh: &Mesh,
    kern: &Kernels,
    stab: Stabilization,
    gamma: f64,
    e: usize,
    sink: &mut TripletSink<'_>,
) -> Result<(), AssemblyError> {
    let edge = &mesh.edges[e];
    let Some(t) = edge.triangles[0].filter(|_| edge.is_boundary()) else {
        return Err(AssemblyError::InteriorControlEdge(e));
    };
    let slot = (0..3).find(|&s| mesh.triangle_edges[t][s].edge == e).expect("edge belongs to its triangle");
    let map = ElementMap::new(mesh.triangle_vertices(t));
    let side = kern.side_matrices(mesh, &map, t, slot);
    let tau = stab.value(side.length, mesh.metrics().h);
    let (n, tg) = (side.normal, side.tangent);
    let (dk, dk1, mk) = (kern.dk(), kern.dk1(), kern.edge_k.dim());
    let mut t_u = DMatrix::zeros(4 * dk, mk);
    let mut v_u = DMatrix::zeros(2 * dk1, mk);
    for m in 0..mk {
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..dk {
                    t_u[((2 * a + b) * dk + i, m)] = -tg[a] * n[b] * side.trace_flux[(m, i)];
                }
            }
            for j in 0..dk1 {
                v_u[(a * dk1 + j, m)] = -tau * tg[a] * side.trace_state[(m, j)];
            }
        }
    }
    let c = (Field::Control, e);
    sink.add((Field::Flux, t), c, &t_u, 1.0)?;
    sink.add((Field::State, t), c, &v_u, 1.0)?;
    // ⟨G n, μτ⟩ − τ⟨z, μτ⟩
    sink.add(c, (Field::DualFlux, t), &t_u.transpose(), -1.0)?;
    sink.add(c, (Field::DualState, t), &v_u.transpose(), 1.0)?;
    sink.add(c, c, &DMatrix::identity(mk, mk), -gamma * side.length)?;
    Ok(())
}

/// Builds the full linear system for the discrete optimality conditions.
pub fn assemble_optimality_system(
    mesh: &Mesh,
    config: &ProblemConfig,
    data: &dyn ProblemData,
) -> Result<GlobalSystem, AssemblyError> {
    let kern = config.kernels()?;
    let layout = DofLayout::new(mesh, config.degree);
    let stab = config.stabilization;
    let mut sink = TripletSink::new(&layout);

    assemble_operator(mesh, &kern, stab, Field::PRIMAL, 1.0, &mut sink)?;
    assemble_operator(mesh, &kern, stab, Field::DUAL, -1.0, &mut sink)?;

    let mut rhs = vec![0.0; layout.total()];
    let lambda_p = (Field::PressureMean, 0);
    let lambda_q = (Field::DualPressureMean, 0);
    for t in 0..mesh.n_triangles() {
        let map = ElementMap::new(mesh.triangle_vertices(t));
        let em = kern.element_matrices(&map);
        sink.add((Field::DualState, t), (Field::State, t), &em.state_mass, -1.0)?;

        let mean = DMatrix::from_column_slice(kern.dk(), 1, &em.pressure_mean);
        sink.add((Field::Pressure, t), lambda_p, &mean, 1.0)?;
        sink.add(lambda_p, (Field::Pressure, t), &mean.transpose(), 1.0)?;
        sink.add((Field::DualPressure, t), lambda_q, &mean, 1.0)?;
        sink.add(lambda_q, (Field::DualPressure, t), &mean.transpose(), 1.0)?;

        let f = kern.load_vector(&map, |x| data.source(x));
        let yd = kern.load_vector(&map, |x| data.target(x));
        for (i, r) in layout.range(Field::State, t).enumerate() {
            rhs[r] += f[i];
        }
        for (i, r) in layout.range(Field::DualState, t).enumerate() {
            rhs[r] -= yd[i];
        }
    }
    for e in 0..mesh.n_edges() {
        if mesh.edges[e].is_boundary() {
            assemble_control_edge(mesh, &kern, stab, config.gamma, e, &mut sink)?;
        }
    }

    let matrix = CscMatrix::from_triplets(layout.total(), &sink.entries);
    Ok(GlobalSystem { layout, system: SparseSystem::new(matrix, rhs), config: *config, h: mesh.metrics().h })
}

/// The primal HDG operator alone, indexed relative to the operator block.
pub fn primal_operator(mesh: &Mesh, config: &ProblemConfig) -> Result<CscMatrix, AssemblyError> {
    let kern = config.kernels()?;
    let layout = DofLayout::new(mesh, config.degree);
    let mut sink = TripletSink::new(&layout);
    assemble_operator(mesh, &kern, config.stabilization, Field::PRIMAL, 1.0, &mut sink)?;
    Ok(CscMatrix::from_triplets(layout.operator_len(), &sink.entries))
}
