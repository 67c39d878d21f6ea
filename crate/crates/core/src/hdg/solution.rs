use super::assembly::{assemble_optimality_system, AssemblyError, GlobalSystem, ProblemConfig, ProblemData};
use super::layout::{DofLayout, Field};
use crate::fem::{eval_edge, eval_element, EdgeBasis, ElementMap, TriangleBasis};
use crate::mesh::Mesh;
use crate::solver::{solve_direct, SolveDiagnostics, SolveOptions, SolverError};
use crate::Point;

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Coefficient vector of a solved system with named views.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub layout: DofLayout,
    pub values: Vec<f64>,
    pub config: ProblemConfig,
    pub diagnostics: Option<SolveDiagnostics>,
    basis_k: TriangleBasis,
    basis_k1: TriangleBasis,
    edge_k: EdgeBasis,
    edge_k1: EdgeBasis,
}

impl DiscreteSolution {
    pub fn new(layout: DofLayout, values: Vec<f64>, config: ProblemConfig) -> Self {
        assert_eq!(layout.total(), values.len());
        let k = layout.degree();
        Self {
            layout,
            values,
            config,
            diagnostics: None,
            basis_k: TriangleBasis::new(k),
            basis_k1: TriangleBasis::new(k + 1),
            edge_k: EdgeBasis::new(k),
            edge_k1: EdgeBasis::new(k + 1),
        }
    }

    pub fn degree(&self) -> usize {
        self.layout.degree()
    }

    /// Coefficients of `field` on `entity`.
    pub fn coeffs(&self, field: Field, entity: usize) -> &[f64] {
        &self.values[self.layout.range(field, entity)]
    }

    pub fn pressure_multiplier(&self) -> f64 {
        self.coeffs(Field::PressureMean, 0)[0]
    }

    pub fn dual_pressure_multiplier(&self) -> f64 {
        self.coeffs(Field::DualPressureMean, 0)[0]
    }

    fn element_basis(&self, field: Field) -> &TriangleBasis {
        match field {
            Field::State | Field::DualState => &self.basis_k1,
            _ => &self.basis_k,
        }
    }

    /// Matrix field (`Flux` / `DualFlux`) at `x` in element `t`, row-major.
    pub fn eval_matrix(&self, field: Field, map: &ElementMap, t: usize, x: Point) -> [f64; 4] {
        eval_element::<4>(self.coeffs(field, t), map, &self.basis_k, x)
    }

    pub fn eval_vector(&self, field: Field, map: &ElementMap, t: usize, x: Point) -> [f64; 2] {
        eval_element::<2>(self.coeffs(field, t), map, self.element_basis(field), x)
    }

    pub fn eval_scalar(&self, field: Field, map: &ElementMap, t: usize, x: Point) -> f64 {
        eval_element::<1>(self.coeffs(field, t), map, self.element_basis(field), x)[0]
    }

    /// Scalar trace field at parameter `s` along edge `e`.
    pub fn eval_edge_scalar(&self, field: Field, e: usize, s: f64) -> f64 {
        let basis = match field {
            Field::PressureTrace | Field::DualPressureTrace => &self.edge_k1,
            _ => &self.edge_k,
        };
        eval_edge::<1>(self.coeffs(field, e), basis, s)[0]
    }

    pub fn eval_edge_vector(&self, field: Field, e: usize, s: f64) -> [f64; 2] {
        eval_edge::<2>(self.coeffs(field, e), &self.edge_k, s)
    }
}

/// Assembles and solves the optimality system.
pub fn solve_problem(
    mesh: &Mesh,
    config: &ProblemConfig,
    data: &dyn ProblemData,
) -> Result<(GlobalSystem, DiscreteSolution), SolveError> {
    let gs = assemble_optimality_system(mesh, config, data)?;
    let (x, diag) = solve_direct(&gs.system, &SolveOptions::default())?;
    let mut sol = DiscreteSolution::new(gs.layout.clone(), x, *config);
    sol.diagnostics = Some(diag);
    Ok((gs, sol))
}
