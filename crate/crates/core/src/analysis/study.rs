//! Convergence tables and the gradient-invariance experiment.

use std::fmt::Write as _;

use thiserror::Error;

use super::errors::{compute_errors, ErrorReport};
use super::exact::{ExactFields, Example1, Example2};
use crate::fem::quadrature::UnsupportedDegree;
use crate::fem::{triangle_quadrature, ElementMap};
use crate::hdg::{solve_problem, DiscreteSolution, Field, ProblemConfig, SolveError};
use crate::mesh::{build_uniform_mesh, Mesh, MeshError};

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("levels must be non-empty, strictly increasing and each double the last: {0:?}")]
    BadLevels(Vec<usize>),
    #[error("mesh with {n_cells} cells: {source}")]
    Mesh { n_cells: usize, source: MeshError },
    #[error("level with {n_cells} cells: {source}")]
    Solve { n_cells: usize, source: SolveError },
    #[error(transparent)]
    Quadrature(#[from] UnsupportedDegree),
}

/// One mesh level of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub errors: ErrorReport,
}

/// Error columns in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Y,
    FluxY,
    P,
    U,
    Z,
    FluxZ,
    Q,
}

impl Quantity {
    pub const ALL: [Quantity; 7] =
        [Quantity::Y, Quantity::FluxY, Quantity::P, Quantity::U, Quantity::Z, Quantity::FluxZ, Quantity::Q];

    pub fn of(self, r: &ErrorReport) -> f64 {
        match self {
            Quantity::Y => r.y,
            Quantity::FluxY => r.flux_y,
            Quantity::P => r.p,
            Quantity::U => r.u,
            Quantity::Z => r.z,
            Quantity::FluxZ => r.flux_z,
            Quantity::Q => r.q,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quantity::Y => "y",
            Quantity::FluxY => "L",
            Quantity::P => "p",
            Quantity::U => "u",
            Quantity::Z => "z",
            Quantity::FluxZ => "G",
            Quantity::Q => "q",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub k: usize,
    pub rows: Vec<ConvergenceRow>,
}

/// `log₂(e_coarse / e_fine)`; absent when either error is not positive.
pub fn rate(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2())
}

/// Errors in three significant digits, e.g. `8.76E+00`.
pub fn format_error(v: f64) -> String {
    let s = format!("{v:.2E}");
    match s.split_once('E') {
        Some((m, e)) => {
            let e: i32 = e.parse().unwrap_or(0);
            format!("{m}E{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
        }
        None => s,
    }
}

pub fn format_rate(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.2}")).unwrap_or_default()
}

const COLUMNS: [&str; 17] = [
    "n_cells", "div_y", "err_y", "rate_y", "err_L", "rate_L", "err_p", "rate_p", "err_u", "rate_u", "div_z", "err_z",
    "rate_z", "err_G", "rate_G", "err_q", "rate_q",
];

impl ConvergenceTable {
    /// Rate of `q` between row `i - 1` and row `i`.
    pub fn rate(&self, i: usize, q: Quantity) -> Option<f64> {
        if i == 0 || i >= self.rows.len() {
            return None;
        }
        rate(q.of(&self.rows[i - 1].errors), q.of(&self.rows[i].errors))
    }

    fn cells(&self) -> Vec<[String; 17]> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let e = &row.errors;
                let err = |q: Quantity| format_error(q.of(e));
                let rt = |q: Quantity| format_rate(self.rate(i, q));
                use Quantity::*;
                [
                    row.n_cells.to_string(),
                    format_error(e.div_y),
                    err(Y),
                    rt(Y),
                    err(FluxY),
                    rt(FluxY),
                    err(P),
                    rt(P),
                    err(U),
                    rt(U),
                    format_error(e.div_z),
                    err(Z),
                    rt(Z),
                    err(FluxZ),
                    rt(FluxZ),
                    err(Q),
                    rt(Q),
                ]
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for row in self.cells() {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let cells = self.cells();
        let widths: Vec<usize> = (0..COLUMNS.len())
            .map(|c| cells.iter().map(|r| r[c].len()).chain([COLUMNS[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |vals: &[&str]| {
            let mut s = String::from("|");
            for (v, w) in vals.iter().zip(&widths) {
                let _ = write!(s, " {v:>w$} |");
            }
            s.push('\n');
            s
        };
        let mut out = line(&COLUMNS);
        out.push('|');
        for w in &widths {
            let _ = write!(out, "{}:|", "-".repeat(w + 1));
        }
        out.push('\n');
        for r in &cells {
            let refs: Vec<&str> = r.iter().map(String::as_str).collect();
            out.push_str(&line(&refs));
        }
        out
    }
}

/// Which test problem a study runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Example {
    /// Manufactured solution with pressure scale `10ⁿ`.
    Trigonometric { n: i32 },
}

fn check_levels(levels: &[usize]) -> Result<(), StudyError> {
    let ok = !levels.is_empty() && levels[0] > 0 && levels.windows(2).all(|w| w[1] == 2 * w[0]);
    if ok {
        Ok(())
    } else {
        Err(StudyError::BadLevels(levels.to_vec()))
    }
}

/// Solves one level and returns mesh, solution and errors.
pub fn run_level(
    exact: &dyn ExactFields,
    config: &ProblemConfig,
    n_cells: usize,
    error_quad_degree: usize,
) -> Result<(Mesh, DiscreteSolution, ErrorReport), StudyError> {
    let mesh = build_uniform_mesh(n_cells, exact.domain()).map_err(|source| StudyError::Mesh { n_cells, source })?;
    let (_, sol) = solve_problem(&mesh, config, exact).map_err(|source| StudyError::Solve { n_cells, source })?;
    let errors = compute_errors(&mesh, &sol, exact, error_quad_degree)?;
    Ok((mesh, sol, errors))
}

/// Errors and rates of `exact` on the uniform meshes `levels`.
pub fn convergence_study_with(
    exact: &dyn ExactFields,
    config: &ProblemConfig,
    levels: &[usize],
    error_quad_degree: usize,
) -> Result<ConvergenceTable, StudyError> {
    check_levels(levels)?;
    let rows = levels
        .iter()
        .map(|&n_cells| {
            run_level(exact, config, n_cells, error_quad_degree)
                .map(|(_, _, errors)| ConvergenceRow { n_cells, errors })
        })
        .collect::<Result<_, _>>()?;
    Ok(ConvergenceTable { k: config.degree, rows })
}

pub fn convergence_study(example: Example, k: usize, levels: &[usize]) -> Result<ConvergenceTable, StudyError> {
    let Example::Trigonometric { n } = example;
    let config = ProblemConfig::new(k);
    convergence_study_with(&Example1::new(n), &config, levels, config.data_degree())
}

/// `‖y_h − ỹ_h‖` and `‖y_h‖` for the polynomial-target problem solved with
/// the plain and the gradient-perturbed target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robustness {
    pub delta: f64,
    pub state_norm: f64,
}

pub fn robustness_study(n_cells: usize, config: &ProblemConfig) -> Result<Robustness, StudyError> {
    let plain = Example2::new(false);
    let mesh = build_uniform_mesh(n_cells, plain.domain()).map_err(|source| StudyError::Mesh { n_cells, source })?;
    let solve = |data: &Example2| {
        solve_problem(&mesh, config, data).map(|(_, s)| s).map_err(|source| StudyError::Solve { n_cells, source })
    };
    let a = solve(&plain)?;
    let b = solve(&Example2::new(true))?;
    let (delta, state_norm) = state_difference(&mesh, &a, &b, config.data_degree())?;
    Ok(Robustness { delta, state_norm })
}

pub fn robustness_delta(n_cells: usize, k: usize) -> Result<f64, StudyError> {
    robustness_study(n_cells, &ProblemConfig::new(k)).map(|r| r.delta)
}

/// `(‖y_a − y_b‖, ‖y_a‖)` over the mesh.
fn state_difference(
    mesh: &Mesh,
    a: &DiscreteSolution,
    b: &DiscreteSolution,
    quad_degree: usize,
) -> Result<(f64, f64), UnsupportedDegree> {
    let rule = triangle_quadrature(quad_degree)?;
    let (mut d, mut n) = (0.0, 0.0);
    for t in 0..mesh.n_triangles() {
        let map = ElementMap::new(mesh.triangle_vertices(t));
        for (xi, w) in rule.iter() {
            let x = map.to_physical(xi);
            let ya = a.eval_vector(Field::State, &map, t, x);
            let yb = b.eval_vector(Field::State, &map, t, x);
            let w = w * map.det;
            d += w * ((ya[0] - yb[0]).powi(2) + (ya[1] - yb[1]).powi(2));
            n += w * (ya[0] * ya[0] + ya[1] * ya[1]);
        }
    }
    Ok((d.sqrt(), n.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rectangle;

    fn report(y: f64) -> ErrorReport {
        ErrorReport { y, flux_y: 2.0 * y, ..Default::default() }
    }

    #[test]
    fn number_formats() {
        assert_eq!(format_error(8.7605), "8.76E+00");
        assert_eq!(format_error(0.000134), "1.34E-04");
        assert_eq!(format_error(32700.0), "3.27E+04");
        assert_eq!(format_error(0.0), "0.00E+00");
        assert_eq!(format_rate(Some(2.0049)), "2.00");
        assert_eq!(format_rate(None), "");
    }

    #[test]
    fn rates_and_layout() {
        let t = ConvergenceTable {
            k: 0,
            rows: vec![
                ConvergenceRow { n_cells: 4, errors: report(8.0) },
                ConvergenceRow { n_cells: 8, errors: report(2.0) },
            ],
        };
        assert_eq!(t.rate(0, Quantity::Y), None);
        assert_eq!(t.rate(1, Quantity::Y), Some(2.0));
        assert_eq!(t.rate(1, Quantity::P), None);
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0].split(',').count(), 17);
        assert!(lines[2].starts_with("8,0.00E+00,2.00E+00,2.00,4.00E+00,2.00,"));
        let md = t.to_markdown();
        let widths: Vec<usize> = md.lines().map(|l| l.chars().count()).collect();
        assert!(widths.iter().all(|&w| w == widths[0]));
    }

    #[test]
    fn level_validation() {
        assert!(check_levels(&[4, 8, 16]).is_ok());
        for bad in [&[][..], &[4, 12], &[8, 4], &[0, 0]] {
            assert!(matches!(check_levels(bad), Err(StudyError::BadLevels(_))));
        }
    }

    #[test]
    fn zero_problem_gives_zero_table() {
        struct Zero;
        impl crate::hdg::ProblemData for Zero {
            fn source(&self, _: crate::Point) -> [f64; 2] {
                [0.0; 2]
            }
            fn target(&self, _: crate::Point) -> [f64; 2] {
                [0.0; 2]
            }
        }
        impl ExactFields for Zero {
            fn y(&self, _: crate::Point) -> [f64; 2] {
                [0.0; 2]
            }
            fn grad_y(&self, _: crate::Point) -> [f64; 4] {
                [0.0; 4]
            }
            fn p(&self, _: crate::Point) -> f64 {
                0.0
            }
            fn z(&self, _: crate::Point) -> [f64; 2] {
                [0.0; 2]
            }
            fn grad_z(&self, _: crate::Point) -> [f64; 4] {
                [0.0; 4]
            }
            fn q(&self, _: crate::Point) -> f64 {
                0.0
            }
            fn gamma(&self) -> f64 {
                1.0
            }
            fn domain(&self) -> Rectangle {
                Rectangle::unit_square()
            }
        }
        let table = convergence_study_with(&Zero, &ProblemConfig::new(0), &[2, 4], 6).unwrap();
        for (i, row) in table.rows.iter().enumerate() {
            for q in Quantity::ALL {
                assert_eq!(q.of(&row.errors), 0.0);
                assert_eq!(table.rate(i, q), None);
            }
        }
    }
}
