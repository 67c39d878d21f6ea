//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::study::format_error;
use crate::analysis::{convergence_study_with, robustness_study, verify, ConvergenceRow, ConvergenceTable, Example1};
use crate::hdg::{solve_problem, ProblemConfig, ProblemData};
use crate::mesh::{build_uniform_mesh, Rectangle};
use crate::Point;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct Common {
    /// Test problem: 1 (manufactured solution) or 2 (polynomial target).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub example: u8,
    /// Polynomial degree k.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub k: u8,
    /// Pressure scale exponent of example 1.
    #[arg(long, default_value_t = 2)]
    pub n: i32,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Exactness of the data and error quadrature.
    #[arg(long)]
    pub quad_degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Solve on one mesh and report errors.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Cells per side of the uniform mesh.
        #[arg(long, default_value_t = 8)]
        cells: usize,
        /// Use zero source and target.
        #[arg(long)]
        homogeneous: bool,
        /// Write the mesh in plain text.
        #[arg(long)]
        mesh_out: Option<PathBuf>,
        /// Write the system matrix in coordinate format.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Errors and rates over a sequence of meshes.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Cells per side, doubling at each level.
        #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32])]
        levels: Vec<usize>,
    },
    /// State difference between the plain and the gradient-perturbed target.
    Robustness {
        #[command(flatten)]
        common: Common,
        /// Cells per side of the uniform mesh.
        #[arg(long, default_value_t = 16)]
        cells: usize,
    },
    /// Run all property suites.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "divfree-hdg", version, about = "Divergence-free HDG for Stokes tangential boundary control")]
pub struct RunSpec {
    #[command(subcommand)]
    pub command: Command,
}

/// Parses arguments; usage errors carry clap's rendered message.
pub fn parse_args<I, T>(argv: I) -> Result<RunSpec, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let spec = RunSpec::try_parse_from(argv)?;
    if let Command::Converge { levels, .. } = &spec.command {
        let ok = !levels.is_empty() && levels[0] > 0 && levels.windows(2).all(|w| w[1] == 2 * w[0]);
        if !ok {
            return Err(clap::Error::raw(
                clap::error::ErrorKind::ValueValidation,
                format!("--levels must double at each step, got {levels:?}\n"),
            ));
        }
    }
    if let Command::Solve { cells: 0, .. } | Command::Robustness { cells: 0, .. } = &spec.command {
        return Err(clap::Error::raw(clap::error::ErrorKind::ValueValidation, "--cells must be positive\n"));
    }
    Ok(spec)
}

fn config(common: &Common) -> ProblemConfig {
    let mut c = ProblemConfig::new(common.k as usize);
    c.data_quad_degree = common.quad_degree;
    c
}

fn render(table: &ConvergenceTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Markdown => table.to_markdown(),
    }
}

struct Zero;

impl ProblemData for Zero {
    fn source(&self, _: Point) -> [f64; 2] {
        [0.0; 2]
    }

    fn target(&self, _: Point) -> [f64; 2] {
        [0.0; 2]
    }
}

/// Outcome of a run: exit code and the report text.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub code: i32,
    pub report: String,
}

fn failure(code: i32, msg: impl std::fmt::Display) -> RunOutput {
    RunOutput { code, report: format!("error: {msg}\n") }
}

fn emit(out: &Option<PathBuf>, report: String) -> RunOutput {
    match out {
        Some(path) => match std::fs::write(path, &report) {
            Ok(()) => RunOutput { code: EXIT_OK, report: String::new() },
            Err(e) => failure(EXIT_USAGE, format!("cannot write {}: {e}", path.display())),
        },
        None => RunOutput { code: EXIT_OK, report },
    }
}

fn run_solve(
    common: &Common,
    cells: usize,
    homogeneous: bool,
    mesh_out: &Option<PathBuf>,
    matrix_out: &Option<PathBuf>,
) -> RunOutput {
    let config = config(common);
    let quad = config.data_degree();
    let domain = if common.example == 1 { Rectangle::unit_square() } else { Rectangle::square(0.125) };
    let mesh = match build_uniform_mesh(cells, domain) {
        Ok(m) => m,
        Err(e) => return failure(EXIT_USAGE, e),
    };
    if let Some(path) = mesh_out {
        if let Err(e) = std::fs::write(path, mesh.to_text()) {
            return failure(EXIT_USAGE, format!("cannot write {}: {e}", path.display()));
        }
    }
    let ex1 = Example1::new(common.n);
    let ex2 = crate::analysis::Example2::new(false);
    let data: &dyn ProblemData = match (homogeneous, common.example) {
        (true, _) => &Zero,
        (false, 1) => &ex1,
        _ => &ex2,
    };
    let (gs, sol) = match solve_problem(&mesh, &config, data) {
        Ok(r) => r,
        Err(e) => return failure(EXIT_SOLVER, format!("{cells} cells: {e}")),
    };
    if let Some(path) = matrix_out {
        if let Err(e) = std::fs::write(path, gs.system.matrix.to_coordinate_text()) {
            return failure(EXIT_USAGE, format!("cannot write {}: {e}", path.display()));
        }
    }
    let mut report = String::new();
    let max_abs = sol.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if homogeneous || common.example == 2 {
        let diag = sol.diagnostics.as_ref().expect("solved");
        let _ = writeln!(report, "unknowns,{}", gs.layout.total());
        let _ = writeln!(report, "max_abs_solution,{}", format_error(max_abs));
        let _ = writeln!(report, "relative_residual,{}", format_error(diag.relative_residual));
        return emit(&common.out, report);
    }
    match crate::analysis::compute_errors(&mesh, &sol, &ex1, quad) {
        Ok(errors) => {
            let table = ConvergenceTable { k: config.degree, rows: vec![ConvergenceRow { n_cells: cells, errors }] };
            emit(&common.out, render(&table, common.format))
        }
        Err(e) => failure(EXIT_USAGE, e),
    }
}

/// Executes a parsed command.
pub fn run(spec: &RunSpec) -> RunOutput {
    match &spec.command {
        Command::Solve { common, cells, homogeneous, mesh_out, matrix_out } => {
            run_solve(common, *cells, *homogeneous, mesh_out, matrix_out)
        }
        Command::Converge { common, levels } => {
            if common.example != 1 {
                return failure(EXIT_USAGE, "convergence studies need the manufactured solution (--example 1)");
            }
            let config = config(common);
            match convergence_study_with(&Example1::new(common.n), &config, levels, config.data_degree()) {
                Ok(table) => emit(&common.out, render(&table, common.format)),
                Err(e) => failure(EXIT_SOLVER, e),
            }
        }
        Command::Robustness { common, cells } => match robustness_study(*cells, &config(common)) {
            Ok(r) => {
                let report = format!(
                    "n_cells,k,delta,state_norm,ratio\n{},{},{},{},{}\n",
                    cells,
                    common.k,
                    format_error(r.delta),
                    format_error(r.state_norm),
                    format_error(r.delta / r.state_norm)
                );
                emit(&common.out, report)
            }
            Err(e) => failure(EXIT_SOLVER, e),
        },
        Command::Verify { out } => {
            let outcomes = verify::run_all();
            let mut report = String::new();
            for o in &outcomes {
                let _ = writeln!(report, "{}", o.summary());
            }
            let mut result = emit(out, report);
            if result.code == EXIT_OK && !outcomes.iter().all(|o| o.passed()) {
                result.code = EXIT_VERIFY;
            }
            result
        }
    }
}

/// Parses `argv`, runs, and returns the exit code after printing.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let spec = match parse_args(argv) {
        Ok(s) => s,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out = run(&spec);
    if out.code == EXIT_OK || out.code == EXIT_VERIFY {
        print!("{}", out.report);
    } else {
        eprint!("{}", out.report);
    }
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunSpec, clap::Error> {
        parse_args(std::iter::once("divfree-hdg").chain(s.split_whitespace()))
    }

    #[test]
    fn parses_documented_commands() {
        let spec = parse("converge --example 1 --k 0 --n 2 --levels 4,8,16,32").unwrap();
        match spec.command {
            Command::Converge { common, levels } => {
                assert_eq!(levels, vec![4, 8, 16, 32]);
                assert_eq!((common.example, common.k, common.n), (1, 0, 2));
            }
            other => panic!("{other:?}"),
        }
        let spec = parse("robustness --cells 16 --k 1").unwrap();
        assert!(matches!(spec.command, Command::Robustness { cells: 16, common: Common { k: 1, .. } }));
        let spec = parse("solve --format markdown --quad-degree 20").unwrap();
        assert!(matches!(
            spec.command,
            Command::Solve { common: Common { format: Format::Markdown, quad_degree: Some(20), .. }, .. }
        ));
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["solve --k 7", "converge --levels 4,12", "solve --bogus", "solve --example 3", "frobnicate"] {
            let e = parse(bad).unwrap_err();
            assert!(e.use_stderr(), "{bad}");
        }
        assert_eq!(main_with_args(["divfree-hdg", "solve", "--k", "7"]), EXIT_USAGE);
    }

    #[test]
    fn homogeneous_solve_reports_zero() {
        let out = run(&parse("solve --homogeneous --cells 2 --k 1").unwrap());
        assert_eq!(out.code, EXIT_OK);
        assert!(out.report.contains("max_abs_solution,0.00E+00"), "{}", out.report);
    }

    #[test]
    fn solve_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let (a, m, x) = (dir.path().join("a.csv"), dir.path().join("mesh.txt"), dir.path().join("A.coo"));
        let cmd =
            format!("solve --cells 2 --out {} --mesh-out {} --matrix-out {}", a.display(), m.display(), x.display());
        assert_eq!(run(&parse(&cmd).unwrap()).code, EXIT_OK);
        let csv = std::fs::read_to_string(&a).unwrap();
        assert!(csv.starts_with("n_cells,div_y,err_y"));
        assert!(std::fs::read_to_string(&m).unwrap().starts_with("vertices 9"));
        assert!(std::fs::read_to_string(&x).unwrap().lines().count() > 100);
    }
}
