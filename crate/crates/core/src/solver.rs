//! Compressed sparse storage and a deterministic direct solve.
//!
//! Factorization is a sparse LU with partial pivoting and a COLAMD column
//! ordering (provided by `faer`), run sequentially so repeated solves are
//! bitwise identical. The system is equilibrated before factoring and the
//! solution is polished by a few steps of iterative refinement against the
//! unscaled matrix.

use faer::col::ColMut;
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SolverError {
    #[error("matrix is empty")]
    Empty,
    #[error("right-hand side has length {rhs}, matrix dimension is {dim}")]
    DimensionMismatch { dim: usize, rhs: usize },
    #[error("matrix is structurally singular (no pivot at step {pivot})")]
    StructurallySingular { pivot: usize },
    #[error("matrix is numerically singular (non-finite solution entry {index})")]
    NumericallySingular { index: usize },
    #[error("relative residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    Inaccurate { residual: f64, tolerance: f64 },
    #[error("factorization failed: {0}")]
    Factorization(String),
}

/// Square matrix in compressed sparse column form with sorted row indices and
/// no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Sums duplicate `(row, col, value)` entries and drops exact zeros.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(r, c, _) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}×{n}");
            counts[c + 1] += 1;
        }
        for c in 0..n {
            counts[c + 1] += counts[c];
        }
        let mut next = counts.clone();
        let mut rows = vec![0usize; triplets.len()];
        let mut vals = vec![0.0f64; triplets.len()];
        for &(r, c, v) in triplets {
            let slot = next[c];
            rows[slot] = r;
            vals[slot] = v;
            next[c] += 1;
        }

        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for c in 0..n {
            scratch.clear();
            scratch.extend((counts[c]..counts[c + 1]).map(|i| (rows[i], vals[i])));
            // stable sort keeps the summation order of duplicates fixed
            scratch.sort_by_key(|&(r, _)| r);
            let mut i = 0;
            while i < scratch.len() {
                let r = scratch[i].0;
                let mut sum = 0.0;
                while i < scratch.len() && scratch[i].0 == r {
                    sum += scratch[i].1;
                    i += 1;
                }
                if sum != 0.0 {
                    row_idx.push(r);
                    values.push(sum);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Self { n, col_ptr, row_idx, values }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let triplets: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                assert_eq!(row.len(), n);
                row.iter().enumerate().map(move |(j, &v)| (i, j, v))
            })
            .collect();
        Self::from_triplets(n, &triplets)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterates `(row, col, value)` in column-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |c| {
            (self.col_ptr[c]..self.col_ptr[c + 1]).map(move |i| (self.row_idx[i], c, self.values[i]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.col_ptr[col]..self.col_ptr[col + 1];
        match self.row_idx[range.clone()].binary_search(&row) {
            Ok(i) => self.values[range.start + i],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            let xc = x[c];
            if xc == 0.0 {
                continue;
            }
            for i in self.col_ptr[c]..self.col_ptr[c + 1] {
                y[self.row_idx[i]] += self.values[i] * xc;
            }
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (r, c, v) in self.iter() {
            out[r][c] = v;
        }
        out
    }

    /// Coordinate listing, one `row col value` triple per line.
    pub fn to_coordinate_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::with_capacity(32 * self.nnz());
        for (r, c, v) in self.iter() {
            let _ = writeln!(out, "{r} {c} {v:.17e}");
        }
        out
    }

    fn scaled(&self, row_scale: &[f64], col_scale: &[f64]) -> Self {
        let mut values = self.values.clone();
        for c in 0..self.n {
            for i in self.col_ptr[c]..self.col_ptr[c + 1] {
                values[i] *= row_scale[self.row_idx[i]] * col_scale[c];
            }
        }
        Self { n: self.n, col_ptr: self.col_ptr.clone(), row_idx: self.row_idx.clone(), values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub matrix: CscMatrix,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    pub fn new(matrix: CscMatrix, rhs: Vec<f64>) -> Self {
        Self { matrix, rhs }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Ruiz row/column equilibration before factoring.
    pub equilibrate: bool,
    pub max_refinement_steps: usize,
    /// Bound on `‖Ax − b‖ / max(‖b‖, ‖A‖_F ‖x‖)`.
    pub tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { equilibrate: true, max_refinement_steps: 3, tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub dim: usize,
    pub nnz: usize,
    pub equilibrated: bool,
    /// Smallest and largest row / column scale factors applied.
    pub scale_range: (f64, f64),
    pub refinement_steps: usize,
    /// `‖Ax − b‖₂` for the returned solution.
    pub residual: f64,
    /// Residual relative to `max(‖b‖, ‖A‖_F ‖x‖)`.
    pub relative_residual: f64,
    /// `‖A‖_F ‖x‖ / ‖b‖`; a cheap lower bound on the condition number seen by
    /// this right-hand side.
    pub amplification: f64,
}

/// `‖Ax − b‖₂`.
pub fn residual(system: &SparseSystem, x: &[f64]) -> f64 {
    assert_eq!(x.len(), system.dim());
    let ax = system.matrix.mul_vec(x);
    ax.iter().zip(&system.rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Ruiz scaling: repeatedly divides rows and columns by the square root of
/// their largest entry.
fn ruiz_scaling(matrix: &CscMatrix, iterations: usize) -> (Vec<f64>, Vec<f64>) {
    let n = matrix.dim();
    let mut r = vec![1.0; n];
    let mut c = vec![1.0; n];
    for _ in 0..iterations {
        let mut row_max = vec![0.0f64; n];
        let mut col_max = vec![0.0f64; n];
        for (i, j, v) in matrix.iter() {
            let a = (v * r[i] * c[j]).abs();
            row_max[i] = row_max[i].max(a);
            col_max[j] = col_max[j].max(a);
        }
        let mut change = 0.0f64;
        for i in 0..n {
            if row_max[i] > 0.0 {
                r[i] /= row_max[i].sqrt();
                change = change.max((1.0 - row_max[i]).abs());
            }
            if col_max[i] > 0.0 {
                c[i] /= col_max[i].sqrt();
                change = change.max((1.0 - col_max[i]).abs());
            }
        }
        if change < 1e-3 {
            break;
        }
    }
    // powers of two keep the scaling itself exact
    let round = |s: &mut Vec<f64>| s.iter_mut().for_each(|v| *v = 2f64.powi(v.log2().round() as i32));
    round(&mut r);
    round(&mut c);
    (r, c)
}

struct Factor {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
}

impl Factor {
    fn new(matrix: &CscMatrix, equilibrate: bool) -> Result<Self, SolverError> {
        let n = matrix.dim();
        let (row_scale, col_scale) = if equilibrate { ruiz_scaling(matrix, 20) } else { (vec![1.0; n], vec![1.0; n]) };
        let scaled = matrix.scaled(&row_scale, &col_scale);
        let symbolic = SymbolicSparseColMatRef::new_checked(n, n, &scaled.col_ptr, None, &scaled.row_idx);
        let view = SparseColMatRef::new(symbolic, &scaled.values);
        faer::set_global_parallelism(faer::Par::Seq);
        let lu = view.sp_lu().map_err(|e| match e {
            LuError::SymbolicSingular { index } => SolverError::StructurallySingular { pivot: index },
            LuError::Generic(e) => SolverError::Factorization(format!("{e:?}")),
        })?;
        Ok(Self { lu, row_scale, col_scale })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = b.iter().zip(&self.row_scale).map(|(b, r)| b * r).collect();
        self.lu.solve_in_place(ColMut::from_slice_mut(&mut y));
        y.iter().zip(&self.col_scale).map(|(y, c)| y * c).collect()
    }
}

/// Solves `Ax = b` by sparse LU.
pub fn solve_direct(
    system: &SparseSystem,
    options: &SolveOptions,
) -> Result<(Vec<f64>, SolveDiagnostics), SolverError> {
    let n = system.dim();
    if n == 0 {
        return Err(SolverError::Empty);
    }
    if system.rhs.len() != n {
        return Err(SolverError::DimensionMismatch { dim: n, rhs: system.rhs.len() });
    }
    let factor = Factor::new(&system.matrix, options.equilibrate)?;
    let mut x = factor.solve(&system.rhs);
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(SolverError::NumericallySingular { index });
    }

    let mut res = residual(system, &x);
    let mut steps = 0;
    while steps < options.max_refinement_steps && res > 0.0 {
        let ax = system.matrix.mul_vec(&x);
        let r: Vec<f64> = system.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = factor.solve(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
        let new_res = residual(system, &candidate);
        if !(new_res < res) {
            break;
        }
        x = candidate;
        res = new_res;
        steps += 1;
    }

    let (b_norm, a_norm, x_norm) = (norm2(&system.rhs), system.matrix.frobenius_norm(), norm2(&x));
    let denom = b_norm.max(a_norm * x_norm);
    let relative = if denom > 0.0 { res / denom } else { 0.0 };
    let scales = factor.row_scale.iter().chain(&factor.col_scale);
    let scale_range = scales.fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let diagnostics = SolveDiagnostics {
        dim: n,
        nnz: system.matrix.nnz(),
        equilibrated: options.equilibrate,
        scale_range,
        refinement_steps: steps,
        residual: res,
        relative_residual: relative,
        amplification: if b_norm > 0.0 { a_norm * x_norm / b_norm } else { 0.0 },
    };
    if relative > options.tolerance {
        return Err(SolverError::Inaccurate { residual: relative, tolerance: options.tolerance });
    }
    Ok((x, diagnostics))
}
