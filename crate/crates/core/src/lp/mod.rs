//! Dense linear programming: minimise `c·x` subject to `Ax >= b`, `x >= 0`.
//!
//! [`solve`] is a two-phase tableau simplex with Bland's rule; the entropic
//! polyhedra solved here are small and highly degenerate. [`enumerate_vertices`]
//! is a brute-force oracle that checks every basic point and is only meant for
//! a handful of variables.

mod simplex;
mod vertex;

pub use simplex::solve;
pub use vertex::{enumerate_vertices, Vertex, VertexEnumeration, MAX_ORACLE_CONSTRAINTS, MAX_ORACLE_VARS};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        if n == 0 || rows.is_empty() {
            return Err(Error::Dimension("need at least one variable and one constraint".into()));
        }
        if rows.len() != rhs.len() {
            return Err(Error::Dimension(format!("{} rows but {} right-hand sides", rows.len(), rhs.len())));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!("row {i} has {} coefficients, expected {n}", r.len())));
        }
        let finite = objective.iter().chain(rows.iter().flatten()).chain(&rhs).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Dimension("coefficients must be finite".into()));
        }
        Ok(LinearProgram { objective, rows, rhs })
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of `Ax >= b` and `x >= 0` at `x` (0 if feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().zip(&self.rhs).map(|(r, b)| b - dot(r, x));
        let bounds = x.iter().map(|v| -v);
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    /// `ray` is a direction `d >= 0` with `Ad >= 0` and `c·d < 0`.
    Unbounded { ray: Vec<f64> },
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpSolution::Optimal { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LpSolution::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// The optimum, or [`Error::Infeasible`] / [`Error::Unbounded`].
    pub fn into_optimum(self) -> Result<(Vec<f64>, f64)> {
        match self {
            LpSolution::Optimal { x, value } => Ok((x, value)),
            LpSolution::Infeasible => Err(Error::Infeasible),
            LpSolution::Unbounded { .. } => Err(Error::Unbounded),
        }
    }
}
