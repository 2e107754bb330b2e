use itertools::Itertools;

use super::{dot, LinearProgram, LpSolution};
use crate::error::{Error, Result};

pub const MAX_ORACLE_VARS: usize = 8;
pub const MAX_ORACLE_CONSTRAINTS: usize = 40;

const SINGULAR_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexEnumeration {
    /// Distinct basic feasible points, in discovery order.
    pub vertices: Vec<Vertex>,
    /// The minimum over `vertices`, or a certificate when there is none.
    pub outcome: LpSolution,
}

/// Brute-force solve: intersect every choice of `n` constraint hyperplanes
/// (rows of `A` plus the facets `x_j = 0`), keep the feasible intersection
/// points, and take the best. Unboundedness is decided the same way on the
/// recession cone `{d >= 0 : Ad >= 0, Σd = 1}`.
pub fn enumerate_vertices(lp: &LinearProgram) -> Result<VertexEnumeration> {
    let (n, m) = (lp.num_vars(), lp.num_constraints());
    if n > MAX_ORACLE_VARS || m > MAX_ORACLE_CONSTRAINTS {
        return Err(Error::DimensionTooLarge { n, m, max_n: MAX_ORACLE_VARS, max_m: MAX_ORACLE_CONSTRAINTS });
    }
    let facets = facets(lp);

    let mut vertices: Vec<Vertex> = Vec::new();
    for chosen in (0..facets.len()).combinations(n) {
        let a: Vec<Vec<f64>> = chosen.iter().map(|&i| facets[i].0.clone()).collect();
        let b: Vec<f64> = chosen.iter().map(|&i| facets[i].1).collect();
        let Some(x) = solve_square(a, b) else { continue };
        if !feasible(&facets, &x) {
            continue;
        }
        if vertices.iter().any(|v| same_point(&v.x, &x)) {
            continue;
        }
        let value = lp.value_at(&x);
        vertices.push(Vertex { x, value });
    }

    let outcome = if vertices.is_empty() {
        // x >= 0 makes the polyhedron pointed, so nonempty implies a vertex exists
        LpSolution::Infeasible
    } else if let Some(ray) = descent_ray(lp, &facets) {
        LpSolution::Unbounded { ray }
    } else {
        let best = vertices
            .iter()
            .fold(&vertices[0], |best, v| if v.value < best.value - 1e-12 { v } else { best });
        LpSolution::Optimal { x: best.x.clone(), value: best.value }
    };
    Ok(VertexEnumeration { vertices, outcome })
}

/// Every constraint as `(row, rhs)` with sense `row·x >= rhs`.
fn facets(lp: &LinearProgram) -> Vec<(Vec<f64>, f64)> {
    let n = lp.num_vars();
    let mut out: Vec<(Vec<f64>, f64)> = lp.rows().iter().cloned().zip(lp.rhs().iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        out.push((e, 0.0));
    }
    out
}

fn feasible(facets: &[(Vec<f64>, f64)], x: &[f64]) -> bool {
    facets.iter().all(|(a, b)| dot(a, x) >= b - FEAS_EPS * (1.0 + b.abs()))
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).abs() <= 1e-9 * (1.0 + p.abs()))
}

/// Extreme rays of the recession cone, normalised to the simplex; returns one
/// with negative cost if any exists.
fn descent_ray(lp: &LinearProgram, facets: &[(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    let n = lp.num_vars();
    let homogeneous: Vec<(Vec<f64>, f64)> = facets.iter().map(|(a, _)| (a.clone(), 0.0)).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for chosen in (0..homogeneous.len()).combinations(n - 1) {
        let mut a: Vec<Vec<f64>> = chosen.iter().map(|&i| homogeneous[i].0.clone()).collect();
        let mut b = vec![0.0; n - 1];
        a.push(vec![1.0; n]);
        b.push(1.0);
        let Some(d) = solve_square(a, b) else { continue };
        if !feasible(&homogeneous, &d) {
            continue;
        }
        let cost = lp.value_at(&d);
        if cost < -1e-9 && best.as_ref().map_or(true, |(c, _)| cost < *c) {
            best = Some((cost, d));
        }
    }
    best.map(|(_, d)| d)
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < SINGULAR_EPS {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
