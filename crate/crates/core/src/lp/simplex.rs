use super::{LinearProgram, LpSolution};
use crate::error::{Error, Result};

/// Reduced costs above `-COST_EPS` count as non-negative.
const COST_EPS: f64 = 1e-10;
/// Smallest entry accepted as a pivot in the ratio test.
const PIVOT_EPS: f64 = 1e-9;
/// Entries below this are treated as structural zeros.
const ZERO_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

/// Two-phase dense simplex with Bland's rule.
///
/// `tol` is the primal feasibility tolerance: phase one declares the program
/// infeasible when the artificial sum stays above it (scaled by `max(1, |b|)`),
/// and the final point is re-checked against the original constraints.
pub fn solve(lp: &LinearProgram, tol: f64) -> Result<LpSolution> {
    let mut t = Tableau::new(lp);
    let scale = lp.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));

    if t.num_artificial > 0 {
        let cost: Vec<f64> = (0..t.cols).map(|j| if t.is_artificial(j) { 1.0 } else { 0.0 }).collect();
        t.set_costs(&cost);
        match t.run(true)? {
            Step::Optimal => {}
            // phase one is bounded below by zero
            Step::Unbounded(_) => return Err(Error::NumericalBreakdown("phase one reported unbounded".into())),
        }
        if t.objective_value() > tol * scale {
            return Ok(LpSolution::Infeasible);
        }
        t.evict_artificials();
    }

    let mut cost = vec![0.0; t.cols];
    cost[..lp.num_vars()].copy_from_slice(&lp.objective);
    t.set_costs(&cost);
    match t.run(false)? {
        Step::Optimal => {}
        Step::Unbounded(col) => return Ok(LpSolution::Unbounded { ray: t.ray(col, lp.num_vars()) }),
    }

    let x = t.primal(lp.num_vars());
    let violation = lp.max_violation(&x);
    if violation > 1e-6 * scale {
        return Err(Error::NumericalBreakdown(format!("final point violates constraints by {violation:e}")));
    }
    let value = lp.value_at(&x);
    Ok(LpSolution::Optimal { x, value })
}

enum Step {
    Optimal,
    Unbounded(usize),
}

/// Columns: structural `0..n`, surplus/slack `n..n+m`, artificials after.
struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs; `obj_rhs` holds minus the current objective value.
    obj: Vec<f64>,
    obj_rhs: f64,
    cols: usize,
    first_artificial: usize,
    num_artificial: usize,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let (m, n) = (lp.num_constraints(), lp.num_vars());
        let num_artificial = lp.rhs.iter().filter(|&&b| b > 0.0).count();
        let cols = n + m + num_artificial;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_art = n + m;
        for (i, (a, &b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let mut row = vec![0.0; cols];
            if b > 0.0 {
                // a·x − s_i + art = b
                row[..n].copy_from_slice(a);
                row[n + i] = -1.0;
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
                rhs.push(b);
            } else {
                // −a·x + s_i = −b >= 0
                for (dst, src) in row[..n].iter_mut().zip(a) {
                    *dst = -src;
                }
                row[n + i] = 1.0;
                basis.push(n + i);
                rhs.push(-b);
            }
            rows.push(row);
        }
        Tableau {
            rows,
            rhs,
            basis,
            obj: vec![0.0; cols],
            obj_rhs: 0.0,
            cols,
            first_artificial: n + m,
            num_artificial,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_artificial
    }

    fn set_costs(&mut self, cost: &[f64]) {
        self.obj = cost.to_vec();
        self.obj_rhs = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, r) in self.obj.iter_mut().zip(&self.rows[i]) {
                    *o -= cb * r;
                }
                self.obj_rhs -= cb * self.rhs[i];
            }
        }
    }

    fn objective_value(&self) -> f64 {
        -self.obj_rhs
    }

    fn run(&mut self, allow_artificial: bool) -> Result<Step> {
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index improving column
            let entering = (0..self.cols)
                .filter(|&j| allow_artificial || !self.is_artificial(j))
                .find(|&j| self.obj[j] < -COST_EPS);
            let Some(col) = entering else {
                return Ok(Step::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            let mut tiny = false;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a <= PIVOT_EPS {
                    tiny |= a > ZERO_EPS;
                    continue;
                }
                let ratio = self.rhs[i] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if (!tie && ratio < best) || (tie && self.basis[i] < self.basis[k]) {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None if tiny => {
                    return Err(Error::NumericalBreakdown(format!(
                        "column {col} has only pivots below {PIVOT_EPS:e}"
                    )))
                }
                None => return Ok(Step::Unbounded(col)),
            }
        }
        Err(Error::NumericalBreakdown(format!("no convergence after {MAX_PIVOTS} pivots")))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        self.rows[row][col] = 1.0;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row];
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let f = self.rows[i][col];
            if f == 0.0 {
                continue;
            }
            for (v, pr) in self.rows[i].iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.rows[i][col] = 0.0;
            self.rhs[i] -= f * pivot_rhs;
            if self.rhs[i] < 0.0 && self.rhs[i] > -ZERO_EPS {
                self.rhs[i] = 0.0;
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, pr) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.obj[col] = 0.0;
            self.obj_rhs -= f * pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Pivots zero-level artificials out of the basis; rows with no usable
    /// structural entry are redundant and dropped.
    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if !self.is_artificial(self.basis[i]) {
                i += 1;
                continue;
            }
            let replacement = (0..self.first_artificial).find(|&j| self.rows[i][j].abs() > PIVOT_EPS);
            match replacement {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.rhs.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs[i];
            }
        }
        x
    }

    fn ray(&self, col: usize, n: usize) -> Vec<f64> {
        let mut d = vec![0.0; n];
        if col < n {
            d[col] = 1.0;
        }
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                d[b] = -self.rows[i][col];
            }
        }
        d
    }
}
