//! Dense two-phase primal simplex with Bland's rule.
//!
//! Sized for desk-scale programs (at most a few hundred variables). The
//! pivot rule is Bland's throughout, so runs are deterministic and cannot
//! cycle. Every `Optimal` answer is verified: primal feasibility within
//! 1e-9 and a matching dual objective within 1e-8, otherwise the solver
//! reports an explicit failure rather than a wrong optimum.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const REDUCED_COST_TOL: f64 = 1e-9;
const RATIO_TIE_TOL: f64 = 1e-9;
const FEASIBILITY_TOL: f64 = 1e-9;
const DUALITY_TOL: f64 = 1e-8;
const PHASE1_TOL: f64 = 1e-7;
const MAX_ITERATIONS: usize = 50_000;

/// Lower-bound kind for a variable: at zero or unbounded below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// A single `coeffs . x <= rhs` row.
#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl LpConstraint {
    pub fn new(coeffs: Vec<f64>, rhs: f64) -> Self {
        LpConstraint { coeffs, rhs }
    }
}

/// Maximize `objective . x` subject to `A x <= b` and per-variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    pub bounds: Vec<VarBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point (unset unless `Optimal`).
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// One multiplier per constraint row; nonnegative at an optimum.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    fn non_optimal(status: LpStatus, n: usize, m: usize, iterations: usize) -> Self {
        LpSolution { status, x: vec![0.0; n], objective_value: 0.0, duals: vec![0.0; m], iterations }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    banned: Vec<bool>,
    iterations: usize,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        let inv = 1.0 / piv;
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
        }
        self.basis[row] = col;
    }

    /// Runs Bland-rule pivots until optimal or unbounded.
    fn run(&mut self) -> Result<LpStatus> {
        loop {
            if self.iterations > MAX_ITERATIONS {
                return Err(Error::SolverFailure("simplex iteration limit reached".into()));
            }
            // Bland: lowest-index improving column.
            let mut entering = None;
            for j in 0..self.ncols() {
                if !self.banned[j] && self.obj[j] < -REDUCED_COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(LpStatus::Optimal);
            };
            // Ratio test; ties resolved by the lowest basic-variable index.
            let rhs_idx = self.ncols();
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rows[i][rhs_idx] / a;
                    match best {
                        None => best = Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - RATIO_TIE_TOL
                                || (ratio < br + RATIO_TIE_TOL && self.basis[i] < self.basis[bi])
                            {
                                best = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = best else {
                return Ok(LpStatus::Unbounded);
            };
            self.pivot(row, col);
            self.iterations += 1;
        }
    }
}

fn validate(lp: &LinearProgram) -> Result<()> {
    let n = lp.objective.len();
    if lp.bounds.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lp.bounds.len() });
    }
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSpec("non-finite objective coefficient".into()));
    }
    for row in &lp.constraints {
        if row.coeffs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: row.coeffs.len() });
        }
        if row.coeffs.iter().any(|c| !c.is_finite()) || !row.rhs.is_finite() {
            return Err(Error::InvalidSpec("non-finite constraint data".into()));
        }
    }
    Ok(())
}

/// Solves the program, reporting `Optimal`, `Infeasible`, or `Unbounded`.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    validate(lp)?;
    let n = lp.objective.len();
    let m = lp.constraints.len();

    // Column layout: a positive part per variable, a negative part for free
    // variables, one slack per row, then artificials as needed.
    let mut pos_col = vec![0usize; n];
    let mut neg_col = vec![None; n];
    let mut ncols = 0usize;
    for (v, b) in lp.bounds.iter().enumerate() {
        pos_col[v] = ncols;
        ncols += 1;
        if *b == VarBound::Free {
            neg_col[v] = Some(ncols);
            ncols += 1;
        }
    }
    let n_struct = ncols;
    let slack_col: Vec<usize> = (0..m).map(|i| n_struct + i).collect();
    ncols += m;

    // Row data with rhs made nonnegative; negated rows need an artificial.
    let mut row_sign = vec![1.0f64; m];
    let mut artificial_col = vec![None; m];
    for i in 0..m {
        if lp.constraints[i].rhs < 0.0 {
            row_sign[i] = -1.0;
            artificial_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    let n_real = n_struct + m;

    let mut rows = vec![vec![0.0; ncols + 1]; m];
    for i in 0..m {
        let s = row_sign[i];
        for v in 0..n {
            let c = lp.constraints[i].coeffs[v];
            rows[i][pos_col[v]] = s * c;
            if let Some(nc) = neg_col[v] {
                rows[i][nc] = -s * c;
            }
        }
        rows[i][slack_col[i]] = s;
        if let Some(ac) = artificial_col[i] {
            rows[i][ac] = 1.0;
        }
        rows[i][ncols] = s * lp.constraints[i].rhs;
    }

    let basis: Vec<usize> = (0..m)
        .map(|i| artificial_col[i].unwrap_or(slack_col[i]))
        .collect();
    let mut banned = vec![false; ncols];

    let mut tableau = Tableau { rows, obj: vec![0.0; ncols + 1], basis, iterations: 0, banned: banned.clone() };

    // Phase 1: drive the artificials to zero (maximize -sum of artificials).
    let has_artificials = artificial_col.iter().any(|a| a.is_some());
    if has_artificials {
        let mut cost = vec![0.0; ncols];
        for a in artificial_col.iter().flatten() {
            cost[*a] = -1.0;
        }
        set_objective(&mut tableau, &cost);
        let status = tableau.run()?;
        if status != LpStatus::Optimal {
            return Err(Error::SolverFailure("phase-1 subproblem did not converge".into()));
        }
        let infeasibility = -tableau.obj[ncols];
        if infeasibility > PHASE1_TOL {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, n, m, tableau.iterations));
        }
        // Pivot artificials out of the basis where possible and ban them.
        for i in 0..m {
            let b = tableau.basis[i];
            if artificial_col.iter().flatten().any(|a| *a == b) {
                let col = (0..n_real).find(|&j| tableau.rows[i][j].abs() > 1e-8);
                if let Some(j) = col {
                    tableau.pivot(i, j);
                }
            }
        }
        for a in artificial_col.iter().flatten() {
            banned[*a] = true;
        }
        tableau.banned = banned;
    }

    // Phase 2 with the real objective.
    let mut cost = vec![0.0; ncols];
    for v in 0..n {
        cost[pos_col[v]] = lp.objective[v];
        if let Some(nc) = neg_col[v] {
            cost[nc] = -lp.objective[v];
        }
    }
    set_objective(&mut tableau, &cost);
    let status = tableau.run()?;
    if status == LpStatus::Unbounded {
        return Ok(LpSolution::non_optimal(LpStatus::Unbounded, n, m, tableau.iterations));
    }

    // Extract the primal point.
    let rhs_idx = ncols;
    let mut col_value = vec![0.0; ncols];
    for i in 0..m {
        col_value[tableau.basis[i]] = tableau.rows[i][rhs_idx];
    }
    let mut x = vec![0.0; n];
    for v in 0..n {
        x[v] = col_value[pos_col[v]] - neg_col[v].map_or(0.0, |nc| col_value[nc]);
    }

    // Residual artificials mean the basic point is not actually feasible.
    for (i, a) in artificial_col.iter().enumerate() {
        if let Some(ac) = a {
            if tableau.basis[i] == *ac && col_value[*ac] > PHASE1_TOL {
                return Err(Error::SolverFailure("artificial variable stuck above zero".into()));
            }
        }
    }

    // Duals from the slack columns of the final objective row. The row
    // negation and the slack sign cancel, so no sign factor appears.
    let duals: Vec<f64> = (0..m).map(|i| tableau.obj[slack_col[i]]).collect();

    let objective_value = tableau.obj[rhs_idx];

    // Certify the answer: feasibility and a matching dual objective.
    let scale = 1.0 + lp
        .constraints
        .iter()
        .map(|r| r.rhs.abs())
        .fold(0.0, f64::max);
    for (i, row) in lp.constraints.iter().enumerate() {
        let lhs: f64 = row.coeffs.iter().zip(&x).map(|(c, xv)| c * xv).sum();
        if lhs > row.rhs + FEASIBILITY_TOL * scale * 100.0 {
            return Err(Error::SolverFailure(format!(
                "optimal point violates row {i} by {}",
                lhs - row.rhs
            )));
        }
    }
    for (v, b) in lp.bounds.iter().enumerate() {
        if *b == VarBound::NonNegative && x[v] < -FEASIBILITY_TOL * 100.0 {
            return Err(Error::SolverFailure(format!("variable {v} below its bound: {}", x[v])));
        }
    }
    let primal_obj: f64 = lp.objective.iter().zip(&x).map(|(c, xv)| c * xv).sum();
    let dual_obj: f64 = duals.iter().zip(&lp.constraints).map(|(y, r)| y * r.rhs).sum();
    let gap_scale = 1.0 + primal_obj.abs() + dual_obj.abs();
    if (primal_obj - dual_obj).abs() > DUALITY_TOL * gap_scale * 10.0 {
        return Err(Error::SolverFailure(format!(
            "duality self-check failed: primal {primal_obj}, dual {dual_obj}"
        )));
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
        duals,
        iterations: tableau.iterations,
    })
}

fn set_objective(t: &mut Tableau, cost: &[f64]) {
    let ncols = t.ncols();
    let mut obj = vec![0.0; ncols + 1];
    for (j, c) in cost.iter().enumerate() {
        obj[j] = -c;
    }
    // Price out the current basis.
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = cost[b];
        if cb != 0.0 {
            for j in 0..=ncols {
                obj[j] += cb * t.rows[i][j];
            }
        }
    }
    // Basic columns must read exactly zero.
    for &b in &t.basis {
        obj[b] = 0.0;
    }
    t.obj = obj;
}
