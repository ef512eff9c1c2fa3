//! Dense two-phase tableau simplex for small LPs, returning both primal and
//! dual solutions.
//!
//! The master problems solved here have a few hundred rows and columns, so a
//! dense tableau is fine. Variable lower bounds are shifted out, finite upper
//! bounds become explicit `<=` rows, and every row gets a slack or surplus
//! column. Rows that cannot start from a slack basis first try a "crash"
//! column (a structural variable appearing in no other row with a positive
//! coefficient) before falling back to an artificial variable and phase 1.
//! Covering rows built by the master have exactly that singleton structure,
//! so restricted master problems solve without any phase-1 work.
//!
//! Pivoting is Dantzig's rule, switching to Bland's rule after
//! `5 * (rows + cols)` consecutive degenerate pivots.

use crate::{Error, Result};

/// Primal feasibility tolerance honored by the solver.
pub const TOL_FEAS: f64 = 1e-7;
/// Relative primal/dual objective gap at optimality.
pub const TOL_GAP: f64 = 1e-6;

const EPS_PIVOT: f64 = 1e-9;
const EPS_RC: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization LP over `objective.len()` variables with bounded
/// variables and dense inequality rows.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Per-variable `(lower, upper)`; `None` means unbounded above.
    pub bounds: Vec<(f64, Option<f64>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solution of an LP. Only `status` is meaningful unless it is `Optimal`.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One dual value per constraint, signed for minimization: `>=` rows
    /// carry nonnegative duals, `<=` rows nonpositive ones.
    pub duals: Vec<f64>,
    /// Reduced cost per variable (bound-row duals folded in).
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
}

impl LpSolution {
    fn non_optimal(status: LpStatus, n: usize, m: usize) -> LpSolution {
        LpSolution {
            status,
            primal: vec![0.0; n],
            duals: vec![0.0; m],
            reduced_costs: vec![0.0; n],
            objective: f64::NAN,
            dual_objective: f64::NAN,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
    degenerate_streak: usize,
    bland: bool,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn m(&self) -> usize {
        self.rows.len()
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = 1.0 / self.rows[r][e];
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        self.rows[r][e] = 1.0;
        self.rhs[r] *= inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for rr in 0..self.m() {
            if rr == r {
                continue;
            }
            let factor = self.rows[rr][e];
            if factor == 0.0 {
                continue;
            }
            for (v, p) in self.rows[rr].iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.rows[rr][e] = 0.0;
            self.rhs[rr] -= factor * pivot_rhs;
            if self.rhs[rr] < 0.0 && self.rhs[rr] > -1e-9 {
                self.rhs[rr] = 0.0;
            }
        }
        self.basis[r] = e;
    }

    /// Runs the simplex loop for one phase. `enterable(j)` gates candidate
    /// entering columns (used to bar artificials in phase 2).
    fn run(&mut self, costs: &[f64], enterable: &dyn Fn(usize) -> bool) -> Result<Step> {
        let limit = 1000 + 50 * (self.m() + self.ncols);
        let bland_after = 5 * (self.m() + self.ncols);
        for _ in 0..limit {
            let cb: Vec<f64> = self.basis.iter().map(|&b| costs[b]).collect();
            // Entering column.
            let mut entering: Option<(usize, f64)> = None;
            'cols: for j in 0..self.ncols {
                if !enterable(j) {
                    continue;
                }
                let mut rc = costs[j];
                for r in 0..self.m() {
                    if cb[r] != 0.0 {
                        rc -= cb[r] * self.rows[r][j];
                    }
                }
                if rc < -EPS_RC {
                    if self.bland {
                        entering = Some((j, rc));
                        break 'cols;
                    }
                    match entering {
                        Some((_, best)) if rc >= best => {}
                        _ => entering = Some((j, rc)),
                    }
                }
            }
            let Some((e, _)) = entering else {
                return Ok(Step::Optimal);
            };
            // Ratio test.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m() {
                let a = self.rows[r][e];
                if a > EPS_PIVOT {
                    let ratio = self.rhs[r] / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-12
                                || (ratio < lratio + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Step::Unbounded);
            };
            if ratio <= 1e-12 {
                self.degenerate_streak += 1;
                if self.degenerate_streak > bland_after {
                    self.bland = true;
                }
            } else {
                self.degenerate_streak = 0;
            }
            self.pivot(r, e);
        }
        Err(Error::Lp("simplex iteration limit exceeded".into()))
    }
}

/// Solves `lp` to optimality, reporting infeasible/unbounded statuses
/// explicitly. Deterministic for a fixed input.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.objective.len();
    let m_user = lp.constraints.len();
    if lp.bounds.len() != n {
        return Err(Error::Lp(format!(
            "{} bounds for {n} variables",
            lp.bounds.len()
        )));
    }
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(Error::Lp("constraint width mismatch".into()));
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Lp("non-finite constraint data".into()));
        }
    }
    if lp.objective.iter().any(|v| !v.is_finite()) {
        return Err(Error::Lp("non-finite objective".into()));
    }
    for &(lb, ub) in &lp.bounds {
        if !lb.is_finite() || ub.is_some_and(|u| !u.is_finite()) {
            return Err(Error::Lp("non-finite bound".into()));
        }
    }

    let lower: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();

    // Internal rows: user rows (rhs shifted by the lower bounds), then one
    // `x_j <= ub - lb` row per finite upper bound.
    let mut coeffs: Vec<Vec<f64>> = Vec::new();
    let mut senses: Vec<Sense> = Vec::new();
    let mut rhss: Vec<f64> = Vec::new();
    for c in &lp.constraints {
        let shift: f64 = c.coeffs.iter().zip(&lower).map(|(a, l)| a * l).sum();
        coeffs.push(c.coeffs.clone());
        senses.push(c.sense);
        rhss.push(c.rhs - shift);
    }
    for (j, &(lb, ub)) in lp.bounds.iter().enumerate() {
        if let Some(u) = ub {
            let span = u - lb;
            if span < -1e-9 {
                return Ok(LpSolution::non_optimal(LpStatus::Infeasible, n, m_user));
            }
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            coeffs.push(row);
            senses.push(Sense::Le);
            rhss.push(span.max(0.0));
        }
    }
    let m = coeffs.len();

    // Normalize to nonnegative right-hand sides.
    let mut row_flip = vec![1.0; m];
    for i in 0..m {
        if rhss[i] < 0.0 {
            row_flip[i] = -1.0;
            rhss[i] = -rhss[i];
            for v in coeffs[i].iter_mut() {
                *v = -*v;
            }
            senses[i] = match senses[i] {
                Sense::Ge => Sense::Le,
                Sense::Le => Sense::Ge,
            };
        }
    }
    let orig_rhs_norm = rhss.clone();

    // Initial basis: slack for <= rows; for >= rows, a singleton structural
    // column when one exists (established by a pivot below so the tableau
    // keeps tracking B^-1 of the assembled matrix), otherwise an artificial.
    let slack_sign: Vec<f64> = senses
        .iter()
        .map(|s| match s {
            Sense::Le => 1.0,
            Sense::Ge => -1.0,
        })
        .collect();
    let mut crash_used = vec![false; n];
    let mut crash_of_row: Vec<Option<usize>> = vec![None; m];
    let mut art_of_row: Vec<Option<usize>> = vec![None; m];
    let mut n_art = 0usize;
    for i in 0..m {
        if senses[i] == Sense::Ge {
            let mut crash = None;
            'scan: for j in 0..n {
                if crash_used[j] || coeffs[i][j] <= EPS_PIVOT {
                    continue;
                }
                for (r, row) in coeffs.iter().enumerate() {
                    if r != i && row[j] != 0.0 {
                        continue 'scan;
                    }
                }
                crash = Some(j);
                break;
            }
            if let Some(j) = crash {
                crash_used[j] = true;
                crash_of_row[i] = Some(j);
            } else {
                art_of_row[i] = Some(n_art);
                n_art += 1;
            }
        }
    }

    let ncols = n + m + n_art;
    let mut basis = vec![usize::MAX; m];
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; ncols];
        row[..n].copy_from_slice(&coeffs[i]);
        row[n + i] = slack_sign[i];
        basis[i] = n + i;
        if let Some(a) = art_of_row[i] {
            row[n + m + a] = 1.0;
            basis[i] = n + m + a;
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        rhs: rhss,
        basis,
        ncols,
        degenerate_streak: 0,
        bland: false,
    };
    for i in 0..m {
        if let Some(j) = crash_of_row[i] {
            tab.pivot(i, j);
        }
    }

    let art_start = n + m;
    let mut removed_internal: Vec<bool> = vec![false; m];

    // Phase 1.
    if n_art > 0 {
        let mut costs1 = vec![0.0; ncols];
        for c in costs1.iter_mut().skip(art_start) {
            *c = 1.0;
        }
        match tab.run(&costs1, &|_| true)? {
            Step::Optimal => {}
            Step::Unbounded => {
                return Err(Error::Lp("phase 1 reported unbounded".into()));
            }
        }
        let scale = 1.0 + orig_rhs_norm.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let art_value: f64 = (0..tab.m())
            .filter(|&r| tab.basis[r] >= art_start)
            .map(|r| tab.rhs[r])
            .sum();
        if art_value > TOL_FEAS * scale {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, n, m_user));
        }
        // Drive basic artificials out; drop rows that became redundant.
        let mut internal_of_tab_row: Vec<usize> = (0..m).collect();
        let mut r = 0;
        while r < tab.m() {
            if tab.basis[r] >= art_start {
                let mut pivot_col = None;
                for j in 0..art_start {
                    if tab.rows[r][j].abs() > 1e-7 {
                        pivot_col = Some(j);
                        break;
                    }
                }
                match pivot_col {
                    Some(j) => tab.pivot(r, j),
                    None => {
                        removed_internal[internal_of_tab_row[r]] = true;
                        tab.rows.remove(r);
                        tab.rhs.remove(r);
                        tab.basis.remove(r);
                        internal_of_tab_row.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        tab.degenerate_streak = 0;
        tab.bland = false;
    }

    // Phase 2.
    let mut costs2 = vec![0.0; ncols];
    costs2[..n].copy_from_slice(&lp.objective);
    let status = match tab.run(&costs2, &|j| j < art_start)? {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => {
            return Ok(LpSolution::non_optimal(LpStatus::Unbounded, n, m_user));
        }
    };

    // Extraction.
    let mut primal = lower.clone();
    for r in 0..tab.m() {
        let b = tab.basis[r];
        if b < n {
            primal[b] += tab.rhs[r];
        }
    }
    let objective: f64 = lp.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();

    let cb: Vec<f64> = tab.basis.iter().map(|&b| costs2[b]).collect();
    let mut duals_norm = vec![0.0; m];
    for i in 0..m {
        if removed_internal[i] {
            continue;
        }
        let mut y = 0.0;
        for r in 0..tab.m() {
            if cb[r] != 0.0 {
                y += cb[r] * tab.rows[r][n + i];
            }
        }
        duals_norm[i] = slack_sign[i] * y;
    }
    let duals: Vec<f64> = (0..m_user).map(|i| row_flip[i] * duals_norm[i]).collect();

    let mut reduced_costs = vec![0.0; n];
    for (j, rc_out) in reduced_costs.iter_mut().enumerate() {
        let mut rc = costs2[j];
        for r in 0..tab.m() {
            if cb[r] != 0.0 {
                rc -= cb[r] * tab.rows[r][j];
            }
        }
        *rc_out = rc;
    }

    let shift_const: f64 = lp.objective.iter().zip(&lower).map(|(c, l)| c * l).sum();
    let dual_objective: f64 = orig_rhs_norm
        .iter()
        .zip(&duals_norm)
        .map(|(b, y)| b * y)
        .sum::<f64>()
        + shift_const;

    Ok(LpSolution {
        status,
        primal,
        duals,
        reduced_costs,
        objective,
        dual_objective,
    })
}
