//! Dense linear-programming engine.
//!
//! Two-phase primal simplex over an explicit basis inverse, refreshed every 64
//! pivots. The incremental inverse update is the fast path; a full
//! refactorization is the retry, and a basis that is still singular after it
//! is reported as [`Error::SolverFailure`] (never as infeasible).
//!
//! Pivot selection is Dantzig's rule, switching permanently to Bland's rule
//! after a window of `5 * (rows + cols)` consecutive non-improving pivots so
//! that degenerate problems terminate.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default absolute feasibility tolerance (phase-1 verdict and solution check).
pub const DEFAULT_TOL_FEAS: f64 = 1e-8;
/// Default pivot/reduced-cost tolerance.
pub const DEFAULT_TOL_PIVOT: f64 = 1e-9;

/// Pivots between basis-inverse refactorizations.
const REFRESH_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Per-variable bound: lower bound 0 or -inf; upper bound is always +inf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarBound {
    #[default]
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub row: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> Constraint<S> {
    pub fn new(row: Vec<S>, relation: Relation, rhs: S) -> Self {
        Constraint { row, relation, rhs }
    }
}

/// Minimize `objective . v` subject to the constraint rows and bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<S> {
    pub num_vars: usize,
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
    pub bounds: Vec<VarBound>,
}

impl<S: Scalar> LpProblem<S> {
    pub fn new(
        num_vars: usize,
        objective: Vec<S>,
        constraints: Vec<Constraint<S>>,
        bounds: Vec<VarBound>,
    ) -> Self {
        LpProblem {
            num_vars,
            objective,
            constraints,
            bounds,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::invalid("objective length != num_vars"));
        }
        if self.bounds.len() != self.num_vars {
            return Err(Error::invalid("bounds length != num_vars"));
        }
        if !self.objective.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("objective coefficients must be finite"));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.row.len() != self.num_vars {
                return Err(Error::invalid(format!(
                    "constraint {i} row length != num_vars"
                )));
            }
            if !c.row.iter().all(|v| v.is_finite()) || !c.rhs.is_finite() {
                return Err(Error::invalid(format!(
                    "constraint {i} has non-finite data"
                )));
            }
        }
        Ok(())
    }

    /// Plain-text fixed-format listing for diffing.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(
            s,
            "lp vars {} rows {}",
            self.num_vars,
            self.constraints.len()
        )
        .unwrap();
        let coefs: Vec<String> = self
            .objective
            .iter()
            .map(|v| format!("{v:+.12e}"))
            .collect();
        writeln!(s, "min {}", coefs.join(" ")).unwrap();
        for c in &self.constraints {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "==",
            };
            let row: Vec<String> = c.row.iter().map(|v| format!("{v:+.12e}")).collect();
            writeln!(s, "row {} {} {:+.12e}", row.join(" "), rel, c.rhs).unwrap();
        }
        let b: Vec<&str> = self
            .bounds
            .iter()
            .map(|b| match b {
                VarBound::NonNegative => "0..inf",
                VarBound::Free => "free",
            })
            .collect();
        writeln!(s, "bounds {}", b.join(" ")).unwrap();
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    pub point: Option<Vec<S>>,
    pub objective_value: Option<S>,
    pub iterations: usize,
}

impl<S> LpSolution<S> {
    fn status_only(status: LpStatus, iterations: usize) -> Self {
        LpSolution {
            status,
            point: None,
            objective_value: None,
            iterations,
        }
    }
}

/// Solve the LP by two-phase primal simplex.
pub fn solve_lp<S: Scalar>(p: &LpProblem<S>, tol_feas: S, tol_pivot: S) -> Result<LpSolution<S>> {
    p.validate()?;
    if !(tol_feas > S::zero()) || !(tol_pivot > S::zero()) {
        return Err(Error::invalid("tolerances must be positive"));
    }
    let mut std = Standard::build(p);
    let mut iterations = 0;

    if std.rows > 0 && std.has_artificials() {
        let phase1_costs = std.phase1_costs();
        match std.run(&phase1_costs, tol_pivot, &mut iterations)? {
            RunStatus::Optimal => {}
            // Phase 1 is bounded below by zero; an unbounded verdict is numeric.
            RunStatus::Unbounded => {
                return Err(Error::SolverFailure("phase-1 reported unbounded".into()))
            }
        }
        std.refactorize(tol_pivot)?;
        let infeas = std.objective(&phase1_costs);
        if infeas > tol_feas {
            return Ok(LpSolution::status_only(LpStatus::Infeasible, iterations));
        }
        std.drive_out_artificials();
    }

    let phase2_costs = std.phase2_costs();
    std.bar_artificials();
    match std.run(&phase2_costs, tol_pivot, &mut iterations)? {
        RunStatus::Unbounded => Ok(LpSolution::status_only(LpStatus::Unbounded, iterations)),
        RunStatus::Optimal => {
            let point = std.extract(p);
            verify_solution(p, &point, tol_feas)?;
            let objective_value = point
                .iter()
                .zip(&p.objective)
                .map(|(&x, &c)| x * c)
                .sum::<S>();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                point: Some(point),
                objective_value: Some(objective_value),
                iterations,
            })
        }
    }
}

/// Phase-1 only: any point satisfying the constraints within `tol_feas`, or
/// `None` when the system is infeasible.
pub fn feasible_point<S: Scalar>(
    num_vars: usize,
    constraints: &[Constraint<S>],
    bounds: &[VarBound],
    tol_feas: S,
) -> Result<Option<Vec<S>>> {
    let p = LpProblem::new(
        num_vars,
        vec![S::zero(); num_vars],
        constraints.to_vec(),
        bounds.to_vec(),
    );
    let sol = solve_lp(&p, tol_feas, S::from_f64(DEFAULT_TOL_PIVOT))?;
    Ok(match sol.status {
        LpStatus::Optimal => sol.point,
        LpStatus::Infeasible => None,
        // Zero objective cannot be unbounded.
        LpStatus::Unbounded => {
            return Err(Error::SolverFailure("phase-1 reported unbounded".into()))
        }
    })
}

fn verify_solution<S: Scalar>(p: &LpProblem<S>, x: &[S], tol_feas: S) -> Result<()> {
    for (i, c) in p.constraints.iter().enumerate() {
        let lhs: S = c.row.iter().zip(x).map(|(&a, &v)| a * v).sum();
        let slack = tol_feas * (S::one() + c.rhs.abs());
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs + slack,
            Relation::Ge => lhs >= c.rhs - slack,
            Relation::Eq => (lhs - c.rhs).abs() <= slack,
        };
        if !ok {
            return Err(Error::SolverFailure(format!(
                "solution violates constraint {i}: lhs {lhs} rhs {}",
                c.rhs
            )));
        }
    }
    for (j, b) in p.bounds.iter().enumerate() {
        if *b == VarBound::NonNegative && x[j] < -tol_feas {
            return Err(Error::SolverFailure(format!("variable {j} below bound")));
        }
    }
    Ok(())
}

enum RunStatus {
    Optimal,
    Unbounded,
}

/// Standard-form problem: min c.x s.t. Cols * x = rhs, x >= 0, rhs >= 0.
struct Standard<S> {
    rows: usize,
    /// Column-major constraint matrix including slack and artificial columns.
    cols: Vec<Vec<S>>,
    costs: Vec<S>,
    rhs: Vec<S>,
    /// First artificial column index; columns >= this are artificial.
    art_start: usize,
    basis: Vec<usize>,
    binv: Vec<S>,
    is_basic: Vec<bool>,
    barred: Vec<bool>,
    var_map: Vec<VarCols>,
}

#[derive(Clone, Copy)]
enum VarCols {
    Direct(usize),
    Split { pos: usize, neg: usize },
}

impl<S: Scalar> Standard<S> {
    fn build(p: &LpProblem<S>) -> Self {
        let m = p.constraints.len();
        let mut var_map = Vec::with_capacity(p.num_vars);
        let mut ncols = 0;
        for b in &p.bounds {
            match b {
                VarBound::NonNegative => {
                    var_map.push(VarCols::Direct(ncols));
                    ncols += 1;
                }
                VarBound::Free => {
                    var_map.push(VarCols::Split {
                        pos: ncols,
                        neg: ncols + 1,
                    });
                    ncols += 2;
                }
            }
        }
        let n_slack = p
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let mut cols = vec![vec![S::zero(); m]; ncols + n_slack];
        let mut costs = vec![S::zero(); ncols + n_slack];
        for (j, &c) in p.objective.iter().enumerate() {
            match var_map[j] {
                VarCols::Direct(k) => costs[k] = c,
                VarCols::Split { pos, neg } => {
                    costs[pos] = c;
                    costs[neg] = -c;
                }
            }
        }
        let mut rhs = vec![S::zero(); m];
        let mut slack_of_row = vec![usize::MAX; m];
        let mut next_slack = ncols;
        for (r, con) in p.constraints.iter().enumerate() {
            for (j, &coef) in con.row.iter().enumerate() {
                match var_map[j] {
                    VarCols::Direct(k) => cols[k][r] += coef,
                    VarCols::Split { pos, neg } => {
                        cols[pos][r] += coef;
                        cols[neg][r] -= coef;
                    }
                }
            }
            match con.relation {
                Relation::Le => {
                    cols[next_slack][r] = S::one();
                    slack_of_row[r] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    cols[next_slack][r] = -S::one();
                    slack_of_row[r] = next_slack;
                    next_slack += 1;
                }
                Relation::Eq => {}
            }
            rhs[r] = con.rhs;
        }
        // Normalize rhs >= 0.
        for r in 0..m {
            if rhs[r] < S::zero() {
                rhs[r] = -rhs[r];
                for col in cols.iter_mut() {
                    col[r] = -col[r];
                }
            }
        }
        // Initial basis: a row's own slack when its coefficient is +1,
        // otherwise an artificial column.
        let art_start = cols.len();
        let mut basis = Vec::with_capacity(m);
        for r in 0..m {
            let s = slack_of_row[r];
            if s != usize::MAX && cols[s][r] == S::one() {
                basis.push(s);
            } else {
                let mut art = vec![S::zero(); m];
                art[r] = S::one();
                cols.push(art);
                costs.push(S::zero());
                basis.push(cols.len() - 1);
            }
        }
        let ncols_total = cols.len();
        let mut is_basic = vec![false; ncols_total];
        for &b in &basis {
            is_basic[b] = true;
        }
        let mut std = Standard {
            rows: m,
            cols,
            costs,
            rhs,
            art_start,
            basis,
            binv: vec![S::zero(); m * m],
            is_basic,
            barred: vec![false; ncols_total],
            var_map,
        };
        // Initial basis is the identity.
        for r in 0..m {
            std.binv[r * m + r] = S::one();
        }
        std
    }

    fn has_artificials(&self) -> bool {
        self.cols.len() > self.art_start
    }

    fn phase1_costs(&self) -> Vec<S> {
        let mut c = vec![S::zero(); self.cols.len()];
        for v in c.iter_mut().skip(self.art_start) {
            *v = S::one();
        }
        c
    }

    fn phase2_costs(&self) -> Vec<S> {
        let mut c = self.costs.clone();
        c.resize(self.cols.len(), S::zero());
        c
    }

    fn bar_artificials(&mut self) {
        for j in self.art_start..self.cols.len() {
            self.barred[j] = true;
        }
    }

    fn x_basic(&self) -> Vec<S> {
        let m = self.rows;
        (0..m)
            .map(|r| {
                self.binv[r * m..(r + 1) * m]
                    .iter()
                    .zip(&self.rhs)
                    .map(|(&b, &v)| b * v)
                    .sum()
            })
            .collect()
    }

    fn objective(&self, costs: &[S]) -> S {
        self.x_basic()
            .iter()
            .zip(&self.basis)
            .map(|(&x, &b)| x * costs[b])
            .sum()
    }

    /// Rebuild the basis inverse from scratch by Gauss-Jordan elimination.
    fn refactorize(&mut self, tol_pivot: S) -> Result<()> {
        let m = self.rows;
        let mut work = vec![S::zero(); m * m];
        for (r, &b) in self.basis.iter().enumerate() {
            for i in 0..m {
                work[i * m + r] = self.cols[b][i];
            }
        }
        let mut inv = vec![S::zero(); m * m];
        for r in 0..m {
            inv[r * m + r] = S::one();
        }
        for k in 0..m {
            let mut piv_row = k;
            let mut piv_val = work[k * m + k].abs();
            for i in (k + 1)..m {
                let v = work[i * m + k].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = i;
                }
            }
            if piv_val <= tol_pivot {
                return Err(Error::SolverFailure(
                    "numerically singular basis after refactorization retry".into(),
                ));
            }
            if piv_row != k {
                for j in 0..m {
                    work.swap(k * m + j, piv_row * m + j);
                    inv.swap(k * m + j, piv_row * m + j);
                }
            }
            let piv = work[k * m + k];
            for j in 0..m {
                work[k * m + j] /= piv;
                inv[k * m + j] /= piv;
            }
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = work[i * m + k];
                if f == S::zero() {
                    continue;
                }
                for j in 0..m {
                    let wk = work[k * m + j];
                    let ik = inv[k * m + j];
                    work[i * m + j] -= f * wk;
                    inv[i * m + j] -= f * ik;
                }
            }
        }
        self.binv = inv;
        Ok(())
    }

    fn direction(&self, j: usize) -> Vec<S> {
        let m = self.rows;
        let col = &self.cols[j];
        (0..m)
            .map(|r| {
                self.binv[r * m..(r + 1) * m]
                    .iter()
                    .zip(col)
                    .map(|(&b, &a)| b * a)
                    .sum()
            })
            .collect()
    }

    fn pivot(&mut self, leave_row: usize, enter: usize, w: &[S]) {
        let m = self.rows;
        let piv = w[leave_row];
        for j in 0..m {
            self.binv[leave_row * m + j] /= piv;
        }
        for (i, &f) in w.iter().enumerate() {
            if i == leave_row || f == S::zero() {
                continue;
            }
            for j in 0..m {
                let v = self.binv[leave_row * m + j];
                self.binv[i * m + j] -= f * v;
            }
        }
        self.is_basic[self.basis[leave_row]] = false;
        self.is_basic[enter] = true;
        self.basis[leave_row] = enter;
    }

    /// One simplex phase over the given cost vector.
    fn run(&mut self, costs: &[S], tol_pivot: S, iterations: &mut usize) -> Result<RunStatus> {
        let m = self.rows;
        if m == 0 {
            // No constraints: any negative reduced cost means an unbounded ray.
            let bad = (0..self.cols.len()).any(|j| !self.barred[j] && costs[j] < -tol_pivot);
            return Ok(if bad {
                RunStatus::Unbounded
            } else {
                RunStatus::Optimal
            });
        }
        let ncols = self.cols.len();
        let stall_window = 5 * (m + ncols);
        let iter_cap = 50_000 + 200 * (m + ncols);
        let mut bland = false;
        let mut stall = 0usize;
        let mut best_obj = S::infinity();
        let mut since_refresh = 0usize;

        loop {
            if *iterations > iter_cap {
                return Err(Error::SolverFailure("pivot limit exceeded".into()));
            }
            if since_refresh >= REFRESH_EVERY {
                self.refactorize(tol_pivot)?;
                since_refresh = 0;
            }
            let xb = self.x_basic();
            let obj: S = xb
                .iter()
                .zip(&self.basis)
                .map(|(&x, &b)| x * costs[b])
                .sum();
            if obj < best_obj - S::from_f64(1e-12) * (S::one() + best_obj.abs()) {
                best_obj = obj;
                stall = 0;
            } else {
                stall += 1;
                if stall > stall_window {
                    bland = true;
                }
            }

            // Pricing: y = c_B' * Binv, then reduced costs on nonbasic columns.
            let mut y = vec![S::zero(); m];
            for (r, &b) in self.basis.iter().enumerate() {
                let cb = costs[b];
                if cb == S::zero() {
                    continue;
                }
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += cb * self.binv[r * m + k];
                }
            }
            let mut enter: Option<(usize, S)> = None;
            for (j, &cost_j) in costs.iter().enumerate().take(ncols) {
                if self.is_basic[j] || self.barred[j] {
                    continue;
                }
                let d = cost_j
                    - y.iter()
                        .zip(&self.cols[j])
                        .map(|(&yk, &a)| yk * a)
                        .sum::<S>();
                if d < -tol_pivot {
                    if bland {
                        enter = Some((j, d));
                        break;
                    }
                    match enter {
                        Some((_, dbest)) if d >= dbest => {}
                        _ => enter = Some((j, d)),
                    }
                }
            }
            let Some((enter_col, _)) = enter else {
                return Ok(RunStatus::Optimal);
            };

            let w = self.direction(enter_col);
            let mut leave: Option<(usize, S)> = None;
            for r in 0..m {
                if w[r] > tol_pivot {
                    let ratio = xb[r].max(S::zero()) / w[r];
                    match leave {
                        None => leave = Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio || (ratio == lratio && self.basis[r] < self.basis[lr])
                            {
                                leave = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((leave_row, _)) = leave else {
                return Ok(RunStatus::Unbounded);
            };

            self.pivot(leave_row, enter_col, &w);
            *iterations += 1;
            since_refresh += 1;
        }
    }

    /// Degenerate pivots replacing basic artificials by original columns where
    /// possible; rows that admit none are redundant and keep their artificial
    /// (at zero level, barred from re-entering). Pivot candidates need a
    /// magnitude well above `tol_pivot`: the leaving artificial may sit at a
    /// level up to `tol_feas`, and dividing that by a near-tolerance pivot
    /// would inject visible infeasibility.
    fn drive_out_artificials(&mut self) {
        let m = self.rows;
        for r in 0..m {
            if self.basis[r] < self.art_start {
                continue;
            }
            let mut candidate = None;
            for j in 0..self.art_start {
                if self.is_basic[j] {
                    continue;
                }
                let wr: S = self.binv[r * m..(r + 1) * m]
                    .iter()
                    .zip(&self.cols[j])
                    .map(|(&b, &a)| b * a)
                    .sum();
                if wr.abs() > S::from_f64(1e-7) {
                    candidate = Some(j);
                    break;
                }
            }
            if let Some(j) = candidate {
                let w = self.direction(j);
                self.pivot(r, j, &w);
            }
        }
    }

    /// Fold the basic solution back onto the original variables.
    fn extract(&self, p: &LpProblem<S>) -> Vec<S> {
        let xb = self.x_basic();
        let mut xstd = vec![S::zero(); self.cols.len()];
        for (r, &b) in self.basis.iter().enumerate() {
            xstd[b] = xb[r].max(S::zero());
        }
        (0..p.num_vars)
            .map(|j| match self.var_map[j] {
                VarCols::Direct(k) => xstd[k],
                VarCols::Split { pos, neg } => xstd[pos] - xstd[neg],
            })
            .collect()
    }
}
