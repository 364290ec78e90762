//! Dense two-phase primal simplex.
//!
//! Problems are stated as `maximize c^T x` over rows `a^T x (<=|=|>=) b` and
//! per-variable bounds `lo <= x <= hi` (`hi` may be infinite). Internally
//! every variable is shifted to `x - lo >= 0`, finite upper bounds become
//! extra rows, rows are sign-normalised to a non-negative right-hand side and
//! receive a slack or an artificial column. Phase one minimises the sum of
//! artificials; phase two optimises the real objective with artificials
//! barred from re-entering.
//!
//! Pivoting uses Dantzig's rule and falls back to Bland's rule after a run
//! of degenerate pivots, which rules out cycling.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("simplex returned a point violating constraints by {0:e}")]
    Numerical(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Maximised.
    pub objective: Vec<f64>,
    pub rows: Vec<Constraint>,
    /// `(lower, upper)` per variable; `upper` may be `f64::INFINITY`.
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A problem over `objective.len()` non-negative variables.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { objective, rows: Vec::new(), bounds: vec![(0.0, f64::INFINITY); n] }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.rows.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    pub fn check(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("non-finite objective coefficient".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if row.coeffs.iter().any(|a| !a.is_finite()) || !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {i} has a non-finite entry")));
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() || hi.is_nan() || lo > hi {
                return Err(LpError::Malformed(format!("bounds of variable {j} are [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let gap = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        for (&v, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Primal solution; empty unless optimal.
    pub solution: Vec<f64>,
    /// `c^T x` when optimal, `-inf` when infeasible, `+inf` when unbounded.
    pub objective: f64,
    /// One multiplier per user row (not per bound); empty unless optimal.
    /// Signs follow the maximisation convention: `<=` rows have `y >= 0`,
    /// `>=` rows have `y <= 0`.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub pivot_tol: f64,
    pub max_pivots: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_run: usize,
    /// Allowed constraint violation of the returned point.
    pub feasibility_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { pivot_tol: 1e-9, max_pivots: 1_000_000, degenerate_run: 50, feasibility_tol: 1e-7 }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    solve_lp_with(lp, &SimplexOptions::default())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    reduced: Vec<f64>,
    value: f64,
    pivots: usize,
    opts: SimplexOptions,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.kinds.len();
        let inv = 1.0 / self.rows[r][c];
        for a in self.rows[r].iter_mut() {
            *a *= inv;
        }
        self.rhs[r] *= inv;
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.rows[i];
            for j in 0..width {
                row[j] -= factor * pivot_row[j];
            }
            row[c] = 0.0;
            self.rhs[i] -= factor * pivot_rhs;
            if self.rhs[i] < 0.0 && self.rhs[i] > -1e-11 {
                self.rhs[i] = 0.0;
            }
        }
        let d = self.reduced[c];
        if d != 0.0 {
            for j in 0..width {
                self.reduced[j] -= d * pivot_row[j];
            }
            self.reduced[c] = 0.0;
            self.value += d * pivot_rhs;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn run(&mut self, allow_artificial: bool) -> Result<Step, LpError> {
        let tol = self.opts.pivot_tol;
        let mut degenerate = 0usize;
        loop {
            if self.pivots >= self.opts.max_pivots {
                return Err(LpError::IterationLimit(self.opts.max_pivots));
            }
            let bland = degenerate >= self.opts.degenerate_run;
            let eligible = |j: usize| allow_artificial || self.kinds[j] != ColumnKind::Artificial;
            let mut entering = None;
            let mut best = tol;
            for j in 0..self.kinds.len() {
                if !eligible(j) || self.reduced[j] <= tol {
                    continue;
                }
                if bland {
                    entering = Some(j);
                    break;
                }
                if self.reduced[j] > best {
                    best = self.reduced[j];
                    entering = Some(j);
                }
            }
            let Some(c) = entering else {
                return Ok(Step::Optimal);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a <= tol {
                    continue;
                }
                let ratio = self.rhs[i].max(0.0) / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((r, best_ratio)) => {
                        if ratio < best_ratio - 1e-12
                            || (ratio <= best_ratio + 1e-12 && self.basis[i] < self.basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best_ratio))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leaving else {
                return Ok(Step::Unbounded);
            };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }

    fn reset_objective(&mut self, costs: &[f64]) {
        self.reduced = costs.to_vec();
        self.value = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb == 0.0 {
                continue;
            }
            for (d, a) in self.reduced.iter_mut().zip(&self.rows[i]) {
                *d -= cb * a;
            }
            self.value += cb * self.rhs[i];
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpOutcome, LpError> {
    lp.check()?;
    let n = lp.n_vars();
    let lower: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();

    // (coeffs over shifted variables, relation, rhs, sign applied, user row index)
    let mut rows: Vec<(Vec<f64>, Relation, f64, f64, Option<usize>)> = Vec::new();
    for (i, row) in lp.rows.iter().enumerate() {
        let shift: f64 = row.coeffs.iter().zip(&lower).map(|(a, l)| a * l).sum();
        rows.push((row.coeffs.clone(), row.relation, row.rhs - shift, 1.0, Some(i)));
    }
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        if hi.is_finite() {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            rows.push((coeffs, Relation::Le, hi - lo, 1.0, None));
        }
    }
    for row in rows.iter_mut() {
        if row.2 < 0.0 {
            for a in row.0.iter_mut() {
                *a = -*a;
            }
            row.2 = -row.2;
            row.3 = -1.0;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let mut kinds = vec![ColumnKind::Structural; n];
    // Column holding e_i for each row; its reduced cost yields the dual.
    let mut unit_col = vec![0usize; m];
    let mut extra: Vec<(usize, f64, ColumnKind)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        match row.1 {
            Relation::Le => {
                unit_col[i] = n + extra.len();
                extra.push((i, 1.0, ColumnKind::Slack));
            }
            Relation::Ge => {
                extra.push((i, -1.0, ColumnKind::Slack));
                unit_col[i] = n + extra.len();
                extra.push((i, 1.0, ColumnKind::Artificial));
            }
            Relation::Eq => {
                unit_col[i] = n + extra.len();
                extra.push((i, 1.0, ColumnKind::Artificial));
            }
        }
    }
    kinds.extend(extra.iter().map(|e| e.2));
    let width = kinds.len();
    let mut table = vec![vec![0.0; width]; m];
    for (i, row) in rows.iter().enumerate() {
        table[i][..n].copy_from_slice(&row.0);
    }
    for (k, &(i, coeff, _)) in extra.iter().enumerate() {
        table[i][n + k] = coeff;
    }
    let mut tab = Tableau {
        rows: table,
        rhs: rows.iter().map(|r| r.2).collect(),
        basis: unit_col.clone(),
        kinds,
        reduced: Vec::new(),
        value: 0.0,
        pivots: 0,
        opts: *opts,
    };

    let has_artificial = tab.kinds.contains(&ColumnKind::Artificial);
    if has_artificial {
        let costs: Vec<f64> = tab
            .kinds
            .iter()
            .map(|k| if *k == ColumnKind::Artificial { -1.0 } else { 0.0 })
            .collect();
        tab.reset_objective(&costs);
        tab.run(true)?;
        let scale = 1.0 + tab.rhs.iter().fold(0.0f64, |acc, b| acc.max(b.abs()));
        if tab.value < -opts.feasibility_tol * scale {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                solution: Vec::new(),
                objective: f64::NEG_INFINITY,
                duals: Vec::new(),
                pivots: tab.pivots,
            });
        }
        for r in 0..m {
            if tab.kinds[tab.basis[r]] != ColumnKind::Artificial {
                continue;
            }
            let replacement = (0..width)
                .filter(|&j| tab.kinds[j] != ColumnKind::Artificial)
                .max_by(|&a, &b| tab.rows[r][a].abs().total_cmp(&tab.rows[r][b].abs()))
                .filter(|&j| tab.rows[r][j].abs() > opts.pivot_tol);
            if let Some(j) = replacement {
                tab.pivot(r, j);
            }
        }
    }

    let mut costs = vec![0.0; width];
    costs[..n].copy_from_slice(&lp.objective);
    tab.reset_objective(&costs);
    if let Step::Unbounded = tab.run(false)? {
        return Ok(LpOutcome {
            status: LpStatus::Unbounded,
            solution: Vec::new(),
            objective: f64::INFINITY,
            duals: Vec::new(),
            pivots: tab.pivots,
        });
    }

    let mut solution = lower.clone();
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            solution[b] += tab.rhs[i];
        }
    }
    let violation = lp.max_violation(&solution);
    let scale = 1.0
        + lp.rows.iter().fold(0.0f64, |acc, r| acc.max(r.rhs.abs()))
        + lp.bounds.iter().fold(0.0f64, |acc, b| acc.max(b.0.abs()).max(if b.1.is_finite() { b.1.abs() } else { 0.0 }));
    if violation > opts.feasibility_tol * scale {
        return Err(LpError::Numerical(violation));
    }
    let mut duals = vec![0.0; lp.rows.len()];
    for (i, row) in rows.iter().enumerate() {
        if let Some(user) = row.4 {
            duals[user] = -row.3 * tab.reduced[unit_col[i]];
        }
    }
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        objective: lp.objective_at(&solution),
        solution,
        duals,
        pivots: tab.pivots,
    })
}
