//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are stated as
//!
//! ```text
//! maximize    c·x
//! subject to  A_ub x <= b_ub
//!             A_eq x  = b_eq
//!             x_j >= l_j   (or x_j free when l_j is None)
//! ```
//!
//! Rows are scaled to unit max-norm before pivoting. Free variables are
//! split into a difference of two nonnegative columns. Besides the primal
//! solution the solver reports multipliers for the inequality rows, read
//! off the reduced costs of their slack columns.

use serde::Serialize;
use thiserror::Error;

pub const MAX_PIVOTS: usize = 1_000_000;
const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    /// Objective coefficients (maximized).
    pub objective: Vec<f64>,
    pub ineq: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub eq: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    /// Per-variable lower bound; `None` leaves the variable free.
    pub lower: Vec<Option<f64>>,
}

impl LinearProgram {
    /// An LP over `n` nonnegative variables with the given objective.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            lower: vec![Some(0.0); n],
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.ineq.push(row);
        self.ineq_rhs.push(rhs);
    }

    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) {
        self.add_le(row.into_iter().map(|a| -a).collect(), -rhs);
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.eq.push(row);
        self.eq_rhs.push(rhs);
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n {
            return Err(LpError::Malformed(format!(
                "{} lower bounds for {n} variables",
                self.lower.len()
            )));
        }
        if self.ineq.len() != self.ineq_rhs.len() || self.eq.len() != self.eq_rhs.len() {
            return Err(LpError::Malformed("row and rhs counts differ".into()));
        }
        for row in self.ineq.iter().chain(&self.eq) {
            if row.len() != n {
                return Err(LpError::Malformed(format!(
                    "row of length {} for {n} variables",
                    row.len()
                )));
            }
        }
        let finite = self
            .objective
            .iter()
            .chain(self.ineq.iter().flatten())
            .chain(&self.ineq_rhs)
            .chain(self.eq.iter().flatten())
            .chain(&self.eq_rhs)
            .chain(self.lower.iter().flatten())
            .all(|x| x.is_finite());
        if !finite {
            return Err(LpError::Malformed("non-finite coefficient".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl std::fmt::Display for LpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when `status` is optimal.
    pub x: Vec<f64>,
    pub value: f64,
    /// Nonnegative multipliers of the inequality rows at the optimum.
    pub ineq_duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("no convergence after {0} pivots")]
    PivotLimit(usize),
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced-cost row; the last entry holds minus the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Columns at or beyond this index may not enter the basis.
    barred_from: usize,
    pivots: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let piv = self.rows[pr][pc];
        for x in self.rows[pr].iter_mut() {
            *x /= piv;
        }
        let pivot_row = self.rows[pr].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == pr {
                continue;
            }
            let f = row[pc];
            if f != 0.0 {
                for j in 0..=w {
                    row[j] -= f * pivot_row[j];
                }
                row[pc] = 0.0;
                if row[w] < 0.0 && row[w] > -FEAS_TOL {
                    row[w] = 0.0;
                }
            }
        }
        let f = self.cost[pc];
        if f != 0.0 {
            for j in 0..=w {
                self.cost[j] -= f * pivot_row[j];
            }
            self.cost[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    fn set_costs(&mut self, c: &[f64]) {
        let w = self.width();
        self.cost = c.to_vec();
        self.cost.push(0.0);
        for (i, row) in self.rows.iter().enumerate() {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=w {
                    self.cost[j] -= cb * row[j];
                }
            }
        }
    }

    /// Runs Bland-rule pivots until optimal. Returns false if unbounded.
    fn optimize(&mut self, cost_tol: f64) -> Result<bool, LpError> {
        let w = self.width();
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::PivotLimit(self.pivots));
            }
            let Some(pc) = (0..self.barred_from.min(w)).find(|&j| self.cost[j] > cost_tol) else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[pc];
                if a > PIVOT_TOL {
                    let ratio = row[w] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((pr, _)) => self.pivot(pr, pc),
                None => return Ok(false),
            }
        }
    }
}

/// Solves `lp` to an optimal basic solution, or reports infeasibility or
/// unboundedness.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Column layout: structural columns (two per free variable), then one
    // slack or surplus per inequality row, then artificials.
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut n_struct = 0;
    for bound in &lp.lower {
        match bound {
            Some(_) => {
                col_of.push((n_struct, None));
                n_struct += 1;
            }
            None => {
                col_of.push((n_struct, Some(n_struct + 1)));
                n_struct += 2;
            }
        }
    }
    let shift = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; n_struct];
        let mut b = rhs;
        for (k, &a) in row.iter().enumerate() {
            let (pos, neg) = col_of[k];
            out[pos] += a;
            if let Some(neg) = neg {
                out[neg] -= a;
            }
            if let Some(l) = lp.lower[k] {
                b -= a * l;
            }
        }
        (out, b)
    };

    let m_ub = lp.ineq.len();
    let m = m_ub + lp.eq.len();
    let slack_start = n_struct;
    let art_start = slack_start + m_ub;

    struct Row {
        coeffs: Vec<f64>,
        rhs: f64,
        scale: f64,
        slack_sign: f64,
        needs_artificial: bool,
    }
    let mut prepared = Vec::with_capacity(m);
    for (row, &rhs) in lp.ineq.iter().zip(&lp.ineq_rhs) {
        let (mut coeffs, mut b) = shift(row, rhs);
        let norm = coeffs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        coeffs.iter_mut().for_each(|x| *x *= scale);
        b *= scale;
        if b >= 0.0 {
            prepared.push(Row {
                coeffs,
                rhs: b,
                scale,
                slack_sign: 1.0,
                needs_artificial: false,
            });
        } else {
            coeffs.iter_mut().for_each(|x| *x = -*x);
            prepared.push(Row {
                coeffs,
                rhs: -b,
                scale,
                slack_sign: -1.0,
                needs_artificial: true,
            });
        }
    }
    for (row, &rhs) in lp.eq.iter().zip(&lp.eq_rhs) {
        let (mut coeffs, mut b) = shift(row, rhs);
        let norm = coeffs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        coeffs.iter_mut().for_each(|x| *x *= scale);
        b *= scale;
        if b < 0.0 {
            coeffs.iter_mut().for_each(|x| *x = -*x);
            b = -b;
        }
        prepared.push(Row {
            coeffs,
            rhs: b,
            scale,
            slack_sign: 0.0,
            needs_artificial: true,
        });
    }

    let n_art = prepared.iter().filter(|r| r.needs_artificial).count();
    let width = art_start + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art_start;
    let mut max_rhs = 0.0f64;
    for (i, r) in prepared.iter().enumerate() {
        let mut full = vec![0.0; width + 1];
        full[..n_struct].copy_from_slice(&r.coeffs);
        if i < m_ub {
            full[slack_start + i] = r.slack_sign;
        }
        full[width] = r.rhs;
        max_rhs = max_rhs.max(r.rhs);
        if r.needs_artificial {
            full[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack_start + i);
        }
        rows.push(full);
    }

    let mut tab = Tableau {
        rows,
        cost: vec![0.0; width + 1],
        basis,
        barred_from: width,
        pivots: 0,
    };

    if n_art > 0 {
        let mut c1 = vec![0.0; width];
        c1[art_start..].iter_mut().for_each(|c| *c = -1.0);
        tab.set_costs(&c1);
        tab.optimize(COST_TOL)?;
        let infeasibility = tab.cost[width];
        if infeasibility > FEAS_TOL * (1.0 + max_rhs) {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                value: f64::NAN,
                ineq_duals: vec![0.0; m_ub],
                pivots: tab.pivots,
            });
        }
        // Drive zero-level artificials out of the basis where possible;
        // rows where that fails are redundant and stay inert.
        for i in 0..m {
            if tab.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| tab.rows[i][j].abs() > 1e-9) {
                    tab.pivot(i, j);
                }
            }
        }
        tab.barred_from = art_start;
    }

    let mut c2 = vec![0.0; width];
    for (k, &(pos, neg)) in col_of.iter().enumerate() {
        c2[pos] = lp.objective[k];
        if let Some(neg) = neg {
            c2[neg] = -lp.objective[k];
        }
    }
    tab.set_costs(&c2);
    let cmax = lp.objective.iter().fold(1.0f64, |a, c| a.max(c.abs()));
    if !tab.optimize(COST_TOL * cmax)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; n],
            value: f64::INFINITY,
            ineq_duals: vec![0.0; m_ub],
            pivots: tab.pivots,
        });
    }

    let mut cols = vec![0.0; width];
    for (i, &b) in tab.basis.iter().enumerate() {
        cols[b] = tab.rows[i][width];
    }
    let x: Vec<f64> = col_of
        .iter()
        .enumerate()
        .map(|(k, &(pos, neg))| {
            let base = lp.lower[k].unwrap_or(0.0);
            base + cols[pos] - neg.map_or(0.0, |c| cols[c])
        })
        .collect();
    let value = x.iter().zip(&lp.objective).map(|(a, c)| a * c).sum();
    let ineq_duals = (0..m_ub)
        .map(|i| (-tab.cost[slack_start + i] * prepared[i].scale).max(0.0))
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        value,
        ineq_duals,
        pivots: tab.pivots,
    })
}
