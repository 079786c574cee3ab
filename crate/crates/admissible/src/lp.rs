//! Exact linear programming over rationals: a dense two-phase simplex with
//! Bland's rule, so degenerate tableaus terminate. Optimal points are checked
//! against every original constraint before being returned.

use crate::ratio::Rat;
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rat>,
    pub sense: Sense,
    /// Finite per-variable lower bounds, zero unless changed.
    pub lower_bounds: Vec<Rat>,
    pub upper_bounds: Vec<Option<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        Self {
            num_vars,
            constraints: Vec::new(),
            objective: vec![Rat::zero(); num_vars],
            sense,
            lower_bounds: vec![Rat::zero(); num_vars],
            upper_bounds: vec![None; num_vars],
        }
    }

    pub fn set_objective(&mut self, coeffs: Vec<Rat>) {
        self.objective = coeffs;
    }

    pub fn add(&mut self, coeffs: Vec<Rat>, relation: Relation, rhs: Rat) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_lower_bound(&mut self, var: usize, bound: Rat) {
        self.lower_bounds[var] = bound;
    }

    pub fn set_upper_bound(&mut self, var: usize, bound: Rat) {
        self.upper_bounds[var] = Some(bound);
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.num_vars == 0 {
            return Err(LpError::Dimension("no variables".into()));
        }
        for (what, len) in [
            ("objective", self.objective.len()),
            ("lower bounds", self.lower_bounds.len()),
            ("upper bounds", self.upper_bounds.len()),
        ] {
            if len != self.num_vars {
                return Err(LpError::Dimension(format!(
                    "{what} has {len} entries for {} variables",
                    self.num_vars
                )));
            }
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(LpError::Dimension(format!(
                    "constraint {k} has {} coefficients for {} variables",
                    c.coeffs.len(),
                    self.num_vars
                )));
            }
        }
        Ok(())
    }

    fn satisfied_by(&self, point: &[Rat]) -> bool {
        for (x, lb) in point.iter().zip(&self.lower_bounds) {
            if x < lb {
                return false;
            }
        }
        for (x, ub) in point.iter().zip(&self.upper_bounds) {
            if let Some(ub) = ub {
                if x > ub {
                    return false;
                }
            }
        }
        self.constraints.iter().all(|c| {
            let lhs: Rat = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, prow: usize, pcol: usize) {
        let factor = self.rows[prow][pcol].clone();
        debug_assert!(!factor.is_zero());
        for v in self.rows[prow].iter_mut() {
            *v /= &factor;
        }
        self.rhs[prow] /= &factor;
        let pivot_row = self.rows[prow].clone();
        let pivot_rhs = self.rhs[prow].clone();
        for r in 0..self.rows.len() {
            if r == prow || self.rows[r][pcol].is_zero() {
                continue;
            }
            let mult = self.rows[r][pcol].clone();
            for (v, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                *v -= &mult * p;
            }
            self.rhs[r] -= &mult * &pivot_rhs;
        }
        self.basis[prow] = pcol;
    }

    /// Maximizes `costs` with Bland's rule: the entering column is the lowest
    /// index with positive reduced cost, the leaving row breaks ratio ties by
    /// lowest basic variable index. Returns false on unboundedness.
    fn run(&mut self, costs: &[Rat]) -> bool {
        loop {
            let duals: Vec<&Rat> = self.basis.iter().map(|&b| &costs[b]).collect();
            let mut entering = None;
            for j in 0..self.ncols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = costs[j].clone();
                for (r, dual) in duals.iter().enumerate() {
                    if !dual.is_zero() && !self.rows[r][j].is_zero() {
                        reduced -= *dual * &self.rows[r][j];
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(pcol) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][pcol].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][pcol];
                let better = match &leaving {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((prow, _)) = leaving else {
                return false;
            };
            self.pivot(prow, pcol);
        }
    }

    fn objective_value(&self, costs: &[Rat]) -> Rat {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, v)| &costs[b] * v)
            .sum()
    }
}

/// Solves the program exactly. `Optimal` points satisfy every constraint and
/// bound exactly and attain the reported objective value.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let n = lp.num_vars;

    // Shift to y = x - lb >= 0; upper bounds become rows.
    let mut rows: Vec<(Vec<Rat>, Relation, Rat)> = Vec::new();
    for c in &lp.constraints {
        let shift: Rat = c.coeffs.iter().zip(&lp.lower_bounds).map(|(a, l)| a * l).sum();
        rows.push((c.coeffs.clone(), c.relation, &c.rhs - shift));
    }
    for (j, ub) in lp.upper_bounds.iter().enumerate() {
        if let Some(ub) = ub {
            let mut coeffs = vec![Rat::zero(); n];
            coeffs[j] = Rat::one();
            rows.push((coeffs, Relation::Le, ub - &lp.lower_bounds[j]));
        }
    }

    // Normalize to nonnegative right-hand sides.
    for (coeffs, relation, rhs) in rows.iter_mut() {
        if rhs.is_negative() {
            for v in coeffs.iter_mut() {
                *v = -v.clone();
            }
            *rhs = -rhs.clone();
            *relation = match relation {
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
                Relation::Ge => Relation::Le,
            };
        }
    }

    let m = rows.len();
    let num_slack = rows
        .iter()
        .filter(|(_, rel, _)| !matches!(rel, Relation::Eq))
        .count();
    let num_artificial = rows
        .iter()
        .filter(|(_, rel, _)| !matches!(rel, Relation::Le))
        .count();
    let ncols = n + num_slack + num_artificial;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        ncols,
    };
    let mut next_slack = n;
    let mut next_artificial = n + num_slack;
    for (coeffs, relation, rhs) in rows {
        let mut row = vec![Rat::zero(); ncols];
        row[..n].clone_from_slice(&coeffs);
        let basic = match relation {
            Relation::Le => {
                row[next_slack] = Rat::one();
                next_slack += 1;
                next_slack - 1
            }
            Relation::Ge => {
                row[next_slack] = -Rat::one();
                next_slack += 1;
                row[next_artificial] = Rat::one();
                next_artificial += 1;
                next_artificial - 1
            }
            Relation::Eq => {
                row[next_artificial] = Rat::one();
                next_artificial += 1;
                next_artificial - 1
            }
        };
        tab.rows.push(row);
        tab.rhs.push(rhs);
        tab.basis.push(basic);
    }

    // Phase 1: drive the artificial variables to zero.
    if num_artificial > 0 {
        let mut phase1 = vec![Rat::zero(); ncols];
        for c in phase1.iter_mut().skip(n + num_slack) {
            *c = -Rat::one();
        }
        let bounded = tab.run(&phase1);
        debug_assert!(bounded, "phase 1 objective is bounded by construction");
        if !tab.objective_value(&phase1).is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot lingering zero-valued artificials out; a row with no other
        // nonzero entry is redundant and gets dropped.
        let mut drop_rows = Vec::new();
        for r in 0..tab.rows.len() {
            if tab.basis[r] < n + num_slack {
                continue;
            }
            debug_assert!(tab.rhs[r].is_zero());
            match (0..n + num_slack).find(|&j| !tab.rows[r][j].is_zero()) {
                Some(j) => tab.pivot(r, j),
                None => drop_rows.push(r),
            }
        }
        for &r in drop_rows.iter().rev() {
            tab.rows.remove(r);
            tab.rhs.remove(r);
            tab.basis.remove(r);
        }
        for row in tab.rows.iter_mut() {
            row.truncate(n + num_slack);
        }
        tab.ncols = n + num_slack;
    }

    // Phase 2 maximizes internally; a minimization flips the objective.
    let mut phase2 = vec![Rat::zero(); tab.ncols];
    for j in 0..n {
        phase2[j] = match lp.sense {
            Sense::Maximize => lp.objective[j].clone(),
            Sense::Minimize => -lp.objective[j].clone(),
        };
    }
    if !tab.run(&phase2) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut point = lp.lower_bounds.clone();
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            point[b] += &tab.rhs[r];
        }
    }
    let value: Rat = lp.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    assert!(
        lp.satisfied_by(&point),
        "simplex returned a point violating its own constraints"
    );
    Ok(LpOutcome::Optimal { value, point })
}
