//! The standard LP relaxation of weighted MAX SAT and deterministic rounding.
//!
//! ```text
//! maximize   Σ_j w_j z_j
//! subject to Σ_{i∈P_j} y_i + Σ_{i∈N_j} (1 − y_i) ≥ z_j   for every clause j
//!            0 ≤ y_i ≤ 1,  0 ≤ z_j ≤ 1
//! ```
//!
//! [`solve_lp`] finds an optimal vertex with a dense-tableau primal simplex
//! over exact rationals using Bland's rule. Every right-hand side is
//! nonnegative, so the all-slack basis is feasible and no phase one is needed.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::bookkeep::StepQuantities;
use crate::formula::{Formula, Order};
use crate::greedy::{drive, Decision, RunResult};
use crate::rational::{half, int, Rational};
use crate::{Error, Weight, Wide};

/// Coverage constraint of one clause, `z_j − Σ_i coeff_i·y_i ≤ constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverRow {
    /// `(variable, ±1)`; variables occurring in both polarities cancel out.
    pub coeffs: Vec<(usize, i32)>,
    /// `|N_j|`.
    pub constant: usize,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    pub num_vars: usize,
    pub rows: Vec<CoverRow>,
}

impl LpModel {
    pub fn num_clauses(&self) -> usize {
        self.rows.len()
    }
}

/// An optimal solution of the relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    /// `y*_i` at index `i − 1`.
    pub y_star: Vec<Rational>,
    pub z: Vec<Rational>,
    /// `OPT_LP`.
    pub objective: Rational,
    pub pivots: usize,
}

pub fn build_relaxation(formula: &Formula) -> LpModel {
    let rows = formula
        .clauses()
        .iter()
        .map(|c| {
            let mut coeffs: Vec<(usize, i32)> = Vec::with_capacity(c.len());
            for &v in c.pos() {
                if c.neg().binary_search(&v).is_err() {
                    coeffs.push((v, 1));
                }
            }
            for &v in c.neg() {
                if c.pos().binary_search(&v).is_err() {
                    coeffs.push((v, -1));
                }
            }
            coeffs.sort_unstable();
            CoverRow {
                coeffs,
                constant: c.neg().len(),
                weight: c.weight(),
            }
        })
        .collect();
    LpModel {
        num_vars: formula.num_vars(),
        rows,
    }
}

struct Tableau {
    /// Constraint rows; the last column is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is the objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for x in self.rows[pr].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let support: Vec<usize> = (0..self.rows[pr].len())
            .filter(|&k| !self.rows[pr][k].is_zero())
            .collect();
        let pivot_row = core::mem::take(&mut self.rows[pr]);
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[pc].clone();
            if factor.is_zero() {
                return;
            }
            for &k in &support {
                row[k] -= &factor * &pivot_row[k];
            }
        };
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r != pr {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[pr] = pivot_row;
        self.basis[pr] = pc;
    }
}

/// Solves the relaxation exactly. Deterministic: the same model always
/// yields the same vertex.
pub fn solve_lp(model: &LpModel) -> LpSolution {
    let n = model.num_vars;
    let m = model.rows.len();
    let structural = n + m;
    let num_rows = m + n + m;
    let width = structural + num_rows + 1;
    let rhs = width - 1;

    let mut rows = Vec::with_capacity(num_rows);
    let push_row = |entries: &[(usize, Wide)], b: Wide, rows: &mut Vec<Vec<Rational>>| {
        let mut row = alloc::vec![Rational::zero(); width];
        for &(k, a) in entries {
            row[k] = int(a);
        }
        row[structural + rows.len()] = Rational::one();
        row[rhs] = int(b);
        rows.push(row);
    };
    for (j, r) in model.rows.iter().enumerate() {
        let mut entries: Vec<(usize, Wide)> = r
            .coeffs
            .iter()
            .map(|&(v, a)| (v - 1, -Wide::from(a)))
            .collect();
        entries.push((n + j, 1));
        push_row(&entries, r.constant as Wide, &mut rows);
    }
    for i in 0..n {
        push_row(&[(i, 1)], 1, &mut rows);
    }
    for j in 0..m {
        push_row(&[(n + j, 1)], 1, &mut rows);
    }

    let mut cost = alloc::vec![Rational::zero(); width];
    for (j, r) in model.rows.iter().enumerate() {
        cost[n + j] = -int(Wide::from(r.weight));
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (structural..structural + num_rows).collect(),
    };

    let mut pivots = 0;
    // Bland's rule: lowest-index improving column, ratio ties broken by the
    // lowest-index leaving variable.
    while let Some(pc) = (0..rhs).find(|&k| t.cost[k].is_negative()) {
        let mut best: Option<(usize, Rational)> = None;
        for (r, row) in t.rows.iter().enumerate() {
            if !row[pc].is_positive() {
                continue;
            }
            let q = &row[rhs] / &row[pc];
            let better = match &best {
                None => true,
                Some((br, bq)) => q < *bq || (q == *bq && t.basis[r] < t.basis[*br]),
            };
            if better {
                best = Some((r, q));
            }
        }
        let (pr, _) = best.expect("the relaxation is bounded");
        t.pivot(pr, pc);
        pivots += 1;
    }

    let mut values = alloc::vec![Rational::zero(); structural];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < structural {
            values[b] = t.rows[r][rhs].clone();
        }
    }
    let z = values.split_off(n);
    LpSolution {
        y_star: values,
        z,
        objective: t.cost[rhs].clone(),
        pivots,
    }
}

/// Best objective for a fixed `y`: `Σ_j w_j · min(1, Σ_{P_j} y_i + Σ_{N_j} (1 − y_i))`.
///
/// `y[i − 1]` is the value for `x_i`.
pub fn lp_value(formula: &Formula, y: &[Rational]) -> Result<Rational, Error> {
    if y.len() != formula.num_vars() {
        return Err(Error::LpMismatch("y has the wrong length"));
    }
    if let Some(index) = y
        .iter()
        .position(|v| v.is_negative() || *v > Rational::one())
    {
        return Err(Error::LpValueOutOfRange { index: index + 1 });
    }
    let one = Rational::one();
    let mut total = Rational::zero();
    for c in formula.clauses() {
        if c.weight() == 0 {
            continue;
        }
        let mut cover = Rational::zero();
        for &v in c.pos() {
            cover += &y[v - 1];
        }
        for &v in c.neg() {
            cover += &one - &y[v - 1];
        }
        total += int(Wide::from(c.weight())) * cover.min(one.clone());
    }
    Ok(total)
}

/// One step of the rounding walk, with every LP value it compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingStep {
    pub quantities: StepQuantities,
    pub y_star: Rational,
    /// `LP_{i−1}`, `LP_{i,t}`, `LP_{i,f}`.
    pub lp_prev: Rational,
    pub lp_true: Rational,
    pub lp_false: Rational,
    pub value: bool,
}

impl RoundingStep {
    /// `t_i`.
    pub fn t(&self) -> Rational {
        half(self.quantities.t2)
    }

    /// `f_i`.
    pub fn f(&self) -> Rational {
        half(self.quantities.f2)
    }

    /// `LP_{i−1} − LP_{i,t} ≤ t_i`.
    pub fn true_test(&self) -> bool {
        &self.lp_prev - &self.lp_true <= self.t()
    }

    /// `LP_{i−1} − LP_{i,f} ≤ f_i`.
    pub fn false_test(&self) -> bool {
        &self.lp_prev - &self.lp_false <= self.f()
    }

    /// `LP_i` for the chosen value.
    pub fn lp_next(&self) -> &Rational {
        if self.value {
            &self.lp_true
        } else {
            &self.lp_false
        }
    }

    /// `B_i − B_{i−1}` for the chosen value.
    pub fn bound_delta(&self) -> Rational {
        if self.value {
            self.t()
        } else {
            self.f()
        }
    }

    /// `LP_{i−1} − LP_i ≤ B_i − B_{i−1}`.
    pub fn step_bound_holds(&self) -> bool {
        &self.lp_prev - self.lp_next() <= self.bound_delta()
    }
}

/// Runs the rounding walk and returns the result with its per-step record.
pub fn rounding_trace(
    formula: &Formula,
    order: Order,
    sol: &LpSolution,
) -> Result<(RunResult, Vec<RoundingStep>), Error> {
    let lp_star = lp_value(formula, &sol.y_star)?;
    if lp_star != sol.objective {
        return Err(Error::LpMismatch("objective differs from the value of y*"));
    }
    let mut y_hat = sol.y_star.clone();
    let mut steps = Vec::with_capacity(formula.num_vars());
    let run = drive(formula, order, None, |_| {}, |q, _| {
        let i = q.var - 1;
        let lp_prev = lp_value(formula, &y_hat)?;
        let y_star = core::mem::replace(&mut y_hat[i], Rational::one());
        let lp_true = lp_value(formula, &y_hat)?;
        y_hat[i] = Rational::zero();
        let lp_false = lp_value(formula, &y_hat)?;
        let mut step = RoundingStep {
            quantities: q.clone(),
            y_star,
            lp_prev,
            lp_true,
            lp_false,
            value: true,
        };
        step.value = if step.true_test() {
            true
        } else if step.false_test() {
            false
        } else {
            return Err(Error::RoundingDisjunction { var: q.var });
        };
        if !step.step_bound_holds() {
            return Err(Error::RoundingStepBound { var: q.var });
        }
        y_hat[i] = if step.value { Rational::one() } else { Rational::zero() };
        steps.push(step);
        Ok(Decision::fixed(y_hat[i].is_one()))
    })?;
    Ok((run, steps))
}

/// Deterministic rounding of an optimal LP solution: set `x_i` true when
/// `LP_{i−1} − LP_{i,t} ≤ t_i`, otherwise false (then
/// `LP_{i−1} − LP_{i,f} ≤ f_i` must hold and is checked).
pub fn run_lp_rounding(formula: &Formula, order: Order, sol: &LpSolution) -> Result<RunResult, Error> {
    rounding_trace(formula, order, sol).map(|(run, _)| run)
}
