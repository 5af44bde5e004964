//! Incremental bookkeeping of a partial assignment.
//!
//! A [`TraceState`] assigns variables one at a time in a fixed [`Order`] and
//! tracks `SAT_i` (weight of clauses satisfied by the prefix), `UNSAT_i`
//! (weight of clauses whose variables are all assigned without satisfying
//! them) and the doubled bound `2·B_i = SAT_i + (W − UNSAT_i)`.
//!
//! Every clause carries a satisfied flag and the number of its distinct
//! variables that are still unassigned, so both [`TraceState::step_quantities`]
//! and [`TraceState::apply`] only touch the clauses that mention the next
//! variable. [`reference_step_quantities`] recomputes the same numbers by a
//! full rescan and is kept for cross-checking.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::formula::{Assignment, Clause, Formula, Order};
use crate::rational::{ratio, Rational};
use crate::{Error, Wide};

/// Decision data for the next variable, all exact integers.
///
/// `t2` and `f2` are the doubled bound changes `2·t_i` and `2·f_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepQuantities {
    pub var: usize,
    pub t2: Wide,
    pub f2: Wide,
    /// `SAT_{i−1}` and `UNSAT_{i−1}`.
    pub sat_prev: Wide,
    pub unsat_prev: Wide,
    /// `SAT_{i,t}`, `SAT_{i,f}`, `UNSAT_{i,t}`, `UNSAT_{i,f}`.
    pub sat_t: Wide,
    pub sat_f: Wide,
    pub unsat_t: Wide,
    pub unsat_f: Wide,
    pub vz: VzQuantities,
}

impl StepQuantities {
    /// `t2 + f2 = 2(t_i + f_i)`, never negative for consistent bookkeeping.
    pub fn sum2(&self) -> Wide {
        self.t2 + self.f2
    }

    /// Both bound changes strictly positive, i.e. the rule flips a coin.
    pub fn is_randomized(&self) -> bool {
        self.t2 > 0 && self.f2 > 0
    }

    /// `t_i / (t_i + f_i)`; `None` when `t_i + f_i = 0`.
    pub fn prob_true(&self) -> Option<Rational> {
        (self.sum2() != 0).then(|| ratio(self.t2, self.sum2()))
    }

    pub fn vz_quantities(&self) -> &VzQuantities {
        &self.vz
    }
}

/// The weights Van Zuylen's rule is stated in, restricted to clauses that
/// mention the next variable and are not yet satisfied.
///
/// * `w`: satisfied by `true`, unsatisfied by `false`.
/// * `w_bar`: satisfied by `false`, unsatisfied by `true`.
/// * `f`: satisfied by `true`, still open after `false`.
/// * `f_bar`: satisfied by `false`, still open after `true`.
///
/// A clause with the variable in both polarities is satisfied by either
/// value; it is counted in both `f` and `f_bar`, which keeps
/// `w + f − w_bar = 2t_i` and `f + f_bar = 2(t_i + f_i)` exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VzQuantities {
    pub w: Wide,
    pub w_bar: Wide,
    pub f: Wide,
    pub f_bar: Wide,
}

/// Van Zuylen's `α = (W_i + F_i − W̄_i) / (F_i + F̄_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Alpha {
    Value(Rational),
    /// `F_i + F̄_i = 0`; carries the numerator, whose sign decides the value.
    ZeroDenominator { numerator: Wide },
}

impl VzQuantities {
    pub fn numerator(&self) -> Wide {
        self.w + self.f - self.w_bar
    }

    pub fn denominator(&self) -> Wide {
        self.f + self.f_bar
    }

    pub fn alpha(&self) -> Alpha {
        match self.denominator() {
            0 => Alpha::ZeroDenominator {
                numerator: self.numerator(),
            },
            d => Alpha::Value(ratio(self.numerator(), d)),
        }
    }
}

/// How setting a variable affects one clause that is not yet satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Effect {
    Satisfies,
    Unsatisfies,
    Open,
}

#[derive(Debug, Default)]
struct Deltas {
    sat_t: Wide,
    sat_f: Wide,
    unsat_t: Wide,
    unsat_f: Wide,
    vz: VzQuantities,
}

impl Deltas {
    fn add(&mut self, weight: Wide, on_true: Effect, on_false: Effect) {
        use Effect::*;
        match on_true {
            Satisfies => self.sat_t += weight,
            Unsatisfies => self.unsat_t += weight,
            Open => {}
        }
        match on_false {
            Satisfies => self.sat_f += weight,
            Unsatisfies => self.unsat_f += weight,
            Open => {}
        }
        match (on_true, on_false) {
            (Satisfies, Unsatisfies) => self.vz.w += weight,
            (Unsatisfies, Satisfies) => self.vz.w_bar += weight,
            (Satisfies, Open) => self.vz.f += weight,
            (Open, Satisfies) => self.vz.f_bar += weight,
            (Satisfies, Satisfies) => {
                self.vz.f += weight;
                self.vz.f_bar += weight;
            }
            _ => {}
        }
    }

    fn finish(self, var: usize, sat_prev: Wide, unsat_prev: Wide) -> StepQuantities {
        StepQuantities {
            var,
            t2: self.sat_t - self.unsat_t,
            f2: self.sat_f - self.unsat_f,
            sat_prev,
            unsat_prev,
            sat_t: sat_prev + self.sat_t,
            sat_f: sat_prev + self.sat_f,
            unsat_t: unsat_prev + self.unsat_t,
            unsat_f: unsat_prev + self.unsat_f,
            vz: self.vz,
        }
    }
}

/// A partial assignment of the first `prefix` variables of an order.
#[derive(Debug, Clone)]
pub struct TraceState<'f> {
    formula: &'f Formula,
    order: Order,
    prefix: usize,
    values: Vec<Option<bool>>,
    sat_weight: Wide,
    unsat_weight: Wide,
    satisfied: Vec<bool>,
    unassigned: Vec<u32>,
    // Shared between clones; only the per-clause state is copied.
    occ: Arc<Occurrences>,
}

#[derive(Debug)]
struct Occurrences {
    pos: Vec<Vec<usize>>,
    neg: Vec<Vec<usize>>,
}

impl Occurrences {
    /// Distinct clauses mentioning `var`, with its polarity in each.
    fn of<'a>(
        &'a self,
        clauses: &'a [Clause],
        var: usize,
    ) -> impl Iterator<Item = (usize, bool, bool)> + 'a {
        let pos = self.pos[var].iter().map(move |&j| {
            let in_neg = clauses[j].neg().binary_search(&var).is_ok();
            (j, true, in_neg)
        });
        let neg = self.neg[var]
            .iter()
            .filter(move |&&j| clauses[j].pos().binary_search(&var).is_err())
            .map(|&j| (j, false, true));
        pos.chain(neg)
    }
}

impl<'f> TraceState<'f> {
    pub fn new(formula: &'f Formula, order: Order) -> Result<Self, Error> {
        let n = formula.num_vars();
        if order.len() != n {
            return Err(Error::NotAPermutation(n));
        }
        let mut pos_occ = alloc::vec![Vec::new(); n + 1];
        let mut neg_occ = alloc::vec![Vec::new(); n + 1];
        let mut unassigned = Vec::with_capacity(formula.num_clauses());
        for (j, c) in formula.clauses().iter().enumerate() {
            for &v in c.pos() {
                pos_occ[v].push(j);
            }
            for &v in c.neg() {
                neg_occ[v].push(j);
            }
            let both = c.pos().iter().filter(|v| c.neg().binary_search(v).is_ok()).count();
            unassigned.push((c.len() - both) as u32);
        }
        Ok(TraceState {
            formula,
            order,
            prefix: 0,
            values: alloc::vec![None; n + 1],
            sat_weight: 0,
            unsat_weight: 0,
            satisfied: alloc::vec![false; formula.num_clauses()],
            unassigned,
            occ: Arc::new(Occurrences {
                pos: pos_occ,
                neg: neg_occ,
            }),
        })
    }

    pub fn with_identity_order(formula: &'f Formula) -> Self {
        Self::new(formula, Order::identity(formula.num_vars())).expect("identity is a permutation")
    }

    pub fn formula(&self) -> &'f Formula {
        self.formula
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn prefix(&self) -> usize {
        self.prefix
    }

    pub fn is_complete(&self) -> bool {
        self.prefix == self.order.len()
    }

    /// The variable assigned by the next call to [`apply`](Self::apply).
    pub fn next_var(&self) -> Option<usize> {
        self.order.as_slice().get(self.prefix).copied()
    }

    pub fn value(&self, var: usize) -> Option<bool> {
        self.values[var]
    }

    /// `SAT_i`.
    pub fn sat_weight(&self) -> Wide {
        self.sat_weight
    }

    /// `UNSAT_i`.
    pub fn unsat_weight(&self) -> Wide {
        self.unsat_weight
    }

    /// `2·B_i`.
    pub fn bound2(&self) -> Wide {
        self.sat_weight + self.formula.total_weight() - self.unsat_weight
    }

    /// The partial assignment as an array indexed by variable (index 0 unused).
    pub fn partial(&self) -> &[Option<bool>] {
        &self.values
    }

    /// The full assignment once every variable is set.
    pub fn assignment(&self) -> Option<Assignment> {
        self.is_complete().then(|| {
            Assignment::new(self.values[1..].iter().map(|v| v.unwrap_or(false)).collect())
        })
    }

    pub fn step_quantities(&self) -> Result<StepQuantities, Error> {
        let var = self.next_var().ok_or(Error::TraceComplete)?;
        let clauses = self.formula.clauses();
        let mut d = Deltas::default();
        for (j, in_pos, in_neg) in self.occ.of(clauses, var) {
            if self.satisfied[j] {
                continue;
            }
            let last = self.unassigned[j] == 1;
            let effect = |satisfies: bool| match (satisfies, last) {
                (true, _) => Effect::Satisfies,
                (false, true) => Effect::Unsatisfies,
                (false, false) => Effect::Open,
            };
            d.add(Wide::from(clauses[j].weight()), effect(in_pos), effect(in_neg));
        }
        Ok(d.finish(var, self.sat_weight, self.unsat_weight))
    }

    /// Assigns the next variable in order.
    pub fn apply(&mut self, value: bool) -> Result<(), Error> {
        let var = self.next_var().ok_or(Error::TraceComplete)?;
        let clauses = self.formula.clauses();
        let occ = Arc::clone(&self.occ);
        for (j, in_pos, in_neg) in occ.of(clauses, var) {
            if self.satisfied[j] {
                continue;
            }
            let weight = Wide::from(clauses[j].weight());
            if (value && in_pos) || (!value && in_neg) {
                self.satisfied[j] = true;
                self.sat_weight += weight;
            } else {
                self.unassigned[j] -= 1;
                if self.unassigned[j] == 0 {
                    self.unsat_weight += weight;
                }
            }
        }
        self.values[var] = Some(value);
        self.prefix += 1;
        Ok(())
    }
}

/// Clause status under a partial assignment.
fn status(c: &Clause, values: &[Option<bool>]) -> Effect {
    let lit_true = c.pos().iter().any(|&v| values[v] == Some(true))
        || c.neg().iter().any(|&v| values[v] == Some(false));
    if lit_true {
        Effect::Satisfies
    } else if c.pos().iter().chain(c.neg()).all(|&v| values[v].is_some()) {
        Effect::Unsatisfies
    } else {
        Effect::Open
    }
}

/// Recomputes the step quantities for `var` from scratch by evaluating every
/// clause under `values` (indexed by variable, index 0 unused) and under the
/// two extensions with `var` set.
pub fn reference_step_quantities(
    formula: &Formula,
    values: &[Option<bool>],
    var: usize,
) -> StepQuantities {
    let mut sat_prev = 0;
    let mut unsat_prev = 0;
    let mut d = Deltas::default();
    let mut with_t = values.to_vec();
    with_t[var] = Some(true);
    let mut with_f = values.to_vec();
    with_f[var] = Some(false);
    for c in formula.clauses() {
        let weight = Wide::from(c.weight());
        match status(c, values) {
            Effect::Satisfies => sat_prev += weight,
            Effect::Unsatisfies => unsat_prev += weight,
            Effect::Open => d.add(weight, status(c, &with_t), status(c, &with_f)),
        }
    }
    d.finish(var, sat_prev, unsat_prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::random_instance;

    fn formula(n: usize, clauses: &[(&[i64], u64)]) -> Formula {
        Formula::new(
            n,
            clauses
                .iter()
                .map(|(l, w)| Clause::from_literals(l, *w))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn initial_bound_is_total_weight() {
        let f = formula(2, &[(&[1, 2], 1), (&[-1], 1)]);
        let s = TraceState::with_identity_order(&f);
        assert_eq!(s.bound2(), 2);
        assert_eq!((s.sat_weight(), s.unsat_weight()), (0, 0));

        let empty = formula(3, &[]);
        assert_eq!(TraceState::with_identity_order(&empty).bound2(), 0);
    }

    #[test]
    fn rejects_bad_order_length() {
        let f = formula(2, &[(&[1], 1)]);
        assert!(TraceState::new(&f, Order::identity(3)).is_err());
    }

    #[test]
    fn unit_clause_quantities() {
        let f = formula(1, &[(&[1], 1)]);
        let q = TraceState::with_identity_order(&f).step_quantities().unwrap();
        assert_eq!((q.t2, q.f2), (1, -1));
        assert_eq!(q.vz, VzQuantities { w: 1, w_bar: 0, f: 0, f_bar: 0 });
        assert_eq!(q.vz.alpha(), Alpha::ZeroDenominator { numerator: 1 });
    }

    #[test]
    fn complementary_units_are_symmetric() {
        let f = formula(1, &[(&[1], 1), (&[-1], 1)]);
        let q = TraceState::with_identity_order(&f).step_quantities().unwrap();
        assert_eq!((q.t2, q.f2), (0, 0));
    }

    #[test]
    fn three_clause_example() {
        // SAT_t = 3 (x1∨x2, x1), UNSAT_t = 2 (¬x1); SAT_f = 2, UNSAT_f = 1.
        let f = formula(2, &[(&[1, 2], 2), (&[-1], 2), (&[1], 1)]);
        let q = TraceState::with_identity_order(&f).step_quantities().unwrap();
        assert_eq!((q.sat_t, q.unsat_t, q.sat_f, q.unsat_f), (3, 2, 2, 1));
        assert_eq!((q.t2, q.f2), (1, 1));
    }

    #[test]
    fn open_clause_gives_alpha_one() {
        let f = formula(2, &[(&[1, 2], 1)]);
        let q = TraceState::with_identity_order(&f).step_quantities().unwrap();
        assert_eq!(q.vz, VzQuantities { w: 0, w_bar: 0, f: 1, f_bar: 0 });
        assert_eq!(q.vz.alpha(), Alpha::Value(ratio(1, 1)));
    }

    #[test]
    fn apply_unit_clause() {
        let f = formula(1, &[(&[1], 1)]);
        let mut s = TraceState::with_identity_order(&f);
        s.apply(true).unwrap();
        assert_eq!((s.sat_weight(), s.unsat_weight(), s.bound2()), (1, 0, 2));
        assert_eq!(s.apply(true), Err(Error::TraceComplete));
        assert_eq!(s.step_quantities(), Err(Error::TraceComplete));

        let mut s = TraceState::with_identity_order(&f);
        s.apply(false).unwrap();
        assert_eq!((s.sat_weight(), s.unsat_weight(), s.bound2()), (0, 1, 0));
    }

    #[test]
    fn tautology_never_unsatisfied() {
        let f = formula(2, &[(&[1, -1], 3), (&[2, -2, 1], 2)]);
        for values in [[false, false], [true, false], [false, true], [true, true]] {
            let mut s = TraceState::with_identity_order(&f);
            for v in values {
                let q = s.step_quantities().unwrap();
                assert_eq!(q, reference_step_quantities(&f, s.partial(), q.var));
                assert_eq!(q.vz.numerator(), q.t2);
                assert_eq!(q.vz.denominator(), q.t2 + q.f2);
                s.apply(v).unwrap();
            }
            assert_eq!(s.unsat_weight(), 0);
            assert_eq!(s.sat_weight(), 5);
        }
    }

    #[test]
    fn incremental_matches_rescan_on_shuffled_orders() {
        for seed in 0..200u64 {
            let f = random_instance(7, 15, 4, 9, seed).unwrap();
            let mut s = TraceState::new(&f, Order::shuffled(7, seed)).unwrap();
            let mut word = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
            while !s.is_complete() {
                let q = s.step_quantities().unwrap();
                assert_eq!(q, reference_step_quantities(&f, s.partial(), q.var));
                word = word.rotate_left(7) ^ 0x5555;
                let value = word & 1 == 1;
                s.apply(value).unwrap();
                let expect = if value { (q.sat_t, q.unsat_t) } else { (q.sat_f, q.unsat_f) };
                assert_eq!((s.sat_weight(), s.unsat_weight()), expect);
            }
            let a = s.assignment().unwrap();
            assert_eq!(s.sat_weight(), f.weight_of(&a));
            assert_eq!(s.bound2(), 2 * f.weight_of(&a));
        }
    }
}
