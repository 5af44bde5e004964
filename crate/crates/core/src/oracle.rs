//! Exact ground truth for desk-scale instances.
//!
//! * [`brute_force_opt`] enumerates all `2^n` assignments.
//! * [`exact_expectation`] expands the full decision tree of the randomized
//!   rule and mixes the leaf weights with the exact branch probabilities.
//! * [`check_randomized_lemmas`] and [`check_lp_lemmas`] walk the same runs
//!   and record every inequality the approximation proofs rely on, as exact
//!   rational comparisons `lhs ≤ rhs`.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::bookkeep::{StepQuantities, TraceState};
use crate::formula::{Assignment, Formula, Order};
use crate::greedy::{choose, RunResult};
use crate::lp::{build_relaxation, rounding_trace, solve_lp, LpSolution};
use crate::rational::{half, int, ratio, Rational};
use crate::{Error, Wide};

/// Default variable limit for [`brute_force_opt`].
pub const BRUTE_FORCE_LIMIT: usize = 20;
/// Default variable limit for the decision-tree oracles.
pub const EXPECTATION_LIMIT: usize = 15;

/// Maximum weight over all assignments, with the witness that has the
/// smallest binary encoding (`x_1` least significant, false < true).
pub fn brute_force_opt(formula: &Formula) -> Result<(Wide, Assignment), Error> {
    brute_force_opt_limited(formula, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_opt_limited(
    formula: &Formula,
    limit: usize,
) -> Result<(Wide, Assignment), Error> {
    let n = formula.num_vars();
    if n > limit || n >= 64 {
        return Err(Error::TooManyVariables {
            what: "brute force",
            n,
            limit: limit.min(63),
        });
    }
    let mut best = (formula.weight_of_mask(0), 0u64);
    for mask in 1..1u64 << n {
        let w = formula.weight_of_mask(mask);
        if w > best.0 {
            best = (w, mask);
        }
    }
    Ok((best.0, Assignment::from_mask(n, best.1)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectationReport {
    /// `E[w(S_n)]`.
    pub expectation: Rational,
    pub opt: Wide,
    /// `expectation / opt`; `None` when `opt = 0`.
    pub ratio: Option<Rational>,
    pub node_count: usize,
}

impl ExpectationReport {
    /// `E[w(S_n)] ≥ ¾·OPT`.
    pub fn meets_three_quarters(&self) -> bool {
        self.expectation >= ratio(3, 4) * int(self.opt)
    }
}

/// Probability that the randomized rule sets the next variable true.
fn branch_probability(q: &StepQuantities) -> Result<Rational, Error> {
    if q.is_randomized() {
        Ok(ratio(q.t2, q.sum2()))
    } else {
        choose(q, &Rational::zero()).map(|(_, p)| p)
    }
}

fn check_limit(formula: &Formula, what: &'static str, limit: usize) -> Result<(), Error> {
    let n = formula.num_vars();
    if n > limit {
        return Err(Error::TooManyVariables { what, n, limit });
    }
    Ok(())
}

fn children<'f>(
    state: &TraceState<'f>,
    p_true: &Rational,
) -> Result<Vec<(bool, Rational, TraceState<'f>)>, Error> {
    let mut out = Vec::with_capacity(2);
    for value in [true, false] {
        let p = if value {
            p_true.clone()
        } else {
            Rational::one() - p_true
        };
        if p.is_zero() {
            continue;
        }
        let mut child = state.clone();
        child.apply(value)?;
        out.push((value, p, child));
    }
    Ok(out)
}

/// Exact `E[w(S_n)]` of the randomized rule, together with `OPT`.
pub fn exact_expectation(formula: &Formula, order: Order) -> Result<ExpectationReport, Error> {
    exact_expectation_limited(formula, order, EXPECTATION_LIMIT)
}

pub fn exact_expectation_limited(
    formula: &Formula,
    order: Order,
    limit: usize,
) -> Result<ExpectationReport, Error> {
    check_limit(formula, "exact expectation", limit)?;
    fn expand(state: TraceState<'_>, nodes: &mut usize) -> Result<Rational, Error> {
        *nodes += 1;
        if state.is_complete() {
            return Ok(int(state.sat_weight()));
        }
        let q = state.step_quantities()?;
        let p_true = branch_probability(&q)?;
        let mut e = Rational::zero();
        for (_, p, child) in children(&state, &p_true)? {
            e += p * expand(child, nodes)?;
        }
        Ok(e)
    }
    let (opt, _) = brute_force_opt(formula)?;
    let mut node_count = 0;
    let expectation = expand(TraceState::new(formula, order)?, &mut node_count)?;
    let ratio = (opt != 0).then(|| &expectation / int(opt));
    Ok(ExpectationReport {
        expectation,
        opt,
        ratio,
        node_count,
    })
}

/// One checked inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub lhs: Rational,
    pub rhs: Rational,
    pub pass: bool,
}

impl Check {
    pub fn le(name: &'static str, lhs: Rational, rhs: Rational) -> Self {
        let pass = lhs <= rhs;
        Check {
            name,
            lhs,
            rhs,
            pass,
        }
    }
}

/// Checks made at one node of a run (or of the decision tree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaStep {
    /// Number of variables assigned before this step.
    pub prefix: usize,
    pub var: usize,
    pub t2: Wide,
    pub f2: Wide,
    pub checks: Vec<Check>,
}

impl LemmaStep {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub steps: Vec<LemmaStep>,
    /// Whole-run checks (the final guarantees).
    pub totals: Vec<Check>,
    pub pass: bool,
}

impl LemmaReport {
    fn new(steps: Vec<LemmaStep>, totals: Vec<Check>) -> Self {
        let pass = steps.iter().all(LemmaStep::pass) && totals.iter().all(|c| c.pass);
        LemmaReport {
            steps,
            totals,
            pass,
        }
    }

    /// First failing check, with the step it belongs to (if any).
    pub fn first_failure(&self) -> Option<(Option<&LemmaStep>, &Check)> {
        for s in &self.steps {
            if let Some(c) = s.checks.iter().find(|c| !c.pass) {
                return Some((Some(s), c));
            }
        }
        self.totals.iter().find(|c| !c.pass).map(|c| (None, c))
    }
}

pub const BRANCH_LOSS: &str = "w(OPT_{i-1}) - w(OPT_i) <= 2 * (bound change of x*_i) when x_i != x*_i";
pub const BOUND_SUM: &str = "0 <= t_i + f_i";
pub const EXPECTED_LOSS_VS_GAIN: &str = "E[w(OPT_{i-1}) - w(OPT_i)] <= E[B_i - B_{i-1}]";
pub const EXPECTED_LOSS_VS_HARMONIC: &str = "E[w(OPT_{i-1}) - w(OPT_i)] <= max(0, 2 t_i f_i / (t_i + f_i))";
pub const THREE_QUARTERS: &str = "3/4 OPT <= E[w(S_n)]";
pub const LP_DROP_TRUE: &str = "LP_{i-1} - LP_{i,t} <= 2 (1 - y*_i) f_i";
pub const LP_DROP_FALSE: &str = "LP_{i-1} - LP_{i,f} <= 2 y*_i t_i";
pub const LP_ROUNDING_CHOICE: &str = "min(LP_{i-1} - LP_{i,t} - t_i, LP_{i-1} - LP_{i,f} - f_i) <= 0";
pub const LP_STEP: &str = "LP_{i-1} - LP_i <= B_i - B_{i-1}";
pub const LP_GUARANTEE: &str = "OPT_LP/2 + W/4 <= w(S_n)";
pub const LP_CHAIN: &str = "3/4 OPT <= OPT_LP/2 + W/4";
pub const LP_RELAXES: &str = "OPT <= OPT_LP";
pub const LP_AT_MOST_W: &str = "OPT_LP <= W";

/// Weight of the assignment that follows the trace where it is set and `x*`
/// elsewhere.
fn spliced_weight(state: &TraceState<'_>, x_star: &Assignment, var: usize, value: bool) -> Wide {
    let formula = state.formula();
    let spliced = |v: usize| {
        if v == var {
            value
        } else {
            state.value(v).unwrap_or_else(|| x_star.get(v))
        }
    };
    formula
        .clauses()
        .iter()
        .filter(|c| c.satisfied_by(spliced))
        .map(|c| Wide::from(c.weight()))
        .sum()
}

/// Walks the whole decision tree of the randomized rule against the fixed
/// optimum `x*` from [`brute_force_opt`] and checks, at every node:
///
/// * `t_i + f_i ≥ 0`;
/// * the branch claim: setting `x_i` against `x*_i` loses at most twice the
///   bound change `x*_i` itself would have produced;
/// * expected loss at most `t_i·f_i/(t_i+f_i)` and at most the expected
///   gain, for the one-step conditional expectations.
///
/// The total check is `E[w(S_n)] ≥ ¾·OPT`.
pub fn check_randomized_lemmas(formula: &Formula, order: Order) -> Result<LemmaReport, Error> {
    check_limit(formula, "randomized lemma check", EXPECTATION_LIMIT)?;
    let (opt, x_star) = brute_force_opt(formula)?;

    fn walk(
        state: TraceState<'_>,
        x_star: &Assignment,
        steps: &mut Vec<LemmaStep>,
    ) -> Result<Rational, Error> {
        if state.is_complete() {
            return Ok(int(state.sat_weight()));
        }
        let q = state.step_quantities()?;
        let var = q.var;
        let mut checks = Vec::with_capacity(4);
        checks.push(Check::le(BOUND_SUM, Rational::zero(), int(q.sum2())));

        let opt_prev = spliced_weight(&state, x_star, var, x_star.get(var));
        let loss = |value: bool| opt_prev - spliced_weight(&state, x_star, var, value);
        let star = x_star.get(var);
        let (star_delta2, against) = if star { (q.t2, false) } else { (q.f2, true) };
        checks.push(Check::le(BRANCH_LOSS, int(loss(against)), int(star_delta2)));

        let p_true = branch_probability(&q)?;
        let p_false = Rational::one() - &p_true;
        let expected_loss = &p_true * int(loss(true)) + &p_false * int(loss(false));
        let lemma3_rhs = if q.sum2() == 0 {
            Rational::zero()
        } else {
            ratio(q.t2 * q.f2, q.sum2()).max(Rational::zero())
        };
        let expected_gain = &p_true * half(q.t2) + &p_false * half(q.f2);
        checks.push(Check::le(EXPECTED_LOSS_VS_HARMONIC, expected_loss.clone(), lemma3_rhs));
        checks.push(Check::le(EXPECTED_LOSS_VS_GAIN, expected_loss, expected_gain));
        steps.push(LemmaStep {
            prefix: state.prefix(),
            var,
            t2: q.t2,
            f2: q.f2,
            checks,
        });
        let mut e = Rational::zero();
        for (_, p, child) in children(&state, &p_true)? {
            e += p * walk(child, x_star, steps)?;
        }
        Ok(e)
    }

    let mut steps = Vec::new();
    let expectation = walk(TraceState::new(formula, order)?, &x_star, &mut steps)?;
    let totals = alloc::vec![Check::le(
        THREE_QUARTERS,
        ratio(3, 4) * int(opt),
        expectation
    )];
    Ok(LemmaReport::new(steps, totals))
}

/// Solves the relaxation, runs the deterministic rounding and checks both
/// claims inside the rounding argument, the rounding disjunction and the
/// per-step bound at every step, then the final chain
/// `w(S_n) ≥ ½·OPT_LP + W/4 ≥ ¾·OPT`.
///
/// The totals involving `OPT` are only produced when the formula is small
/// enough for [`brute_force_opt`].
pub fn check_lp_lemmas(formula: &Formula, order: Order) -> Result<LemmaReport, Error> {
    let sol = solve_lp(&build_relaxation(formula));
    check_lp_rounding(formula, order, &sol).map(|(report, _)| report)
}

/// [`check_lp_lemmas`] for an already solved relaxation; also returns the
/// rounded run.
pub fn check_lp_rounding(
    formula: &Formula,
    order: Order,
    sol: &LpSolution,
) -> Result<(LemmaReport, RunResult), Error> {
    let (run, trace) = rounding_trace(formula, order, sol)?;
    let one = Rational::one();
    let steps = trace
        .iter()
        .enumerate()
        .map(|(prefix, s)| {
            let q = &s.quantities;
            let drop_t = &s.lp_prev - &s.lp_true;
            let drop_f = &s.lp_prev - &s.lp_false;
            let slack = (&drop_t - s.t()).min(&drop_f - s.f());
            LemmaStep {
                prefix,
                var: q.var,
                t2: q.t2,
                f2: q.f2,
                checks: alloc::vec![
                    Check::le(BOUND_SUM, Rational::zero(), int(q.sum2())),
                    Check::le(LP_DROP_TRUE, drop_t, (&one - &s.y_star) * int(q.f2)),
                    Check::le(LP_DROP_FALSE, drop_f, &s.y_star * int(q.t2)),
                    Check::le(LP_ROUNDING_CHOICE, slack, Rational::zero()),
                    Check::le(LP_STEP, &s.lp_prev - s.lp_next(), s.bound_delta()),
                ],
            }
        })
        .collect();

    let w = int(formula.total_weight());
    let guarantee = &sol.objective / int(2) + &w / int(4);
    let mut totals = alloc::vec![
        Check::le(LP_GUARANTEE, guarantee.clone(), int(run.weight)),
        Check::le(LP_AT_MOST_W, sol.objective.clone(), w),
    ];
    if formula.num_vars() <= BRUTE_FORCE_LIMIT {
        let (opt, _) = brute_force_opt(formula)?;
        totals.push(Check::le(LP_RELAXES, int(opt), sol.objective.clone()));
        totals.push(Check::le(LP_CHAIN, ratio(3, 4) * int(opt), guarantee));
    }
    Ok((LemmaReport::new(steps, totals), run))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

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
    fn brute_force_examples() {
        let (w, a) = brute_force_opt(&formula(1, &[(&[1], 1), (&[-1], 1)])).unwrap();
        assert_eq!((w, a.values()), (1, &[false][..]));
        let (w, a) = brute_force_opt(&formula(2, &[(&[1, 2], 1), (&[-1], 1)])).unwrap();
        assert_eq!((w, a.values()), (2, &[false, true][..]));
        let (w, a) = brute_force_opt(&formula(3, &[])).unwrap();
        assert_eq!((w, a.values()), (0, &[false, false, false][..]));
    }

    #[test]
    fn limits_are_enforced() {
        let big = formula(21, &[(&[21], 1)]);
        assert!(matches!(brute_force_opt(&big), Err(Error::TooManyVariables { .. })));
        let mid = formula(16, &[(&[16], 1)]);
        assert!(exact_expectation(&mid, Order::identity(16)).is_err());
        assert!(check_randomized_lemmas(&mid, Order::identity(16)).is_err());
    }

    #[test]
    fn unit_clause_expectation() {
        let f = formula(1, &[(&[1], 1)]);
        let r = exact_expectation(&f, Order::identity(1)).unwrap();
        assert_eq!(r.expectation, int(1));
        assert_eq!(r.opt, 1);
        assert_eq!(r.ratio, Some(int(1)));
        assert_eq!(r.node_count, 2);
    }

    #[test]
    fn three_clause_expectation() {
        // x1 is a fair coin. true: SAT 3 so far, x2 then faces only satisfied
        // clauses -> 3. false: x1∨x2 open, x2 true -> 4. E = 7/2, OPT = 4.
        let f = formula(2, &[(&[1, 2], 2), (&[-1], 2), (&[1], 1)]);
        let r = exact_expectation(&f, Order::identity(2)).unwrap();
        assert_eq!(r.expectation, ratio(7, 2));
        assert_eq!(r.opt, 4);
        assert!(r.meets_three_quarters());
        assert_eq!(r.node_count, 5);
    }

    #[test]
    fn zero_opt_has_no_ratio() {
        let f = formula(1, &[(&[1], 0)]);
        let r = exact_expectation(&f, Order::identity(1)).unwrap();
        assert_eq!(r.ratio, None);
        assert!(r.meets_three_quarters());
    }

    #[test]
    fn randomized_lemmas_unit_clause() {
        let f = formula(1, &[(&[1], 1)]);
        let r = check_randomized_lemmas(&f, Order::identity(1)).unwrap();
        assert!(r.pass);
        assert_eq!(r.steps.len(), 1);
        let lemma3 = r.steps[0].checks.iter().find(|c| c.name == EXPECTED_LOSS_VS_HARMONIC).unwrap();
        assert_eq!(lemma3.lhs, Rational::zero());
    }

    #[test]
    fn randomized_lemmas_three_clause_root() {
        // x* = (false, true) with weight 4. Root: t2 = f2 = 1.
        // Setting x1 true loses w(OPT_0) - w(true, true) = 4 - 3 = 1 <= f2 = 1.
        // E[loss] = ½·1 = ½ <= t2·f2/(t2+f2) = ½ and <= E[B_1 - B_0] = ½.
        let f = formula(2, &[(&[1, 2], 2), (&[-1], 2), (&[1], 1)]);
        let r = check_randomized_lemmas(&f, Order::identity(2)).unwrap();
        assert!(r.pass);
        let root = &r.steps[0];
        let get = |name| root.checks.iter().find(|c| c.name == name).unwrap();
        assert_eq!(get(BRANCH_LOSS).lhs, int(1));
        assert_eq!(get(BRANCH_LOSS).rhs, int(1));
        assert_eq!(get(EXPECTED_LOSS_VS_HARMONIC).lhs, ratio(1, 2));
        assert_eq!(get(EXPECTED_LOSS_VS_HARMONIC).rhs, ratio(1, 2));
        assert_eq!(get(EXPECTED_LOSS_VS_GAIN).rhs, ratio(1, 2));
    }

    #[test]
    fn lp_lemmas_examples() {
        let f = formula(1, &[(&[1], 1)]);
        let r = check_lp_lemmas(&f, Order::identity(1)).unwrap();
        assert!(r.pass);
        let g = r.totals.iter().find(|c| c.name == LP_GUARANTEE).unwrap();
        assert_eq!(g.lhs, ratio(3, 4));
        assert_eq!(g.rhs, int(1));

        let f = formula(1, &[(&[1], 1), (&[-1], 1)]);
        let r = check_lp_lemmas(&f, Order::identity(1)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn failing_check_is_reported() {
        let bad = LemmaReport::new(
            alloc::vec![],
            alloc::vec![Check::le("demo", int(2), int(1))],
        );
        assert!(!bad.pass);
        assert_eq!(bad.first_failure().unwrap().1.name, "demo");
    }
}
